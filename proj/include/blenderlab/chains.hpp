#pragma once

#include <vector>

#include "blenderlab/map2.hpp"

namespace blenderlab {

// Two-chart chain data for the flatness-boosting composition
// S^n o T o P^m applied to the point S'2_a = (x_a, y_a):
//   - saddle chart with inverse branch P(x, y) = (sigma2 x, lambda2 y),
//     lambda2 < -1 allowed (negative stable eigenvalue of the saddle);
//   - source chart with inverse branch S(x, y) = (sigma_uu x, sigma_u y);
//   - transition T from a neighborhood of H = (0, h) to the source chart,
//     written in coordinates centered at H, with T(H) = (z0, 0) and
//     Delta := second coordinate of d/dy T at H nonzero;
//   - gamma_a: graph of the incoming unstable curve near the source, a jet
//     in (x, a); y_a, x_a: coordinates of S'2 as jets in a.
// Flatness order d: derivatives of gamma_a(0) and y_a vanish through order d.
struct ChainModel {
    double sigma2 = 0.25;
    double lambda2 = -3.0;
    double sigma_u = 0.5;
    double sigma_uu = 0.2;
    double h = 0.5;
    MonomialTable T_X;  // transition coordinates about H: polynomial in (x, y-h, a)
    MonomialTable T_Y;
    JetD gamma;  // 2-variable jet in (x, a)
    JetD y_a;    // 1-variable jet in a
    JetD x_a;    // 1-variable jet in a
    int d = 0;
    int order = 5;  // working jet order in a

    double transition_Delta() const;  // d/dy of T second coordinate at H, a=0
    // Structural and flatness-order invariants. Translated chains produced
    // by boost_flatness legitimately lose the gamma flatness, so composition
    // re-checks skip it.
    void validate(bool require_gamma_flat = true) const;
};

struct ComposeResult {
    JetD exact_x;      // jets in a of the composed point
    JetD exact_y;
    double predicted_leading = 0.0;  // sigma_u^n Delta lambda^m d^(d+1) y / (d+1)!
    double deviation = 0.0;          // max |exact - predicted| coefficient through order d+1
    double product_magnitude = 0.0;  // |sigma_u^n lambda2^m|
};

// Exact jet in a of S^n o T o P^m (x_a, y_a + lambda2^-m h); the additive
// shift puts the saddle-chart excursion at H. Precondition:
// |sigma_u^n lambda2^m| <= 10.
ComposeResult compose_asymptotic(const ChainModel& chain, int n, int m);

// Mismatch eta_a = gamma_a(p_x(z_a)) - p_y(z_a) for the composed point z_a.
JetD chain_mismatch(const ChainModel& chain, int n, int m);

struct FlatnessReport {
    int n = 0, m = 0;
    bool m_odd = false;
    double log_distance = 0.0;   // achieved matching distance in log scale
    JetD eta_before;             // jets in a of the mismatch
    JetD eta_after;              // after translating gamma by the order-<=d jet
    int achieved_order = 0;      // largest k with |d^j eta| <= 10 tol, j <= k
    ChainModel translated;       // chain with the translated gamma
};

// Searches (n, m) with n log|sigma_u| + m log|lambda| - log|Delta| +
// log|d^(d+1) y| within tol of log|d^(d+1) gamma(0)|, parity of m chosen so
// the signed products match; translates gamma by the order-<=d jet of the
// mismatch and reports the achieved flatness order.
FlatnessReport boost_flatness(const ChainModel& chain, double tol, int cap);

// N(r, k) = dim{P in R[X_1..X_k] : deg P <= r, P(0) = 0} = C(r+k, k) - 1.
long long chain_length(int r, int k);
// 2^d chains consumed by the order-d induction in one parameter.
long long chain_length_doubling(int d);

}  // namespace blenderlab
