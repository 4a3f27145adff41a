#include "blenderlab/chains.hpp"

#include <cmath>
#include <limits>

#include "blenderlab/hetero_model.hpp"

namespace blenderlab {

double ChainModel::transition_Delta() const {
    auto it = T_Y.find({0, 1, 0});
    return it == T_Y.end() ? 0.0 : it->second;
}

void ChainModel::validate(bool require_gamma_flat) const {
    if (!(std::fabs(lambda2) > 1.0)) throw ConfigError("chain saddle needs |lambda| > 1");
    if (!(sigma2 > 0.0 && sigma2 < 1.0)) throw ConfigError("chain saddle sigma in (0,1)");
    if (!(sigma_uu > 0.0 && sigma_uu < sigma_u && sigma_u < 1.0))
        throw ConfigError("chain source eigenvalues out of order");
    if (transition_Delta() == 0.0)
        throw ConfigError("transition Delta (d/dy of T second coordinate at H) vanishes");
    if (gamma.L->nv != 2) throw ConfigError("gamma must be a 2-variable jet in (x, a)");
    if (y_a.L->nv != 1 || x_a.L->nv != 1)
        throw ConfigError("x_a, y_a must be 1-variable jets in a");
    // Flatness of order d: derivatives of gamma_a(0) and y_a vanish through d.
    for (int k = 0; k <= d; ++k) {
        if (require_gamma_flat && std::fabs(gamma.at(0, k)) > 1e-14)
            throw ConfigError("gamma_a(0) is not flat to order d at a = 0");
        if (std::fabs(y_a.c[k]) > 1e-14)
            throw ConfigError("y_a is not flat to order d at a = 0");
    }
}

ComposeResult compose_asymptotic(const ChainModel& chain, int n, int m) {
    chain.validate(false);
    const int r = chain.order;
    if (chain.d + 1 > r) throw ConfigError("jet order too low for flatness order d");
    const double lam_m = std::pow(std::fabs(chain.lambda2), m) *
                         ((chain.lambda2 < 0.0 && m % 2 == 1) ? -1.0 : 1.0);
    ComposeResult res;
    res.product_magnitude = std::pow(chain.sigma_u, n) * std::fabs(lam_m);
    if (res.product_magnitude > 10.0)
        throw PreconditionError("composition requires |sigma_u^n lambda^m| = O(1); got " +
                                std::to_string(res.product_magnitude));

    const JetLayout* L = JetLayout::get(1, r);
    const JetD a_var = JetD::variable(L, 0, 0.0);

    // S'2 shifted so the saddle excursion lands at H: (x_a, y_a + lambda^-m h).
    JetD px = chain.x_a;
    JetD py = chain.y_a + (chain.h / lam_m);
    // P^m
    px = px * std::pow(chain.sigma2, m);
    py = py * lam_m;
    // T in coordinates centered at H: arguments (x, y - h, a).
    JetD u = px;
    JetD v = py + (-chain.h);
    const ExprPtr TX = poly_from_table(chain.T_X);
    const ExprPtr TY = poly_from_table(chain.T_Y);
    JetD tx = eval_expr(*TX, u, v, a_var);
    JetD ty = eval_expr(*TY, u, v, a_var);
    // S^n
    res.exact_x = tx * std::pow(chain.sigma_uu, n);
    res.exact_y = ty * std::pow(chain.sigma_u, n);

    const double Delta = chain.transition_Delta();
    res.predicted_leading =
        std::pow(chain.sigma_u, n) * Delta * lam_m * chain.y_a.c[chain.d + 1];
    double dev = 0.0;
    for (int k = 0; k <= chain.d + 1; ++k) {
        const double pred = (k == chain.d + 1) ? res.predicted_leading : 0.0;
        dev = std::max(dev, std::fabs(res.exact_y.c[k] - pred) * factorial(k));
    }
    res.deviation = dev;
    return res;
}

JetD chain_mismatch(const ChainModel& chain, int n, int m) {
    ComposeResult z = compose_asymptotic(chain, n, m);
    const JetLayout* L = z.exact_x.L;
    const JetD a_var = JetD::variable(L, 0, 0.0);
    // gamma evaluated along x = exact_x(a), second slot the parameter itself.
    JetD gx = compose_poly2(chain.gamma.L, chain.gamma.c, 0.0, 0.0, z.exact_x, a_var);
    return gx - z.exact_y;
}

FlatnessReport boost_flatness(const ChainModel& chain, double tol, int cap) {
    chain.validate();
    if (!(chain.lambda2 < 0.0))
        throw PreconditionError("boost_flatness requires a negative saddle eigenvalue "
                                "(lambda < -1)");
    const double dy = chain.y_a.c[chain.d + 1] * factorial(chain.d + 1);
    const double dg = chain.gamma.at(0, chain.d + 1) * factorial(chain.d + 1);
    if (dy == 0.0)
        throw PreconditionError("boost_flatness: d^(d+1) y_a at 0 vanishes");
    if (dg == 0.0)
        throw PreconditionError("boost_flatness: d^(d+1) gamma_a(0) at 0 vanishes");
    const double lam_abs = std::fabs(chain.lambda2);
    if (eigenvalue_ratio_resonant(chain.sigma_u, lam_abs))
        throw PreconditionError("log sigma_u / log |lambda| resonance proxy failed");
    const double Delta = chain.transition_Delta();

    // Want n log sigma_u + m log|lambda| - log|Delta| + log|dy| close to
    // log|dg|, with the parity of m making the signed products agree.
    const double target = std::log(std::fabs(dg)) - std::log(std::fabs(dy)) +
                          std::log(std::fabs(Delta));
    const bool need_negative = (dg < 0.0) != (Delta * dy < 0.0);

    double best = std::numeric_limits<double>::infinity();
    int best_n = 0, best_m = 0;
    for (int m = 1; m <= cap; ++m) {
        const bool m_negative = (m % 2 == 1);  // lambda < 0
        if (m_negative != need_negative) continue;
        for (int n = 1; n <= cap; ++n) {
            const double dist =
                std::fabs(n * std::log(chain.sigma_u) + m * std::log(lam_abs) - target);
            if (dist < best - 1e-15) {
                best = dist;
                best_n = n;
                best_m = m;
            }
        }
    }
    if (best > tol)
        throw SearchExhaustedError("boost_flatness: best log-distance " + std::to_string(best) +
                                       " over (n, m) <= " + std::to_string(cap) +
                                       " exceeds tol " + std::to_string(tol),
                                   best);

    FlatnessReport rep;
    rep.n = best_n;
    rep.m = best_m;
    rep.m_odd = best_m % 2 == 1;
    rep.log_distance = best;
    rep.eta_before = chain_mismatch(chain, best_n, best_m);

    // Translate gamma by the order-<=d part of the mismatch: the a^k
    // constants (in x) of gamma absorb eta's low orders, leaving the
    // matched order-(d+1) residual.
    rep.translated = chain;
    for (int k = 0; k <= chain.d; ++k)
        rep.translated.gamma.at(0, k) -= rep.eta_before.c[k];
    rep.eta_after = chain_mismatch(rep.translated, best_n, best_m);

    const double threshold = 10.0 * tol;
    int achieved = -1;
    for (int k = 0; k <= chain.order; ++k) {
        if (std::fabs(rep.eta_after.c[k]) * factorial(k) > threshold) break;
        achieved = k;
    }
    rep.achieved_order = achieved;
    return rep;
}

long long chain_length(int r, int k) {
    if (r < 0 || k < 1) throw ConfigError("chain_length expects r >= 0, k >= 1");
    long long num = 1;
    for (int i = 1; i <= k; ++i) num = num * (r + i) / i;  // C(r+k, k), exact stepwise
    return num - 1;
}

long long chain_length_doubling(int d) {
    if (d < 0) throw ConfigError("chain_length_doubling expects d >= 0");
    return 1LL << d;
}

}  // namespace blenderlab
