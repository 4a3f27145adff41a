#pragma once

#include <memory>
#include <vector>

#include "blenderlab/hetero_model.hpp"

namespace blenderlab {

// Selected exponents and tuned unfolding constants for the renormalization
// of a strong-cycle model. Delta is the achieved minus-branch contraction
// sigma_u^n- * lambda^m- * d (the requested target is kept alongside); all
// closed forms downstream use the achieved value.
struct RenormPlan {
    int n_minus = 0, m_minus = 0, n_plus = 0, m_plus = 0;
    double eps = 0.0;
    double Delta = 0.0;            // achieved: sigma_u^n- lambda^m- d
    double Delta_plus = 0.0;       // sigma_u^n+ lambda^m+ d
    double Delta_requested = 0.0;
    double d = 0.0;                // d/dy of T_S second coordinate at 0
    int order = 2;                 // r used by the kappa growth invariant
    double s_y_tuned = 0.0;
    double q_y_tuned = 0.0;
    double H_scale = 0.0;          // eps * |lambda|^-m+
    // The printed inequality eps^-1 <= sigma_u^(n+ - n-) is impossible for
    // sigma_u < 1; recorded per plan for the report.
    bool printed_hypo2_satisfiable = false;
};

// Validates the four plan invariants by direct arithmetic; returns the empty
// string when all hold, else a description of the violated condition.
std::string validate_plan(const RenormPlan& plan, double sigma, double lambda_abs,
                          double sigma_u, double sigma_uu);

// Smallest m <= cap such that lambda_abs^m * sigma_u^n lies in
// [1 - eps/10, 1 + eps/10] for the best n; continued-fraction convergents
// seed the scan. Throws SearchExhaustedError with the best band distance.
std::pair<int, int> select_base_pair(double sigma_u, double lambda_abs, double eps, int cap);

// Full exponent selection for a strong model: inner pair (n-, m-) with both
// >= max(1/eps, 1/eps^3), sigma_u^n- lambda^m- d within eps/10 of Delta and
// above 1, then (n+, m+) = (n-, m-) + base pair. Throws InfeasiblePlanError
// naming the violated condition.
RenormPlan select_exponents(const HeteroModel& model, double Delta, double eps, int cap,
                            int order = 2);

// Word substitute for a transition with negative d/dy: the composite
// T_S o S^n o T_Q o Q^m o T_S has positive derivative for suitable (n, m)
// (two sign flips), and the leftover constant is absorbed by an unfolding
// translation. For affine transitions the rewritten model is returned;
// otherwise only the word and its derivative data are.
struct TSRewrite {
    BranchWord word;          // TS o S^n o TQ o Q^m o TS in application order
    double new_d = 0.0;       // d/dy of the composite second coordinate at 0
    bool sign_positive = false;
    std::optional<HeteroModel> rebuilt;  // affine transitions only
};

TSRewrite rewrite_TS_for_positive_d(const HeteroModel& model, int n, int m);

// Applies the tuned unfolding constants
//   s'_y = eps lambda^-m+ (Delta - 1),
//   q'_y = 2 (Delta - 1) eps lambda^-m+ sigma_u^-n- / d
// and returns the unfolded model (plan.s_y_tuned / q_y_tuned are filled in).
HeteroModel tune_unfolding(RenormPlan& plan, const HeteroModel& model);

// The two renormalized inverse branches H^-1 o T_S o S^n o T_Q o Q^m o H on
// B = [-2,2]^2, with H = (x, eps |lambda|^-m+ y). The domain chain is
// verified by interval images at construction.
struct RenormalizedPair {
    std::shared_ptr<WordMap> plus;
    std::shared_ptr<WordMap> minus;
    RenormPlan plan;
    double s_x = 0.0;  // the common x-limit of both branches
};

RenormalizedPair renormalize(const HeteroModel& model, const RenormPlan& plan);

// Affine normal form (x, y) -> (x0, Delta y + shift).
struct AffineTarget {
    double x0 = 0.0;
    double Delta = 1.0;
    double shift = 0.0;  // +-(Delta - 1) in the tuned form

    static AffineTarget tuned(double x0, double Delta_branch, double Delta_plan, int sign) {
        return {x0, Delta_branch, sign > 0 ? (Delta_plan - 1.0) : -(Delta_plan - 1.0)};
    }
};

// Per-derivative-order sup norms of (map - target) over a grid on B.
struct CrDistanceReport {
    int order = 0;
    int grid = 0;
    std::vector<double> sup_per_order;  // index k: sup over grid of max |d^k (diff)|
    double overall = 0.0;
    double sup_dx_y = 0.0;  // sup |d/dx of the y-component| (x-coupling bound)
};

CrDistanceReport cr_distance(const Map2& map, const AffineTarget& target, int order,
                             int grid = 33);

// ---------------------------------------------------------------------------
// Parametrized families.

// 1-variable polynomial in the parameter a (coefficient vector, c[k] a^k).
struct Poly1 {
    std::vector<double> c{0.0};

    static Poly1 constant(double v) { return Poly1{{v}}; }
    double at0() const { return c.empty() ? 0.0 : c[0]; }
    double eval(double a) const {
        double r = 0.0;
        for (size_t k = c.size(); k-- > 0;) r = r * a + c[k];
        return r;
    }
    JetD jet(const JetLayout* L) const {
        JetD j(L);
        for (size_t k = 0; k < c.size() && static_cast<int>(k) <= L->order; ++k) j.c[k] = c[k];
        return j;
    }
};

// A strong-cycle model whose eigenvalues and unfolding constants depend
// polynomially on the parameter a; the base model sits at a = 0.
struct ModelFamily {
    HeteroModelConfig base;  // transitions at a = 0
    Poly1 sigma_u_a, sigma_uu_a, sigma_a, lambda_a;
    Poly1 dyYS_a;   // d/dy of T_S second coordinate at 0, as a function of a
    Poly1 s_y_a;    // unfolding constants
    Poly1 q_y_a;
    int order = 2;  // jet order r in the parameter

    HeteroModel base_model() const;
};

// alpha(a) = Delta_-(a) - Delta_-(0) with
// Delta_±(a) = lambda(a)^m± * dyYS(a) * sigma_u(a)^n±.
struct AlphaReparam {
    RenormPlan plan;
    JetD alpha_of_a;   // 1-variable jet, alpha(0) = 0
    JetD a_of_alpha;   // inverse series
    double d_alpha_a0 = 0.0;  // d a / d alpha at 0 (reported O(1/n-))
    JetD lambda_alpha;        // lambda(a(alpha)) as jet in alpha
    JetD sigma_u_alpha;
    JetD dyYS_alpha;
    JetD Delta_minus_alpha;
    JetD Delta_plus_alpha;
    JetD s_y_alpha;           // unfolding constant re-expressed in alpha
    JetD q_y_alpha;
};

// Throws DegenerateJacobianError when d alpha / d a vanishes at 0.
AlphaReparam reparametrize_alpha(const ModelFamily& family, const RenormPlan& plan);

// Replaces the r-jet of s'_y(alpha) by the r-jet of
// eps * lambda(alpha)^-m+ * (Delta - 1). The incoming jet must vanish to
// order r (strong parametrized-cycle hypothesis); offending derivatives are
// listed in the PreconditionError otherwise.
AlphaReparam para_tune(const ModelFamily& family, const AlphaReparam& reparam);

}  // namespace blenderlab
