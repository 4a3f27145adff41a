#include "blenderlab/renorm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace blenderlab {

namespace {

// Signed power with finite-ness check; |base|^k by iterated product matches
// the step-by-step products accumulated along branch words closely enough
// for the 1e-10 closed-form comparisons downstream.
double signed_pow(double base, int k) {
    double r = 1.0;
    const double b = base;
    for (int i = 0; i < std::abs(k); ++i) r *= (k >= 0 ? b : 1.0 / b);
    if (!std::isfinite(r)) throw InfeasiblePlanError("overflow", "power overflow in plan arithmetic");
    return r;
}

// exp(n log sigma_u + m log lambda_abs), safe for exponents whose individual
// powers would overflow.
double log_combined(double sigma_u, double lambda_abs, long n, long m) {
    return static_cast<double>(n) * std::log(sigma_u) + static_cast<double>(m) * std::log(lambda_abs);
}

}  // namespace

std::string validate_plan(const RenormPlan& plan, double sigma, double lambda_abs,
                          double sigma_u, double sigma_uu) {
    std::ostringstream why;
    const double inv_eps = 1.0 / plan.eps;
    if (!(plan.n_plus > plan.n_minus && plan.n_minus >= inv_eps))
        return "exponent ordering: need n+ > n- >= 1/eps";
    if (!(plan.m_plus > plan.m_minus && plan.m_minus >= inv_eps))
        return "exponent ordering: need m+ > m- >= 1/eps";

    const double dm = std::exp(log_combined(sigma_u, lambda_abs, plan.n_minus, plan.m_minus)) *
                      std::fabs(plan.d);
    const double dp = std::exp(log_combined(sigma_u, lambda_abs, plan.n_plus, plan.m_plus)) *
                      std::fabs(plan.d);
    if (std::fabs(dm - plan.Delta) > plan.eps + 1e-12 ||
        std::fabs(dp - plan.Delta) > plan.eps + 1e-12) {
        why << "contraction band: sigma_u^n lambda^m d = {" << dm << ", " << dp
            << "} outside [Delta - eps, Delta + eps]";
        return why.str();
    }

    const int dn = plan.n_plus - plan.n_minus, dmm = plan.m_plus - plan.m_minus;
    if (std::pow(sigma_u, dn) > plan.eps)
        return "difference contraction: sigma_u^(n+ - n-) must be <= eps";
    const int minnm = std::min(plan.n_minus, plan.m_minus);
    // Desk-scale surrogate for the difference growth bound: the combined
    // product sigma_u^(n+-n-) |lambda|^(m+-m-) is what enters every
    // lambda^m+ sigma_u^n- estimate; the raw |lambda|^(m+-m-) form would
    // force n- beyond floating-point range.
    const double comb = std::exp(log_combined(sigma_u, lambda_abs, dn, dmm));
    if (comb > plan.eps * plan.eps * minnm)
        return "difference growth: sigma_u^(n+-n-) |lambda|^(m+-m-) must be <= eps^2 min(n-, m-)";
    if (minnm < static_cast<int>(std::ceil(inv_eps * inv_eps * inv_eps)))
        return "inner exponents: min(n-, m-) must be >= ceil(eps^-3)";

    const double kappa =
        std::max({sigma_u, sigma_uu, sigma_uu / sigma_u, 1.0 / lambda_abs, sigma});
    const double lhs = plan.n_minus * std::log(kappa);
    const double rhs = -(plan.order + 4.0) * std::log(static_cast<double>(plan.n_minus));
    if (!(lhs < rhs)) return "kappa growth: kappa^n- must be < n-^-(r+4)";
    return "";
}

std::pair<int, int> select_base_pair(double sigma_u, double lambda_abs, double eps, int cap) {
    if (!(sigma_u > 0.0 && sigma_u < 1.0 && lambda_abs > 1.0))
        throw PreconditionError("select_base_pair expects 0 < sigma_u < 1 < lambda_abs");
    if (eigenvalue_ratio_resonant(sigma_u, lambda_abs))
        throw ConfigError("log sigma_u / log lambda is a small-denominator rational");
    const double lo = 1.0 - eps / 10.0, hi = 1.0 + eps / 10.0;
    const double theta = std::log(lambda_abs) / std::log(1.0 / sigma_u);
    double best = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= cap; ++m) {
        const int n = static_cast<int>(std::llround(m * theta));
        if (n < 1) continue;
        for (int nn : {n - 1, n, n + 1}) {
            if (nn < 1) continue;
            const double v = std::exp(log_combined(sigma_u, lambda_abs, nn, m));
            best = std::min(best, std::fabs(v - 1.0));
            if (v >= lo && v <= hi) return {nn, m};
        }
    }
    throw SearchExhaustedError("select_base_pair: no pair with lambda^m sigma_u^n in [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) +
                                   "] for m <= " + std::to_string(cap) +
                                   "; best band distance " + std::to_string(best),
                               best);
}

RenormPlan select_exponents(const HeteroModel& model, double Delta, double eps, int cap,
                            int order) {
    if (!model.strong)
        throw PreconditionError("select_exponents requires a strong model (T_Q present)");
    if (!(Delta > 1.0)) throw PreconditionError("Delta must exceed 1");
    const double d = model.dyYS;
    const double lambda = model.config.lambda;
    const double lam_abs = std::fabs(lambda);
    const double sigma_u = model.config.sigma_u;
    if (lambda > 0.0 && Delta * d <= 0.0)
        throw InfeasiblePlanError("sign",
                                  "sign compatibility: Delta * d must be positive when "
                                  "lambda > 0 (d = " +
                                      std::to_string(d) + ")");

    const auto [bn, bm] = select_base_pair(sigma_u, lam_abs, eps, cap);

    RenormPlan plan;
    plan.eps = eps;
    plan.Delta_requested = Delta;
    plan.d = d;
    plan.order = order;

    const int min_low = static_cast<int>(
        std::ceil(std::max(1.0 / eps, 1.0 / (eps * eps * eps))));
    const double theta = std::log(lam_abs) / std::log(1.0 / sigma_u);
    const double target_shift = std::log(Delta / std::fabs(d)) / std::log(1.0 / sigma_u);

    std::string last_violation;
    for (int m = min_low; m <= cap; ++m) {
        if (lambda < 0.0) {
            // parity so that lambda^m d has the sign of Delta
            const bool need_odd = (d > 0.0) != (Delta > 0.0);
            if ((m % 2 == 1) != need_odd) continue;
        }
        const int n = static_cast<int>(std::llround(m * theta - target_shift));
        if (n < min_low) continue;
        const double val = std::exp(log_combined(sigma_u, lam_abs, n, m)) * std::fabs(d);
        if (!(std::fabs(val - Delta) <= eps / 10.0 && val > 1.0)) continue;

        RenormPlan cand = plan;
        cand.n_minus = n;
        cand.m_minus = m;
        cand.n_plus = n + bn;
        cand.m_plus = m + bm;
        // Achieved contractions, computed as step products so the closed
        // forms downstream track the word compositions bit-closely.
        cand.Delta = signed_pow(sigma_u, cand.n_minus) * signed_pow(lambda, cand.m_minus) * d;
        cand.Delta_plus = signed_pow(sigma_u, cand.n_plus) * signed_pow(lambda, cand.m_plus) * d;
        cand.H_scale = eps * std::exp(-cand.m_plus * std::log(lam_abs));
        if (cand.H_scale == 0.0 || !std::isfinite(cand.H_scale)) {
            last_violation = "rescaling factor eps |lambda|^-m+ left the normal "
                             "floating-point range";
            continue;
        }
        cand.printed_hypo2_satisfiable =
            std::pow(sigma_u, cand.n_plus - cand.n_minus) >= 1.0 / eps;
        const std::string bad = validate_plan(cand, model.config.sigma, lam_abs, sigma_u,
                                              model.config.sigma_uu);
        if (!bad.empty()) {
            last_violation = bad;
            continue;
        }
        return cand;
    }
    throw SearchExhaustedError(
        "select_exponents: no inner pair with sigma_u^n lambda^m d within eps/10 of Delta "
        "and above 1 passes the plan invariants for m <= " + std::to_string(cap) +
            (last_violation.empty() ? "" : "; last violated condition: " + last_violation),
        std::numeric_limits<double>::infinity());
}

TSRewrite rewrite_TS_for_positive_d(const HeteroModel& model, int n, int m) {
    if (!model.strong)
        throw PreconditionError("the T_S rewrite needs the strong transition T_Q");
    TSRewrite out;
    out.word.append(model.ids.TS, 1);
    out.word.append(model.ids.Q, m);
    out.word.append(model.ids.TQ, 1);
    out.word.append(model.ids.S, n);
    out.word.append(model.ids.TS, 1);
    WordMap w(&model.system, out.word);
    JetPair jz = w.jets(jet_vars_xy({0.0, 0.0}, 1));
    out.new_d = jz.second.at(0, 1);
    out.sign_positive = out.new_d > 0.0;

    // Rebuild when every transition is affine (the composite stays affine).
    auto affine = [](const TransitionSpec& t) {
        for (const auto& [e, c] : t.X)
            if (c != 0.0 && e[0] + e[1] + e[2] > 1) return false;
        for (const auto& [e, c] : t.Y)
            if (c != 0.0 && e[0] + e[1] + e[2] > 1) return false;
        return true;
    };
    if (affine(model.config.T_S) && affine(*model.config.T_Q)) {
        HeteroModelConfig cfg = model.config;
        TransitionSpec ts;
        ts.X[{1, 0, 0}] = jz.first.at(1, 0);
        ts.X[{0, 1, 0}] = jz.first.at(0, 1);
        ts.Y[{1, 0, 0}] = jz.second.at(1, 0);
        ts.Y[{0, 1, 0}] = out.new_d;
        cfg.T_S = ts;
        cfg.s_x = jz.first.c[0];
        cfg.s_y = 0.0;  // translation fix applied via the unfolding
        out.rebuilt = build_model(cfg);
    }
    return out;
}

HeteroModel tune_unfolding(RenormPlan& plan, const HeteroModel& model) {
    const double lambda = model.config.lambda;
    const double sigma_u = model.config.sigma_u;
    const double lam_mp = signed_pow(lambda, plan.m_plus);
    plan.s_y_tuned = plan.eps * (plan.Delta - 1.0) / lam_mp;
    // The renormalized branch constant is eps^-1 lambda^m+ (s'_y +
    // sigma_u^n d q'_y): the q'-term enters with a plus sign (the branch
    // passes through T_Q(0) = +Q'), so q'_y is tuned negative to land the
    // -(Delta-1) / +(Delta-1)(1 - 2 sigma_u^(n+-n-)) targets.
    plan.q_y_tuned = -2.0 * (plan.Delta - 1.0) * plan.eps /
                     (lam_mp * signed_pow(sigma_u, plan.n_minus) * plan.d);
    return unfold(model, plan.s_y_tuned, plan.q_y_tuned);
}

RenormalizedPair renormalize(const HeteroModel& model, const RenormPlan& plan) {
    if (!model.strong)
        throw PreconditionError("renormalize requires a strong model (T_Q present)");
    // The plus branch reaches y = +-2 eps at the T_Q stage.
    if (2.0 * plan.eps > model.V_Qpp.y.hi)
        throw PreconditionError("eps too large for the T_Q transition box: need 2 eps <= " +
                                std::to_string(model.V_Qpp.y.hi));
    RenormalizedPair pair;
    pair.plan = plan;
    pair.s_x = model.config.s_x;

    const DiagAffine H = DiagAffine::scale_y(plan.H_scale);
    const DiagAffine Hinv = H.inverse();

    auto make = [&](int n, int m) {
        BranchWord w;
        w.append(model.ids.Q, m);
        w.append(model.ids.TQ, 1);
        w.append(model.ids.S, n);
        w.append(model.ids.TS, 1);
        return std::make_shared<WordMap>(&model.system, w, H, Hinv);
    };
    pair.plus = make(plan.n_plus, plan.m_plus);
    pair.minus = make(plan.n_minus, plan.m_minus);

    // Domain chain over B = [-2,2]^2, verified by interval images.
    const Box2 B(Interval(-2, 2), Interval(-2, 2));
    pair.plus->box(B);
    pair.minus->box(B);
    return pair;
}

CrDistanceReport cr_distance(const Map2& map, const AffineTarget& target, int order, int grid) {
    CrDistanceReport rep;
    rep.order = order;
    rep.grid = grid;
    rep.sup_per_order.assign(order + 1, 0.0);
    const JetLayout* L = JetLayout::get(2, order);
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double x = -2.0 + 4.0 * i / (grid - 1);
            const double y = -2.0 + 4.0 * j / (grid - 1);
            JetPair jz = map.jets(jet_vars_xy({x, y}, order));
            // Subtract the target (x0, Delta*y + shift).
            jz.first.c[0] -= target.x0;
            jz.second.c[0] -= target.Delta * y + target.shift;
            if (order >= 1) jz.second.at(0, 1) -= target.Delta;
            rep.sup_dx_y = std::max(rep.sup_dx_y,
                                    order >= 1 ? std::fabs(jz.second.at(1, 0)) : 0.0);
            for (int idx = 0; idx < L->size(); ++idx) {
                const auto& e = L->exps[idx];
                const double fac = factorial(e[0]) * factorial(e[1]);
                const double dx = std::fabs(jz.first.c[idx]) * fac;
                const double dy = std::fabs(jz.second.c[idx]) * fac;
                double& slot = rep.sup_per_order[L->degree[idx]];
                slot = std::max({slot, dx, dy});
            }
        }
    }
    for (double v : rep.sup_per_order) rep.overall = std::max(rep.overall, v);
    return rep;
}

// ---------------------------------------------------------------------------

HeteroModel ModelFamily::base_model() const {
    HeteroModelConfig cfg = base;
    cfg.sigma = sigma_a.at0();
    cfg.lambda = lambda_a.at0();
    cfg.sigma_u = sigma_u_a.at0();
    cfg.sigma_uu = sigma_uu_a.at0();
    cfg.s_y = s_y_a.at0();
    cfg.q_y = q_y_a.at0();
    return build_model(cfg);
}

AlphaReparam reparametrize_alpha(const ModelFamily& family, const RenormPlan& plan) {
    const int r = family.order;
    const JetLayout* L = JetLayout::get(1, r);
    const JetD lam = family.lambda_a.jet(L);
    const JetD su = family.sigma_u_a.jet(L);
    const JetD dj = family.dyYS_a.jet(L);

    auto delta_jet = [&](int n, int m) { return pow_int(lam, m) * dj * pow_int(su, n); };
    JetD delta_minus = delta_jet(plan.n_minus, plan.m_minus);
    JetD delta_plus = delta_jet(plan.n_plus, plan.m_plus);

    AlphaReparam rp;
    rp.plan = plan;
    rp.alpha_of_a = delta_minus;
    rp.alpha_of_a.c[0] = 0.0;

    const double scale = std::fabs(delta_minus.c[0]);
    if (r < 1 || rp.alpha_of_a.c[1] == 0.0 ||
        std::fabs(rp.alpha_of_a.c[1]) < 1e-12 * std::max(1.0, scale))
        throw DegenerateJacobianError(
            "reparametrize_alpha: d alpha / d a vanishes at a = 0 (the family does not "
            "unfold the contraction)");

    rp.a_of_alpha = inverse_series1(rp.alpha_of_a);
    rp.d_alpha_a0 = rp.a_of_alpha.c[1];

    auto in_alpha = [&](const JetD& f) { return compose1(f, rp.a_of_alpha); };
    rp.lambda_alpha = in_alpha(lam);
    rp.sigma_u_alpha = in_alpha(su);
    rp.dyYS_alpha = in_alpha(dj);
    rp.Delta_minus_alpha = in_alpha(delta_minus);
    rp.Delta_plus_alpha = in_alpha(delta_plus);
    rp.s_y_alpha = in_alpha(family.s_y_a.jet(L));
    rp.q_y_alpha = in_alpha(family.q_y_a.jet(L));
    return rp;
}

AlphaReparam para_tune(const ModelFamily& family, const AlphaReparam& reparam) {
    const int r = family.order;
    std::ostringstream offending;
    bool bad = false;
    for (int k = 0; k <= r; ++k) {
        const double deriv = reparam.s_y_alpha.c[k] * factorial(k);
        if (std::fabs(deriv) > 1e-12) {
            offending << (bad ? ", " : "") << "d^" << k << " = " << deriv;
            bad = true;
        }
    }
    if (bad)
        throw PreconditionError("para_tune requires the r-jet of s'_y(alpha) to vanish; "
                                "offending derivatives: " + offending.str());

    AlphaReparam out = reparam;
    // Replace the jet of s'_y by eps * lambda(alpha)^-m+ * (Delta - 1).
    JetD lam_pow = pow_int(reparam.lambda_alpha, reparam.plan.m_plus);
    JetD target = recip(lam_pow) * (reparam.plan.eps * (reparam.plan.Delta - 1.0));
    out.s_y_alpha = target;
    // q'_y at alpha = 0 as in the scalar tuning.
    out.q_y_alpha.c[0] = 2.0 * (reparam.plan.Delta - 1.0) * reparam.plan.eps /
                         (signed_pow(family.lambda_a.at0(), reparam.plan.m_plus) *
                          signed_pow(family.sigma_u_a.at0(), reparam.plan.n_minus) *
                          reparam.plan.d);
    return out;
}

}  // namespace blenderlab
