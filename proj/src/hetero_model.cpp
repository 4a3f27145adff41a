#include "blenderlab/hetero_model.hpp"

#include <cmath>

namespace blenderlab {

namespace {

ExprPtr affine_coord(double constant, const MonomialTable& table) {
    MonomialTable t = table;
    t[{0, 0, 0}] += constant;
    return poly_from_table(t);
}

PlanarMap transition_map(const TransitionSpec& spec) {
    return PlanarMap(affine_coord(spec.const_x, spec.X), affine_coord(spec.const_y, spec.Y));
}

// T_H tables are written in coordinates centered at H = (0, h): the branch
// evaluates the polynomial at (x, y - h).
PlanarMap transition_map_centered_y(const TransitionSpec& spec, double h) {
    MonomialTable tx = spec.X, ty = spec.Y;
    tx[{0, 0, 0}] += spec.const_x;
    ty[{0, 0, 0}] += spec.const_y;
    // substitute y -> y - h by expanding each monomial
    auto shift = [h](const MonomialTable& t) {
        MonomialTable out;
        for (const auto& [e, c] : t) {
            if (c == 0.0) continue;
            // (y - h)^j = sum_m C(j,m) y^m (-h)^(j-m)
            const int j = e[1];
            double binom = 1.0;
            for (int m = j; m >= 0; --m) {
                // binom = C(j, m)
                double coeff = c * binom * std::pow(-h, j - m);
                out[{e[0], m, e[2]}] += coeff;
                binom = binom * m / (j - m + 1.0);
            }
        }
        return out;
    };
    return PlanarMap(poly_from_table(shift(tx)), poly_from_table(shift(ty)));
}

// Partial derivative of the polynomial at the origin of its own chart.
double table_deriv(const TransitionSpec& spec, bool second_coord, int var) {
    const MonomialTable& t = second_coord ? spec.Y : spec.X;
    std::array<int, 3> want{0, 0, 0};
    want[var] = 1;
    auto it = t.find(want);
    return it == t.end() ? 0.0 : it->second;
}

}  // namespace

bool eigenvalue_ratio_resonant(double sigma_u, double lambda_abs, int max_den, double tol) {
    const double ratio = std::log(sigma_u) / std::log(lambda_abs);
    for (int q = 1; q <= max_den; ++q) {
        const double p = std::round(ratio * q);
        if (std::fabs(ratio - p / q) < tol) return true;
    }
    return false;
}

HeteroModel build_model(const HeteroModelConfig& config) {
    const double lam_abs = std::fabs(config.lambda);
    if (!(config.sigma > 0.0 && config.sigma < 1.0))
        throw ConfigError("saddle sigma must be in (0,1)");
    if (!(lam_abs > 1.0)) throw ConfigError("saddle |lambda| must exceed 1");
    if (!(config.sigma_uu > 0.0 && config.sigma_uu < config.sigma_u && config.sigma_u < 1.0))
        throw ConfigError("source eigenvalues must satisfy 0 < sigma_uu < sigma_u < 1");
    if (eigenvalue_ratio_resonant(config.sigma_u, lam_abs))
        throw ConfigError("log sigma_u / log |lambda| is a small-denominator rational");
    if (table_degree_xy(config.T_S.X) > 6 || table_degree_xy(config.T_S.Y) > 6)
        throw ConfigError("transition polynomials are restricted to degree <= 6");

    HeteroModel m;
    m.config = config;
    m.strong = config.T_Q.has_value();

    // Default boxes. Saddle chart follows V_Q = [-2,2] x [-2/|lambda|, 2/|lambda|],
    // V'_Q = [-2 sigma, 2 sigma] x [-2,2].
    m.V_Q = config.V_Q.value_or(Box2(Interval(-2, 2), Interval(-2 / lam_abs, 2 / lam_abs)));
    m.V_Qp = config.V_Qp.value_or(
        Box2(Interval(-2 * config.sigma, 2 * config.sigma), Interval(-2, 2)));
    m.V_Qpp = config.V_Qpp.value_or(Box2(Interval(-0.7, 0.7),
                                         Interval(-std::min(0.7, 1.9 / lam_abs),
                                                  std::min(0.7, 1.9 / lam_abs))));
    m.V_S = config.V_S.value_or(Box2(Interval(-1, 1), Interval(-1, 1)));
    m.V_Sp = config.V_Sp.value_or(Box2(Interval(-config.sigma_uu, config.sigma_uu),
                                       Interval(-config.sigma_u, config.sigma_u)));
    m.V_Spp = config.V_Spp.value_or(Box2(Interval(-0.25, 0.25), Interval(-0.25, 0.25)));
    m.V_H = config.V_H.value_or(Box2::centered(0.0, config.h, 0.3, 0.3));

    if (config.T_Q) {
        const double dyYQ = table_deriv(*config.T_Q, true, 1);
        if (std::fabs(dyYQ - 1.0) > 1e-12)
            throw ConfigError("strong-cycle normalization violated: d/dy of T_Q second "
                              "coordinate at 0 is " +
                              std::to_string(dyYQ) + ", expected 1");
        if (table_degree_xy(config.T_Q->X) > 6 || table_degree_xy(config.T_Q->Y) > 6)
            throw ConfigError("transition polynomials are restricted to degree <= 6");
    }

    // Branch atlas. The chart branches are exactly linear by construction.
    auto linear_map = [](double ax, double ay) {
        return PlanarMap(Expr::mul(Expr::constant(ax), Expr::var_x()),
                         Expr::mul(Expr::constant(ay), Expr::var_y()));
    };
    m.system.branches.push_back({"S", linear_map(config.sigma_uu, config.sigma_u), m.V_S});
    m.ids.S = 0;
    m.system.branches.push_back({"Q", linear_map(config.sigma, config.lambda), m.V_Q});
    m.ids.Q = 1;

    TransitionSpec ts = config.T_S;
    ts.const_x = config.s_x;
    ts.const_y = config.s_y;
    m.system.branches.push_back({"TS", transition_map(ts), m.V_Spp});
    m.ids.TS = 2;

    if (config.T_Q) {
        TransitionSpec tq = *config.T_Q;
        tq.const_x = config.q_x;
        tq.const_y = config.q_y;
        m.system.branches.push_back({"TQ", transition_map(tq), m.V_Qpp});
        m.ids.TQ = static_cast<int>(m.system.branches.size()) - 1;
    }
    if (config.T_H) {
        m.system.branches.push_back(
            {"TH", transition_map_centered_y(*config.T_H, config.h), m.V_H});
        m.ids.TH = static_cast<int>(m.system.branches.size()) - 1;
    }

    // Transversality flags.
    m.dyYS = table_deriv(config.T_S, true, 1);
    m.flags.t2 = std::fabs(m.dyYS) > 1e-9;
    if (config.T_H) {
        // Tangent of the T_H image of the vertical {x = 0} against the
        // horizontal W^uu_loc(S): transverse iff the image tangent has a
        // nonzero vertical component.
        const double dyYH = table_deriv(*config.T_H, true, 1);
        m.flags.t1 = std::fabs(dyYH) > 1e-9;
    }
    if (config.T_Q) {
        // W^uu(S) through Q against W^s_loc(Q) = {x = 0}: the pulled-back
        // tangent (DT_Q)^-1 e_x has x-component dyYQ / det.
        const double a = table_deriv(*config.T_Q, false, 0);
        const double b = table_deriv(*config.T_Q, false, 1);
        const double c = table_deriv(*config.T_Q, true, 0);
        const double d = table_deriv(*config.T_Q, true, 1);
        const double det = a * d - b * c;
        if (std::fabs(det) < 1e-12)
            throw ConfigError("T_Q derivative at 0 is singular");
        m.flags.t3 = std::fabs(d / det) > 1e-9;
    }

    m.upper_half_case = config.h > 0.0;

    // Sanity: transitions land where the chain expects them.
    if (!m.V_Q.contains(config.s_x, config.s_y, 1e-9))
        throw ConfigError("S' = T_S(0) falls outside the saddle chart box V_Q");
    if (config.T_Q && !m.V_S.contains(config.q_x, config.q_y, 1e-9))
        throw ConfigError("Q' = T_Q(0) falls outside the source chart box V_S");
    return m;
}

HeteroModel unfold(const HeteroModel& model, double s_y, double q_y) {
    HeteroModelConfig cfg = model.config;
    cfg.s_y = s_y;
    cfg.q_y = q_y;
    return build_model(cfg);
}

CantorPair build_cantor_pair(const HeteroModel& model, int n, int N, double W_halfwidth_x) {
    if (!model.config.T_H)
        throw PreconditionError("build_cantor_pair requires the T_H transition");
    if (N < 1 || n < 1) throw PreconditionError("exponents n, N must be >= 1");

    const double lam_abs = std::fabs(model.config.lambda);
    const double shifted_s_y = std::pow(model.config.lambda, -n) * model.config.h;

    CantorPair pair;
    pair.shifted_s_y = shifted_s_y;
    pair.model = unfold(model, shifted_s_y, model.config.q_y);
    const HeteroModel& m = pair.model;

    // W must be thin enough in y that the saddle-chart excursion stays in
    // V_H: |lambda|^n * w_y <= 0.8 * V_H half-height.
    const double vh_ry = 0.5 * m.V_H.y.width();
    const double w_y = 0.8 * vh_ry * std::pow(lam_abs, -n);
    const double w_x = W_halfwidth_x;
    pair.W = Box2::centered(0.0, 0.0, w_x, w_y);

    pair.word1.append(m.ids.TS, 1);
    pair.word1.append(m.ids.Q, n);
    pair.word1.append(m.ids.TH, 1);
    pair.word1.append(m.ids.S, N);
    pair.word2.append(m.ids.S, N);

    WordMap w1(&m.system, pair.word1);
    WordMap w2(&m.system, pair.word2);
    try {
        pair.image1 = w1.box(pair.W);
    } catch (const DomainError& e) {
        throw PreconditionError(std::string("cantor word S^N o T_H o Q^n o T~_S is not "
                                            "defined on W: ") +
                                e.what());
    }
    pair.image2 = w2.box(pair.W);

    if (!pair.image1.strictly_inside(pair.W) || !pair.image2.strictly_inside(pair.W))
        throw ConfigError("cantor images escape W: image1 " + pair.image1.str() + ", image2 " +
                          pair.image2.str() + ", W " + pair.W.str());
    pair.disjointness_margin = disjointness_margin(pair.image1, pair.image2);
    if (pair.disjointness_margin <= 0.0)
        throw ConfigError("cantor images overlap: image1 " + pair.image1.str() + ", image2 " +
                          pair.image2.str());
    return pair;
}

HorseshoeReport build_horseshoe(const HeteroModel& model, int n, int N, double eps,
                                double threshold_min) {
    if (!model.config.T_H)
        throw PreconditionError("build_horseshoe requires the T_H transition");
    if (eps <= 0.0) throw PreconditionError("eps must be positive (box B is empty otherwise)");
    const double lam_abs = std::fabs(model.config.lambda);
    const double threshold = eps * std::pow(model.config.sigma_u, n) * std::pow(lam_abs, N);
    HorseshoeReport rep;
    rep.threshold = threshold;
    if (threshold < threshold_min)
        throw PreconditionError("eps * sigma_u^n * |lambda|^N = " + std::to_string(threshold) +
                                " is below the crossing threshold " +
                                std::to_string(threshold_min));

    const double h = model.config.h;
    const double lamN = std::pow(model.config.lambda, N);
    rep.B = Box2(Interval(-1, 1),
                 Interval::hull((h - eps) / lamN, (h + eps) / lamN));

    rep.word.append(model.ids.Q, N);
    rep.word.append(model.ids.TH, 1);
    rep.word.append(model.ids.S, n);
    rep.word.append(model.ids.TS, 1);
    WordMap g2(&model.system, rep.word);

    rep.image = g2.box(rep.B);

    // Markov crossing: the image must intersect B, stay clear of the
    // vertical boundary of B, and overshoot B's horizontal edges.
    if (!rep.image.intersects(rep.B))
        throw ConfigError("G2(B) does not meet B: image " + rep.image.str());
    rep.margin_x = std::min(rep.B.x.hi - rep.image.x.hi, rep.image.x.lo - rep.B.x.lo);
    if (rep.margin_x <= 0.0)
        throw ConfigError("G2(B) touches the vertical boundary of B: image " + rep.image.str());
    const Box2 top = g2.box(Box2(rep.B.x, Interval::point(rep.B.y.hi)));
    const Box2 bot = g2.box(Box2(rep.B.x, Interval::point(rep.B.y.lo)));
    // The two horizontal edge images must clear B in the y-direction.
    auto edge_clearance = [&](const Box2& e) {
        return std::max(e.y.lo - rep.B.y.hi, rep.B.y.lo - e.y.hi);
    };
    rep.margin_y = std::min(edge_clearance(top), edge_clearance(bot));
    if (rep.margin_y <= 0.0)
        throw ConfigError("B meets G2 of B's horizontal boundary (no vertical overshoot)");

    rep.saddle = find_periodic_orbit(g2, 1, Vec2{rep.B.x.mid(), rep.B.y.mid()});
    rep.vertical_multiplier = (std::abs(rep.saddle.mu1) >= std::abs(rep.saddle.mu2))
                                  ? rep.saddle.mu1.real()
                                  : rep.saddle.mu2.real();
    const double dyYH = [&] {
        MonomialTable t = model.config.T_H->Y;
        auto it = t.find({0, 1, 0});
        return it == t.end() ? 0.0 : it->second;
    }();
    rep.expected_vertical = lamN * std::pow(model.config.sigma_u, n) * model.dyYS * dyYH;
    return rep;
}

}  // namespace blenderlab
