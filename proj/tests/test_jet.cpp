#include <doctest.h>

#include <cmath>
#include <vector>

#include "blenderlab/expr.hpp"
#include "blenderlab/jet.hpp"
#include "blenderlab/rng.hpp"

using namespace blenderlab;

namespace {

// Hand oracle: full polynomial product of 1-variable coefficient vectors,
// truncated afterwards.
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q,
                             size_t keep) {
    std::vector<double> r(keep, 0.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j)
            if (i + j < keep) r[i + j] += p[i] * q[j];
    return r;
}

JetD jet1_from(const std::vector<double>& coeffs, int order) {
    JetD j(JetLayout::get(1, order));
    for (size_t k = 0; k < coeffs.size() && static_cast<int>(k) <= order; ++k) j.c[k] = coeffs[k];
    return j;
}

// Random polynomial planar map of degree <= deg on the 2-variable layout.
struct RandomPoly2 {
    const JetLayout* L;
    std::vector<double> cx, cy;
    double bx, by;

    double eval_x(double u, double v) const { return eval(cx, u, v); }
    double eval_y(double u, double v) const { return eval(cy, u, v); }

  private:
    double eval(const std::vector<double>& c, double u, double v) const {
        double out = 0.0;
        for (int i = 0; i < L->size(); ++i)
            out += c[i] * std::pow(u - bx, L->exps[i][0]) * std::pow(v - by, L->exps[i][1]);
        return out;
    }
};

RandomPoly2 random_poly(Lcg& rng, int order, int deg) {
    RandomPoly2 p;
    p.L = JetLayout::get(2, order);
    p.bx = rng.uniform(-0.5, 0.5);
    p.by = rng.uniform(-0.5, 0.5);
    p.cx.assign(p.L->size(), 0.0);
    p.cy.assign(p.L->size(), 0.0);
    for (int i = 0; i < p.L->size(); ++i) {
        if (p.L->degree[i] > deg) continue;
        p.cx[i] = rng.uniform(-1, 1);
        p.cy[i] = rng.uniform(-1, 1);
    }
    return p;
}

}  // namespace

TEST_CASE("(1 + x)^2 expands binomially") {
    JetD one_plus_x = jet1_from({1.0, 1.0}, 2);
    JetD sq = one_plus_x * one_plus_x;
    CHECK(sq.c[0] == doctest::Approx(1.0));
    CHECK(sq.c[1] == doctest::Approx(2.0));
    CHECK(sq.c[2] == doctest::Approx(1.0));
}

TEST_CASE("x * y keeps only the mixed coefficient") {
    const JetLayout* L = JetLayout::get(2, 2);
    JetD x = JetD::variable(L, 0, 0.0);
    JetD y = JetD::variable(L, 1, 0.0);
    JetD xy = x * y;
    for (int i = 0; i < L->size(); ++i) {
        const auto& e = L->exps[i];
        if (e[0] == 1 && e[1] == 1) CHECK(xy.c[i] == doctest::Approx(1.0));
        else CHECK(xy.c[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("truncated product against the hand oracle") {
    // p(x) = 1 + 2x + 3x^2, q(x) = x - x^2, truncated at order 2 -> [0, 1, 1]
    auto expected = poly_mul({1, 2, 3}, {0, 1, -1}, 3);
    JetD p = jet1_from({1, 2, 3}, 2), q = jet1_from({0, 1, -1}, 2);
    JetD r = p * q;
    for (int k = 0; k <= 2; ++k) CHECK(r.c[k] == doctest::Approx(expected[k]));
    CHECK(expected == std::vector<double>{0, 1, 1});
}

TEST_CASE("mismatched shapes are rejected") {
    JetD a = jet1_from({1}, 2);
    JetD b(JetLayout::get(1, 3));
    CHECK_THROWS_AS(a + b, ShapeError);
    JetD c(JetLayout::get(2, 2));
    CHECK_THROWS_AS(a * c, ShapeError);
}

TEST_CASE("multiplication is commutative and associative through order r") {
    Lcg rng(99);
    const JetLayout* L = JetLayout::get(2, 4);
    for (int trial = 0; trial < 50; ++trial) {
        JetD a(L), b(L), c(L);
        for (int i = 0; i < L->size(); ++i) {
            a.c[i] = rng.uniform(-1, 1);
            b.c[i] = rng.uniform(-1, 1);
            c.c[i] = rng.uniform(-1, 1);
        }
        JetD ab = a * b, ba = b * a;
        JetD abc = (a * b) * c, acb = a * (b * c);
        for (int i = 0; i < L->size(); ++i) {
            CHECK(std::fabs(ab.c[i] - ba.c[i]) < 1e-12);
            CHECK(std::fabs(abc.c[i] - acb.c[i]) < 1e-12);
        }
    }
}

TEST_CASE("composition: outer x^2 on inner x + 1") {
    const JetLayout* L1 = JetLayout::get(1, 2);
    const JetLayout* L2 = JetLayout::get(2, 2);
    // outer g(u, v) = u^2 around base (0, 0)
    std::vector<double> g(L2->size(), 0.0);
    g[L2->index(2, 0, 0)] = 1.0;
    JetD inner_x = jet1_from({1.0, 1.0}, 2);  // x + 1 about 0
    JetD inner_y = JetD::constant(L1, 0.0);
    JetD out = compose_poly2(L2, g, 0.0, 0.0, inner_x, inner_y);
    CHECK(out.c[0] == doctest::Approx(1.0));
    CHECK(out.c[1] == doctest::Approx(2.0));
    CHECK(out.c[2] == doctest::Approx(1.0));
}

TEST_CASE("composition with the identity outer map is the identity") {
    const JetLayout* L1 = JetLayout::get(1, 3);
    const JetLayout* L2 = JetLayout::get(2, 3);
    std::vector<double> id_x(L2->size(), 0.0);
    id_x[L2->index(1, 0, 0)] = 1.0;
    Lcg rng(5);
    JetD inner = jet1_from({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1)}, 3);
    JetD dummy(L1);
    JetD out = compose_poly2(L2, id_x, 0.0, 0.0, inner, dummy);
    for (int k = 0; k <= 3; ++k) CHECK(out.c[k] == doctest::Approx(inner.c[k]));
}

TEST_CASE("jet composition matches central finite differences") {
    // Outer (x, y) -> (x^2 - y, x y), inner the jets of (t, t^2) at t = 0:
    // first output x^2 - y = t^2 - t^2 = 0, second x y = t^3.
    const JetLayout* L1 = JetLayout::get(1, 3);
    const JetLayout* L2 = JetLayout::get(2, 3);
    std::vector<double> fx(L2->size(), 0.0), fy(L2->size(), 0.0);
    fx[L2->index(2, 0, 0)] = 1.0;
    fx[L2->index(0, 1, 0)] = -1.0;
    fy[L2->index(1, 1, 0)] = 1.0;
    JetD it = JetD::variable(L1, 0, 0.0);
    JetD it2 = it * it;
    JetD ox = compose_poly2(L2, fx, 0.0, 0.0, it, it2);
    JetD oy = compose_poly2(L2, fy, 0.0, 0.0, it, it2);
    auto composite_y = [](double t) { return t * t * t; };
    const double h = 1e-5, h3 = 1e-2;
    const double d1 = (composite_y(h) - composite_y(-h)) / (2 * h);
    const double d3 = (composite_y(2 * h3) - 2 * composite_y(h3) + 2 * composite_y(-h3) -
                       composite_y(-2 * h3)) / (2 * h3 * h3 * h3);
    CHECK(std::fabs(oy.c[1] - d1) < 1e-6);
    CHECK(std::fabs(oy.c[3] * 6.0 - d3) < 1e-4 * std::max(1.0, std::fabs(d3)));
    for (int k = 0; k <= 3; ++k) CHECK(std::fabs(ox.c[k]) < 1e-15);
}

TEST_CASE("randomized composition against finite differences") {
    // Degree <= 4 random planar maps composed with random quadratic inner
    // jets; every coefficient matches central finite differences of the
    // scalar composite. (Full 10^3-trial sweep runs in the acceptance suite.)
    Lcg rng(31337);
    const int order = 3;
    int trials = 120;
    for (int trial = 0; trial < trials; ++trial) {
        RandomPoly2 outer = random_poly(rng, order, 4);
        JetD ix = jet1_from({outer.bx + rng.uniform(-0.05, 0.05), rng.uniform(-0.5, 0.5),
                             rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, order);
        JetD iy = jet1_from({outer.by + rng.uniform(-0.05, 0.05), rng.uniform(-0.5, 0.5),
                             rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, order);
        JetD ox = compose_poly2(outer.L, outer.cx, outer.bx, outer.by, ix, iy);

        auto composite = [&](double t) {
            double u = 0.0, v = 0.0, tp = 1.0;
            for (int k = 0; k <= order; ++k) {
                u += ix.c[k] * tp;
                v += iy.c[k] * tp;
                tp *= t;
            }
            return outer.eval_x(u, v);
        };
        const double h1 = 1e-5, h2 = 1e-4, h3 = 1e-2;
        const double f0 = composite(0.0);
        const double d1 = (composite(h1) - composite(-h1)) / (2 * h1);
        const double d2 = (composite(h2) + composite(-h2) - 2 * f0) / (h2 * h2);
        // third derivative: 5-point stencil with one Richardson step
        auto stencil3 = [&](double h) {
            return (composite(2 * h) - 2 * composite(h) + 2 * composite(-h) -
                    composite(-2 * h)) / (2 * h * h * h);
        };
        const double d3 = (4.0 * stencil3(h3) - stencil3(2 * h3)) / 3.0;
        auto rel = [](double got, double want, double tol) {
            return std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want));
        };
        CHECK(rel(ox.c[0], f0, 1e-12));
        CHECK(rel(ox.c[1], d1, 1e-6));
        CHECK(rel(ox.c[2] * 2.0, d2, 1e-6));
        CHECK(rel(ox.c[3] * 6.0, d3, 1e-4));
    }
}

TEST_CASE("reciprocal jet inverts the series") {
    JetD p = jet1_from({2.0, -1.0, 0.5, 0.25}, 3);
    JetD r = recip(p);
    JetD prod = p * r;
    CHECK(prod.c[0] == doctest::Approx(1.0));
    for (int k = 1; k <= 3; ++k) CHECK(std::fabs(prod.c[k]) < 1e-14);
}

TEST_CASE("1-variable inverse series round-trips") {
    JetD f = jet1_from({0.0, 2.0, 0.3, -0.1, 0.05}, 4);
    JetD g = inverse_series1(f);
    JetD comp = compose1(f, g);
    CHECK(comp.c[1] == doctest::Approx(1.0));
    for (int k = 2; k <= 4; ++k) CHECK(std::fabs(comp.c[k]) < 1e-12);
    CHECK(std::fabs(comp.c[0]) < 1e-15);
}

TEST_CASE("interval jets enclose pointwise jets") {
    const JetLayout* L = JetLayout::get(2, 2);
    ExprPtr e = Expr::add(Expr::mul(Expr::var_x(), Expr::var_y()),
                          Expr::ipow_of(Expr::sub(Expr::var_x(), Expr::constant(0.5)), 2));
    Lcg rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double cx = rng.uniform(-1, 1), cy = rng.uniform(-1, 1);
        const double rx = rng.uniform(0, 0.2), ry = rng.uniform(0, 0.2);
        JetI jx = JetI::variable(L, 0, Interval(cx - rx, cx + rx));
        JetI jy = JetI::variable(L, 1, Interval(cy - ry, cy + ry));
        JetI out = eval_expr(*e, jx, jy, JetI::constant(L, Interval::point(0.0)));
        // sample a point inside the cell
        const double px = cx + rx * 0.37, py = cy - ry * 0.61;
        JetD dx = JetD::variable(L, 0, px), dy = JetD::variable(L, 1, py);
        JetD pt = eval_expr(*e, dx, dy, JetD::constant(L, 0.0));
        for (int i = 0; i < L->size(); ++i) CHECK(out.c[i].contains(pt.c[i], 1e-12));
    }
}
