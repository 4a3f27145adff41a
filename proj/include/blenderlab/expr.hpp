#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "blenderlab/interval.hpp"
#include "blenderlab/jet.hpp"

namespace blenderlab {

// Expression tree over variables x, y and parameter a, with a fixed library
// of smooth primitives (polynomials, reciprocal, quintic smoothstep).
// Evaluable on scalars, intervals, and jets of either coefficient type.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, VarX, VarY, VarA, Add, Sub, Mul, Neg, Recip, IntPow, Smoothstep01 };

    Kind kind;
    double value = 0.0;  // Const
    int ipow = 0;        // IntPow exponent
    ExprPtr lhs, rhs;

    static ExprPtr constant(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Const;
        e->value = v;
        return e;
    }
    static ExprPtr var_x() { return simple(Kind::VarX); }
    static ExprPtr var_y() { return simple(Kind::VarY); }
    static ExprPtr var_a() { return simple(Kind::VarA); }
    static ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
    static ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Kind::Sub, std::move(a), std::move(b)); }
    static ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Kind::Mul, std::move(a), std::move(b)); }
    static ExprPtr neg(ExprPtr a) { return unary(Kind::Neg, std::move(a)); }
    static ExprPtr recip_of(ExprPtr a) { return unary(Kind::Recip, std::move(a)); }
    static ExprPtr ipow_of(ExprPtr a, int k) {
        auto e = unary(Kind::IntPow, std::move(a));
        const_cast<Expr*>(e.get())->ipow = k;
        return e;
    }
    // 0 for t <= 0, 1 for t >= 1, t^3(10 - 15t + 6t^2) between (C^2 seams).
    static ExprPtr smoothstep01(ExprPtr a) { return unary(Kind::Smoothstep01, std::move(a)); }

  private:
    static ExprPtr simple(Kind k) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        return e;
    }
    static ExprPtr unary(Kind k, ExprPtr a) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        return e;
    }
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        return e;
    }
};

namespace detail {

template <class T>
struct EvalTraits;

template <>
struct EvalTraits<double> {
    static double constant(double v, const double&) { return v; }
    static double recip(const double& v) {
        if (v == 0.0) throw SingularIntervalError("reciprocal of zero");
        return 1.0 / v;
    }
    static double ipow(const double& v, int k) { return std::pow(v, k); }
};

template <>
struct EvalTraits<Interval> {
    static Interval constant(double v, const Interval&) { return Interval::point(v); }
    static Interval recip(const Interval& v) { return blenderlab::recip(v); }
    static Interval ipow(const Interval& v, int k) { return pow_int(v, k); }
};

template <class S>
struct EvalTraits<Jet<S>> {
    static Jet<S> constant(double v, const Jet<S>& proto) {
        Jet<S> j = Jet<S>::constant(proto.L, ScalarOps<S>::from(v));
        j.base = proto.base;
        return j;
    }
    static Jet<S> recip(const Jet<S>& v) { return blenderlab::recip(v); }
    static Jet<S> ipow(const Jet<S>& v, int k) { return pow_int(v, k); }
};

// Quintic smoothstep on plain scalars.
inline double smoothstep01_scalar(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep01_eval(const double& t) { return smoothstep01_scalar(t); }

inline Interval smoothstep01_eval(const Interval& t) {
    // monotone non-decreasing
    return outward(smoothstep01_scalar(t.lo), smoothstep01_scalar(t.hi));
}

inline JetD smoothstep_poly_jet(const JetD& t) {
    JetD t2 = t * t;
    JetD t3 = t2 * t;
    JetD inner = JetD::constant(t.L, 10.0) + t * (-15.0) + t2 * 6.0;
    JetD r = t3 * inner;
    r.base = t.base;
    return r;
}

inline JetD smoothstep01_eval(const JetD& t) {
    const double t0 = t.c[0];
    if (t0 <= 0.0) return JetD::constant(t.L, 0.0);
    if (t0 >= 1.0) return JetD::constant(t.L, 1.0);
    return smoothstep_poly_jet(t);
}

inline JetI smoothstep_poly_ijet(const JetI& t) {
    JetI t2 = t * t;
    JetI t3 = t2 * t;
    JetI inner = JetI::constant(t.L, Interval::point(10.0)) + t * (-15.0) + t2 * 6.0;
    return t3 * inner;
}

inline JetI smoothstep01_eval(const JetI& t) {
    const Interval t0 = t.c[0];
    if (t0.hi <= 0.0) return JetI::constant(t.L, Interval::point(0.0));
    if (t0.lo >= 1.0) return JetI::constant(t.L, Interval::point(1.0));
    if (t0.lo > 0.0 && t0.hi < 1.0) return smoothstep_poly_ijet(t);
    // Straddles a seam: hull the flat branch(es) with the polynomial branch.
    JetI poly = smoothstep_poly_ijet(t);
    JetI out(t.L);
    for (int i = 0; i < out.size(); ++i) {
        Interval flat = Interval::point(0.0);
        if (i == 0) {
            if (t0.lo <= 0.0 && t0.hi >= 1.0) flat = Interval(0.0, 1.0);
            else if (t0.hi >= 1.0) flat = Interval::point(1.0);
        }
        out.c[i] = poly.c[i].merged(flat);
    }
    out.c[0] = Interval(std::max(0.0, out.c[0].lo), std::min(1.0, out.c[0].hi));
    return out;
}

}  // namespace detail

template <class T>
T eval_expr(const Expr& e, const T& x, const T& y, const T& a) {
    using Tr = detail::EvalTraits<T>;
    switch (e.kind) {
        case Expr::Kind::Const: return Tr::constant(e.value, x);
        case Expr::Kind::VarX: return x;
        case Expr::Kind::VarY: return y;
        case Expr::Kind::VarA: return a;
        case Expr::Kind::Add: return eval_expr(*e.lhs, x, y, a) + eval_expr(*e.rhs, x, y, a);
        case Expr::Kind::Sub: return eval_expr(*e.lhs, x, y, a) - eval_expr(*e.rhs, x, y, a);
        case Expr::Kind::Mul: return eval_expr(*e.lhs, x, y, a) * eval_expr(*e.rhs, x, y, a);
        case Expr::Kind::Neg: return -eval_expr(*e.lhs, x, y, a);
        case Expr::Kind::Recip: return Tr::recip(eval_expr(*e.lhs, x, y, a));
        case Expr::Kind::IntPow: return Tr::ipow(eval_expr(*e.lhs, x, y, a), e.ipow);
        case Expr::Kind::Smoothstep01: return detail::smoothstep01_eval(eval_expr(*e.lhs, x, y, a));
    }
    throw Error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Polynomial builders.

// Monomial table: exponents (i, j, k) for x^i y^j a^k -> coefficient.
using MonomialTable = std::map<std::array<int, 3>, double>;

inline ExprPtr poly_from_table(const MonomialTable& table) {
    ExprPtr sum = nullptr;
    for (const auto& [e, coeff] : table) {
        if (coeff == 0.0) continue;
        ExprPtr term = Expr::constant(coeff);
        if (e[0] == 1) term = Expr::mul(term, Expr::var_x());
        else if (e[0] > 1) term = Expr::mul(term, Expr::ipow_of(Expr::var_x(), e[0]));
        if (e[1] == 1) term = Expr::mul(term, Expr::var_y());
        else if (e[1] > 1) term = Expr::mul(term, Expr::ipow_of(Expr::var_y(), e[1]));
        if (e[2] == 1) term = Expr::mul(term, Expr::var_a());
        else if (e[2] > 1) term = Expr::mul(term, Expr::ipow_of(Expr::var_a(), e[2]));
        sum = sum ? Expr::add(sum, term) : term;
    }
    return sum ? sum : Expr::constant(0.0);
}

inline int table_degree_xy(const MonomialTable& table) {
    int d = 0;
    for (const auto& [e, c] : table)
        if (c != 0.0) d = std::max(d, e[0] + e[1]);
    return d;
}

}  // namespace blenderlab
