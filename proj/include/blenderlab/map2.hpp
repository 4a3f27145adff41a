#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "blenderlab/expr.hpp"

namespace blenderlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double px, double py) : x(px), y(py) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

using JetPair = std::pair<JetD, JetD>;
using IJetPair = std::pair<JetI, JetI>;

// A planar map as a pair of expressions in (x, y, a).
struct PlanarMap {
    ExprPtr fx, fy;

    PlanarMap() = default;
    PlanarMap(ExprPtr x_expr, ExprPtr y_expr) : fx(std::move(x_expr)), fy(std::move(y_expr)) {}

    template <class T>
    std::pair<T, T> eval(const T& x, const T& y, const T& a) const {
        return {eval_expr(*fx, x, y, a), eval_expr(*fy, x, y, a)};
    }

    Vec2 eval_point(Vec2 z, double a = 0.0) const {
        auto [px, py] = eval(z.x, z.y, a);
        return {px, py};
    }

    Box2 eval_box(const Box2& b, double a = 0.0) const {
        auto [ix, iy] = eval(b.x, b.y, Interval::point(a));
        return {ix, iy};
    }
};

// Diagonal affine map (x, y) -> (ax*x + bx, ay*y + by); identity by default.
struct DiagAffine {
    double ax = 1.0, bx = 0.0;
    double ay = 1.0, by = 0.0;

    static DiagAffine identity() { return {}; }
    static DiagAffine scale_y(double s) { return {1.0, 0.0, s, 0.0}; }

    DiagAffine inverse() const { return {1.0 / ax, -bx / ax, 1.0 / ay, -by / ay}; }

    Vec2 apply(Vec2 z) const { return {ax * z.x + bx, ay * z.y + by}; }
    Box2 apply(const Box2& b) const {
        Interval nx = Interval::point(ax) * b.x + Interval::point(bx);
        Interval ny = Interval::point(ay) * b.y + Interval::point(by);
        return {nx, ny};
    }
    template <class T>
    std::pair<Jet<T>, Jet<T>> apply(const std::pair<Jet<T>, Jet<T>>& z) const {
        auto jx = z.first * detail::ScalarOps<T>::from(ax);
        jx.c[0] = jx.c[0] + detail::ScalarOps<T>::from(bx);
        auto jy = z.second * detail::ScalarOps<T>::from(ay);
        jy.c[0] = jy.c[0] + detail::ScalarOps<T>::from(by);
        return {jx, jy};
    }
};

// Uniform interface for anything dynamics operations can act on: a planar
// map with the parameter bound, a branch word, or a renormalized word.
struct Map2 {
    virtual ~Map2() = default;
    virtual Vec2 point(Vec2 z) const = 0;
    virtual JetPair jets(const JetPair& z) const = 0;
    virtual IJetPair ijets(const IJetPair& z) const = 0;
    virtual Box2 box(const Box2& b) const = 0;
};

// PlanarMap with the parameter value frozen.
struct BoundMap final : Map2 {
    PlanarMap map;
    double a = 0.0;

    BoundMap() = default;
    BoundMap(PlanarMap m, double a_) : map(std::move(m)), a(a_) {}

    Vec2 point(Vec2 z) const override { return map.eval_point(z, a); }
    JetPair jets(const JetPair& z) const override {
        JetD ja = JetD::constant(z.first.L, a);
        auto [jx, jy] = map.eval(z.first, z.second, ja);
        return {jx, jy};
    }
    IJetPair ijets(const IJetPair& z) const override {
        JetI ja = JetI::constant(z.first.L, Interval::point(a));
        auto [jx, jy] = map.eval(z.first, z.second, ja);
        return {jx, jy};
    }
    Box2 box(const Box2& b) const override { return map.eval_box(b, a); }
};

// Jet helpers: identity jets of (x, y) around a base point.
inline JetPair jet_vars_xy(Vec2 z, int order) {
    const JetLayout* L = JetLayout::get(2, order);
    JetD jx = JetD::variable(L, 0, z.x);
    JetD jy = JetD::variable(L, 1, z.y);
    jx.base = {z.x, z.y, 0.0};
    jy.base = jx.base;
    return {jx, jy};
}

inline IJetPair ijet_vars_xy(const Box2& cell, int order) {
    const JetLayout* L = JetLayout::get(2, order);
    JetI jx = JetI::variable(L, 0, cell.x);
    JetI jy = JetI::variable(L, 1, cell.y);
    return {jx, jy};
}

// First-order data of a map at a point: image and Jacobian.
struct JacobianData {
    Vec2 image;
    double dxx, dxy, dyx, dyy;
};

inline JacobianData jacobian(const Map2& f, Vec2 z) {
    auto [jx, jy] = f.jets(jet_vars_xy(z, 1));
    JacobianData J;
    J.image = {jx.c[0], jy.c[0]};
    J.dxx = jx.at(1, 0);
    J.dxy = jx.at(0, 1);
    J.dyx = jy.at(1, 0);
    J.dyy = jy.at(0, 1);
    return J;
}

}  // namespace blenderlab
