#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "blenderlab/errors.hpp"

namespace blenderlab {

// Outward slack applied to every computed endpoint. A multiplicative bump of
// 2^-50 plus a tiny absolute floor; the floor keeps enclosures honest when a
// product underflows into the subnormal range (x-coordinates contracted by
// sigma_uu^n reach 1e-330 scales in long renormalization words).
inline constexpr double kIntervalSlack = 0x1p-50;
inline constexpr double kIntervalFloor = 1e-315;

inline double bump_down(double v) {
    return v - (std::fabs(v) * kIntervalSlack + kIntervalFloor);
}
inline double bump_up(double v) {
    return v + (std::fabs(v) * kIntervalSlack + kIntervalFloor);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(lo <= hi)) throw ShapeError("interval endpoints out of order");
    }

    static Interval point(double v) { return Interval(v, v); }
    static Interval hull(double a, double b) {
        return Interval(std::min(a, b), std::max(a, b));
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    // Largest absolute value attained.
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    // Smallest absolute value attained (0 if the interval straddles 0).
    double mig() const {
        if (lo <= 0.0 && hi >= 0.0) return 0.0;
        return std::min(std::fabs(lo), std::fabs(hi));
    }

    bool contains(double v, double tol = 0.0) const {
        return v >= lo - tol && v <= hi + tol;
    }
    bool contains(const Interval& o, double tol = 0.0) const {
        return o.lo >= lo - tol && o.hi <= hi + tol;
    }
    bool strictly_inside(const Interval& outer) const {
        return lo > outer.lo && hi < outer.hi;
    }
    bool intersects(const Interval& o) const { return o.lo <= hi && o.hi >= lo; }
    bool straddles_zero() const { return lo <= 0.0 && hi >= 0.0; }

    Interval merged(const Interval& o) const {
        return Interval(std::min(lo, o.lo), std::max(hi, o.hi));
    }
};

inline Interval outward(double lo, double hi) {
    return Interval(bump_down(lo), bump_up(hi));
}

inline Interval operator+(const Interval& a, const Interval& b) {
    return outward(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return outward(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return outward(std::min(std::min(p1, p2), std::min(p3, p4)),
                   std::max(std::max(p1, p2), std::max(p3, p4)));
}

inline Interval operator*(double s, const Interval& a) {
    return Interval::point(s) * a;
}
inline Interval operator+(double s, const Interval& a) {
    return Interval::point(s) + a;
}

inline Interval recip(const Interval& a) {
    if (a.straddles_zero())
        throw SingularIntervalError("division by interval containing 0");
    return outward(1.0 / a.hi, 1.0 / a.lo);
}
inline Interval operator/(const Interval& a, const Interval& b) {
    return a * recip(b);
}

inline Interval abs(const Interval& a) {
    if (a.straddles_zero()) return Interval(0.0, a.mag());
    return Interval(a.mig(), a.mag());
}

inline Interval sqr(const Interval& a) {
    const double m = a.mag(), s = a.mig();
    return outward(s * s, m * m);
}

// Integer power by monotonicity/sign analysis.
inline Interval pow_int(const Interval& a, int k) {
    if (k < 0) throw ShapeError("pow_int expects k >= 0");
    if (k == 0) return Interval::point(1.0);
    if (k == 1) return a;
    if (k % 2 == 0) return outward(std::pow(a.mig(), k), std::pow(a.mag(), k));
    return outward(std::pow(a.lo, k), std::pow(a.hi, k));
}

struct Box2 {
    Interval x;
    Interval y;

    Box2() = default;
    Box2(Interval ix, Interval iy) : x(ix), y(iy) {}
    static Box2 centered(double cx, double cy, double rx, double ry) {
        return Box2(Interval(cx - rx, cx + rx), Interval(cy - ry, cy + ry));
    }

    bool contains(double px, double py, double tol = 0.0) const {
        return x.contains(px, tol) && y.contains(py, tol);
    }
    bool contains(const Box2& b, double tol = 0.0) const {
        return x.contains(b.x, tol) && y.contains(b.y, tol);
    }
    bool strictly_inside(const Box2& outer) const {
        return x.strictly_inside(outer.x) && y.strictly_inside(outer.y);
    }
    bool intersects(const Box2& b) const {
        return x.intersects(b.x) && y.intersects(b.y);
    }

    std::string str() const;
};

inline std::string Box2::str() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "[%.17g,%.17g]x[%.17g,%.17g]", x.lo, x.hi, y.lo, y.hi);
    return std::string(buf);
}

// Separation between two boxes along the axis where they are farthest apart;
// positive means disjoint with that margin.
inline double disjointness_margin(const Box2& a, const Box2& b) {
    const double gx = std::max(a.x.lo - b.x.hi, b.x.lo - a.x.hi);
    const double gy = std::max(a.y.lo - b.y.hi, b.y.lo - a.y.hi);
    return std::max(gx, gy);
}

}  // namespace blenderlab
