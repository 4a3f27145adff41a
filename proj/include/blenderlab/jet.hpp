#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "blenderlab/errors.hpp"
#include "blenderlab/interval.hpp"

namespace blenderlab {

// Dense truncated Taylor coefficients in up to 3 variables (x, y, a),
// graded-lexicographic layout. Coefficients are Taylor coefficients
// (derivative / alpha!), not raw derivatives.
struct JetLayout {
    int nv = 1;
    int order = 0;
    std::vector<std::array<int, 3>> exps;  // per-index exponents
    std::vector<int> degree;               // total degree per index
    std::unordered_map<int, int> lookup;   // packed exps -> index

    static int pack(int i, int j, int k) { return i + (j << 6) + (k << 12); }

    int index(int i, int j, int k) const {
        auto it = lookup.find(pack(i, j, k));
        return it == lookup.end() ? -1 : it->second;
    }

    int size() const { return static_cast<int>(exps.size()); }

    // Shared, cached layouts; Jet instances hold a stable pointer.
    static const JetLayout* get(int nv, int order);
};

inline const JetLayout* JetLayout::get(int nv, int order) {
    if (nv < 1 || nv > 3) throw ShapeError("jet num_vars must be in {1,2,3}");
    if (order < 0) throw ShapeError("jet order must be >= 0");
    static std::mutex mu;
    static std::map<std::pair<int, int>, JetLayout*> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(nv, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto* L = new JetLayout;
    L->nv = nv;
    L->order = order;
    for (int d = 0; d <= order; ++d) {
        if (nv == 1) {
            L->exps.push_back({d, 0, 0});
        } else if (nv == 2) {
            for (int i = d; i >= 0; --i) L->exps.push_back({i, d - i, 0});
        } else {
            for (int i = d; i >= 0; --i)
                for (int j = d - i; j >= 0; --j) L->exps.push_back({i, j, d - i - j});
        }
    }
    L->degree.resize(L->exps.size());
    for (size_t n = 0; n < L->exps.size(); ++n) {
        const auto& e = L->exps[n];
        L->degree[n] = e[0] + e[1] + e[2];
        L->lookup[pack(e[0], e[1], e[2])] = static_cast<int>(n);
    }
    cache[key] = L;
    return L;
}

namespace detail {
template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static double from(double v) { return v; }
    static bool is_zero(double v) { return v == 0.0; }
};
template <>
struct ScalarOps<Interval> {
    static Interval from(double v) { return Interval::point(v); }
    static bool is_zero(const Interval& v) { return v.lo == 0.0 && v.hi == 0.0; }
};
}  // namespace detail

template <class T>
struct Jet {
    const JetLayout* L = nullptr;
    std::array<double, 3> base{0.0, 0.0, 0.0};
    std::vector<T> c;

    Jet() = default;
    explicit Jet(const JetLayout* layout) : L(layout), c(layout->size(), detail::ScalarOps<T>::from(0.0)) {}

    static Jet constant(const JetLayout* L, const T& v) {
        Jet j(L);
        j.c[0] = v;
        return j;
    }
    static Jet constant(int nv, int order, const T& v) {
        return constant(JetLayout::get(nv, order), v);
    }
    // Jet of the coordinate variable `var` (0=x,1=y,2=a) around base value b:
    // constant term b, linear coefficient 1.
    static Jet variable(const JetLayout* L, int var, const T& b) {
        if (var >= L->nv) throw ShapeError("variable index exceeds jet num_vars");
        Jet j(L);
        j.c[0] = b;
        if (L->order >= 1) {
            int e[3] = {0, 0, 0};
            e[var] = 1;
            j.c[L->index(e[0], e[1], e[2])] = detail::ScalarOps<T>::from(1.0);
        }
        return j;
    }

    int nv() const { return L->nv; }
    int order() const { return L->order; }
    int size() const { return L->size(); }

    const T& at(int i, int j = 0, int k = 0) const {
        int idx = L->index(i, j, k);
        if (idx < 0) throw ShapeError("multi-index exceeds jet order");
        return c[idx];
    }
    T& at(int i, int j = 0, int k = 0) {
        int idx = L->index(i, j, k);
        if (idx < 0) throw ShapeError("multi-index exceeds jet order");
        return c[idx];
    }

    void check_same_shape(const Jet& o) const {
        if (L != o.L) throw ShapeError("jet operands have mismatched shape");
    }
};

using JetD = Jet<double>;
using JetI = Jet<Interval>;

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
    a.check_same_shape(b);
    Jet<T> r = a;
    for (int i = 0; i < r.size(); ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
    a.check_same_shape(b);
    Jet<T> r = a;
    for (int i = 0; i < r.size(); ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}
template <class T>
Jet<T> operator-(const Jet<T>& a) {
    Jet<T> r = a;
    for (int i = 0; i < r.size(); ++i) r.c[i] = -a.c[i];
    return r;
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const T& s) {
    Jet<T> r = a;
    for (int i = 0; i < r.size(); ++i) r.c[i] = a.c[i] * s;
    return r;
}
template <class T>
Jet<T> operator*(const T& s, const Jet<T>& a) {
    return a * s;
}
inline JetI operator*(const JetI& a, double s) { return a * Interval::point(s); }
template <class T>
Jet<T> operator+(const Jet<T>& a, const T& s) {
    Jet<T> r = a;
    r.c[0] = r.c[0] + s;
    return r;
}

// Truncated product: terms of total degree > order are discarded.
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    a.check_same_shape(b);
    const JetLayout* L = a.L;
    Jet<T> r(L);
    r.base = a.base;
    const int n = L->size();
    for (int ia = 0; ia < n; ++ia) {
        if (detail::ScalarOps<T>::is_zero(a.c[ia])) continue;
        const int da = L->degree[ia];
        const auto& ea = L->exps[ia];
        for (int ib = 0; ib < n; ++ib) {
            if (da + L->degree[ib] > L->order) break;  // degrees are sorted
            const auto& eb = L->exps[ib];
            const int iout = L->index(ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]);
            r.c[iout] = r.c[iout] + a.c[ia] * b.c[ib];
        }
    }
    return r;
}

template <class T>
Jet<T> pow_int(const Jet<T>& a, int k) {
    if (k < 0) throw ShapeError("jet pow_int expects k >= 0");
    Jet<T> r = Jet<T>::constant(a.L, detail::ScalarOps<T>::from(1.0));
    r.base = a.base;
    Jet<T> p = a;
    while (k > 0) {
        if (k & 1) r = r * p;
        k >>= 1;
        if (k) p = p * p;
    }
    return r;
}

// Reciprocal 1/a as a truncated series; the constant term must be invertible.
template <class T>
Jet<T> recip(const Jet<T>& a);

inline JetD recip(const JetD& a) {
    if (a.c[0] == 0.0) throw SingularIntervalError("jet reciprocal of zero constant term");
    JetD r = JetD::constant(a.L, 1.0 / a.c[0]);
    r.base = a.base;
    // Newton iteration on series: r <- r*(2 - a*r), quadratic convergence.
    int needed = 0;
    for (int o = a.L->order; o > 0; o = o / 2) ++needed;
    for (int it = 0; it <= needed; ++it) {
        JetD ar = a * r;
        JetD two_minus = -ar;
        two_minus.c[0] += 2.0;
        r = r * two_minus;
    }
    return r;
}

inline JetI recip(const JetI& a) {
    if (a.c[0].straddles_zero())
        throw SingularIntervalError("jet reciprocal: constant interval contains 0");
    JetI r = JetI::constant(a.L, recip(a.c[0]));
    r.base = a.base;
    int needed = 0;
    for (int o = a.L->order; o > 0; o = o / 2) ++needed;
    for (int it = 0; it <= needed; ++it) {
        JetI ar = a * r;
        JetI two_minus = -ar;
        two_minus.c[0] = Interval::point(2.0) - ar.c[0];
        for (int i = 1; i < r.size(); ++i) two_minus.c[i] = -ar.c[i];
        r = r * two_minus;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Composition utilities.

// Substitute the (shifted) inner jets into a polynomial with coefficients
// `outer` laid out on a 2-variable jet around base (bx, by). Exact through
// the common truncation order when the inner constant terms equal the base.
template <class T>
Jet<T> compose_poly2(const JetLayout* outerL, const std::vector<T>& outer_coeffs,
                     double bx, double by, const Jet<T>& inner_x, const Jet<T>& inner_y) {
    inner_x.check_same_shape(inner_y);
    const JetLayout* L = inner_x.L;
    Jet<T> u = inner_x;
    u.c[0] = u.c[0] - detail::ScalarOps<T>::from(bx);
    Jet<T> v = inner_y;
    v.c[0] = v.c[0] - detail::ScalarOps<T>::from(by);
    const int r = outerL->order;
    std::vector<Jet<T>> upow(r + 1, Jet<T>::constant(L, detail::ScalarOps<T>::from(1.0)));
    std::vector<Jet<T>> vpow(r + 1, Jet<T>::constant(L, detail::ScalarOps<T>::from(1.0)));
    for (int i = 1; i <= r; ++i) {
        upow[i] = upow[i - 1] * u;
        vpow[i] = vpow[i - 1] * v;
    }
    Jet<T> out(L);
    out.base = inner_x.base;
    for (int idx = 0; idx < outerL->size(); ++idx) {
        if (detail::ScalarOps<T>::is_zero(outer_coeffs[idx])) continue;
        const auto& e = outerL->exps[idx];
        out = out + (upow[e[0]] * vpow[e[1]]) * outer_coeffs[idx];
    }
    return out;
}

// 1-variable composition f(g(t)) where g has zero constant term.
inline JetD compose1(const JetD& f, const JetD& g) {
    if (f.L->nv != 1 || g.L->nv != 1 || f.L != g.L)
        throw ShapeError("compose1 expects matching 1-variable jets");
    if (g.c[0] != 0.0) throw ShapeError("compose1 expects inner constant term 0");
    const int r = f.order();
    JetD out = JetD::constant(f.L, f.c[0]);
    JetD gp = JetD::constant(f.L, 1.0);
    for (int k = 1; k <= r; ++k) {
        gp = gp * g;
        out = out + gp * f.c[k];
    }
    return out;
}

// Inverse series of f (f(0)=0, f'(0) != 0): returns g with f(g(t)) = t + O(t^{r+1}).
inline JetD inverse_series1(const JetD& f) {
    if (f.L->nv != 1) throw ShapeError("inverse_series1 expects a 1-variable jet");
    if (f.c[0] != 0.0) throw ShapeError("inverse_series1 expects f(0) = 0");
    if (f.c.size() < 2 || f.c[1] == 0.0)
        throw DegenerateJacobianError("inverse_series1: vanishing first derivative");
    const int r = f.order();
    JetD g(f.L);
    g.c[1] = 1.0 / f.c[1];
    for (int k = 2; k <= r; ++k) {
        JetD e = compose1(f, g);  // currently equals t + err_k t^k + ...
        g.c[k] -= e.c[k] / f.c[1];
    }
    return g;
}

// Derivative of a 1-variable jet (order drops by one; kept on same layout,
// top coefficient zeroed).
inline JetD derive1(const JetD& f) {
    JetD out(f.L);
    out.base = f.base;
    for (int k = 1; k <= f.order(); ++k) out.c[k - 1] = f.c[k] * double(k);
    return out;
}

inline double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

}  // namespace blenderlab
