#include "blenderlab/newhouse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <atomic>
#include <limits>
#include <thread>

namespace blenderlab {

MisiurewiczReport misiurewicz_check(double a, int max_iter, double tol) {
    MisiurewiczReport rep;
    rep.a = a;
    std::vector<double> orbit{0.0};
    double x = 0.0;
    for (int t = 1; t <= max_iter; ++t) {
        x = x * x + a;
        // Landing test: does x revisit an earlier orbit point?
        for (int s = 0; s < static_cast<int>(orbit.size()); ++s) {
            if (std::fabs(x - orbit[s]) <= tol) {
                const int period = t - s;
                // Refine the periodic point by 1D Newton on g^period.
                double z = orbit[s];
                for (int it = 0; it < 50; ++it) {
                    double v = z, dv = 1.0;
                    for (int k = 0; k < period; ++k) {
                        dv *= 2.0 * v;
                        v = v * v + a;
                    }
                    const double F = v - z, dF = dv - 1.0;
                    if (std::fabs(dF) < 1e-14 || !std::isfinite(F)) break;
                    const double step = F / dF;
                    z -= step;
                    if (std::fabs(step) < 1e-15) break;
                }
                double mult = 1.0, v = z;
                for (int k = 0; k < period; ++k) {
                    mult *= 2.0 * v;
                    v = v * v + a;
                }
                if (std::fabs(v - z) > 1e-9) continue;  // not actually periodic
                if (std::fabs(orbit[s] - z) > tol) continue;
                rep.landed = true;
                rep.landing_time = s;
                rep.period = period;
                rep.periodic_point = z;
                rep.multiplier = mult;
                rep.landing_distance = std::fabs(orbit[s] - z);
                rep.misiurewicz = std::fabs(mult) > 1.0;
                return rep;
            }
        }
        orbit.push_back(x);
        if (!std::isfinite(x) || std::fabs(x) > 1e6) break;  // escaped
    }
    return rep;  // inconclusive
}

// ---------------------------------------------------------------------------

namespace {

// One-sided plateau bump: exactly 1 on [c-w, c+w], exactly 0 outside
// [c-w-rad, c+w+rad], quintic smoothstep in between.
ExprPtr plateau_bump(double center, double halfwidth, double radius) {
    const double lo = center - halfwidth - radius;
    const double hi = center + halfwidth + radius;
    ExprPtr rise = Expr::smoothstep01(Expr::mul(
        Expr::constant(1.0 / radius), Expr::sub(Expr::var_x(), Expr::constant(lo))));
    ExprPtr fall = Expr::smoothstep01(Expr::mul(
        Expr::constant(1.0 / radius), Expr::sub(Expr::constant(hi), Expr::var_x())));
    return Expr::mul(rise, fall);
}

}  // namespace

ExampleFamily build_bicycle_family(double eps, double a, double seam_radius) {
    ExampleFamily fam;
    fam.a = a;
    fam.eps = eps;
    fam.seam_radius = seam_radius;

    // Designated points for the canonical instance a = -2: the critical
    // orbit lands on the fixed point 2 (multiplier 4); -1 is fixed with
    // multiplier -2. The source carries the inflated y-factor, the saddle
    // the contracted one.
    const double s = 2.0, p = -1.0;
    fam.S = {s, 0.0};
    fam.P = {p, 0.0};

    if (std::fabs(s - p) < 4.0 * seam_radius + 2.0 * fam.plateau_halfwidth)
        throw ConfigError("bump neighborhoods of the two orbits are not separated");

    ExprPtr rho = Expr::add(
        Expr::constant(1.0),
        Expr::sub(Expr::mul(Expr::constant(eps), plateau_bump(s, fam.plateau_halfwidth, seam_radius)),
                  Expr::mul(Expr::constant(eps), plateau_bump(p, fam.plateau_halfwidth, seam_radius))));
    fam.rho = rho;
    fam.map = PlanarMap(
        Expr::add(Expr::ipow_of(Expr::var_x(), 2), Expr::constant(a)),
        Expr::mul(rho, Expr::var_y()));

    // Multiplier arithmetic at the designated points.
    fam.s_mult_x = 2.0 * s;          // g'(s)
    fam.s_mult_y = 1.0 + eps;        // rho on the source plateau
    fam.p_mult_x = 2.0 * p;
    fam.p_mult_y = 1.0 - eps;

    if (!(std::fabs(fam.p_mult_y) < 1.0))
        throw ConfigError("saddle y-multiplier " + std::to_string(fam.p_mult_y) +
                          " is not contracting (eps too small?)");
    if (!(std::fabs(fam.p_mult_x) > 1.0))
        throw ConfigError("saddle x-multiplier " + std::to_string(fam.p_mult_x) +
                          " is not expanding");
    if (!(fam.s_mult_y > 1.0) || !(std::fabs(fam.s_mult_x) > fam.s_mult_y))
        throw ConfigError("source multiplier ordering fails: |g-direction| " +
                          std::to_string(std::fabs(fam.s_mult_x)) + " vs y-direction " +
                          std::to_string(fam.s_mult_y));
    return fam;
}

// ---------------------------------------------------------------------------
// Tangency detection.

namespace {

// Signed distance from a point to a polyline, sign by the side of the
// closest segment's tangent.
double signed_distance(const Vec2& q, const Polyline& curve) {
    double best = std::numeric_limits<double>::infinity();
    double sign = 1.0;
    for (size_t i = 0; i + 1 < curve.pts.size(); ++i) {
        const Vec2 a = curve.pts[i], b = curve.pts[i + 1];
        const Vec2 ab = b - a;
        const double len2 = ab.x * ab.x + ab.y * ab.y;
        if (len2 == 0.0 || len2 > 0.25) continue;  // clipping gaps are not segments
        double t = ((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / len2;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 proj = a + ab * t;
        const double d = (q - proj).norm();
        if (d < best) {
            best = d;
            const double cross = ab.x * (q.y - a.y) - ab.y * (q.x - a.x);
            sign = cross >= 0.0 ? 1.0 : -1.0;
        }
    }
    return sign * best;
}

struct Clearance {
    double value = std::numeric_limits<double>::infinity();  // min |distance|
    double signed_value = std::numeric_limits<double>::infinity();
    Vec2 at;
};

// Closest approach of curve A to curve B (unsigned, with the sign at the
// argmin kept for reporting).
Clearance min_clearance(const Polyline& A, const Polyline& B) {
    Clearance c;
    for (const Vec2& q : A.pts) {
        const double d = signed_distance(q, B);
        if (std::fabs(d) < c.value) {
            c.value = std::fabs(d);
            c.signed_value = d;
            c.at = q;
        }
    }
    return c;
}

// Number of sign alternations of the signed distance along A, restricted to
// points near B. A tangency changes this count by two, which is the robust
// event to bracket (the raw minimal signed distance is dominated by far
// folds on curves as long as these).
int crossing_count(const Polyline& A, const Polyline& B, double near = 0.25) {
    int count = 0;
    int prev_sign = 0;
    bool prev_near = false;
    for (const Vec2& q : A.pts) {
        const double d = signed_distance(q, B);
        const bool is_near = std::fabs(d) < near;
        if (is_near && prev_near) {
            const int sign = d >= 0.0 ? 1 : -1;
            if (prev_sign != 0 && sign != prev_sign) ++count;
            prev_sign = sign;
        } else if (is_near) {
            prev_sign = d >= 0.0 ? 1 : -1;
        } else {
            prev_sign = 0;
        }
        prev_near = is_near;
    }
    return count;
}

int estimate_contact_order(const Polyline& A, const Polyline& B, const Vec2& at) {
    // Separation profile |distance| along A near the closest point; a
    // quadratic tangency shows a nonzero second difference.
    size_t best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < A.pts.size(); ++i) {
        const double d = (A.pts[i] - at).norm();
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    if (best_i == 0 || best_i + 1 >= A.pts.size()) return 2;
    const double sm = std::fabs(signed_distance(A.pts[best_i - 1], B));
    const double s0 = std::fabs(signed_distance(A.pts[best_i], B));
    const double sp = std::fabs(signed_distance(A.pts[best_i + 1], B));
    const double second = sm + sp - 2.0 * s0;
    const double h = 0.5 * ((A.pts[best_i + 1] - A.pts[best_i]).norm() +
                            (A.pts[best_i] - A.pts[best_i - 1]).norm());
    if (h == 0.0) return 2;
    return (std::fabs(second) / (h * h) > 1e-3) ? 2 : 3;
}

}  // namespace

TangencyScan detect_tangency(const CurvePairProvider& curves, double a_lo, double a_hi,
                             int steps, double tol, const std::string& curves_label) {
    TangencyScan scan;
    std::vector<std::pair<double, int>> samples;
    for (int i = 0; i <= steps; ++i) {
        const double a = a_lo + (a_hi - a_lo) * i / steps;
        try {
            auto [A, B] = curves(a);
            samples.emplace_back(a, crossing_count(A, B));
        } catch (const Error&) {
            scan.skipped_parameters.push_back(a);
        }
    }
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
        double a0 = samples[i].first, a1 = samples[i + 1].first;
        int c0 = samples[i].second, c1 = samples[i + 1].second;
        if (c0 == c1) continue;
        // Bracketed crossing-count change: bisect to |da| <= 1e-8.
        bool failed = false;
        while (a1 - a0 > 1e-8) {
            const double am = 0.5 * (a0 + a1);
            int cm;
            try {
                auto [A, B] = curves(am);
                cm = crossing_count(A, B);
            } catch (const Error&) {
                failed = true;
                break;
            }
            if (cm == c0) a0 = am;
            else a1 = am;
        }
        if (failed) {
            scan.skipped_parameters.push_back(0.5 * (a0 + a1));
            continue;
        }
        const double a_star = 0.5 * (a0 + a1);
        try {
            auto [A, B] = curves(a_star);
            const Clearance c = min_clearance(A, B);
            if (c.value <= tol) {
                TangencyRecord rec;
                rec.a_star = a_star;
                rec.point = c.at;
                rec.clearance = c.value;
                rec.contact_order = estimate_contact_order(A, B, c.at);
                rec.curves = curves_label;
                scan.records.push_back(rec);
            }
        } catch (const Error&) {
            scan.skipped_parameters.push_back(a_star);
        }
    }
    return scan;
}

CurvePairProvider manifold_curve_provider(const PlanarMap& family, Vec2 seed, int period,
                                          int segments, int order, double exclusion_radius,
                                          const PlanarMap* inverse_family) {
    const PlanarMap inv = inverse_family ? *inverse_family : PlanarMap();
    const bool has_inverse = inverse_family != nullptr;
    return [=](double a) -> std::pair<Polyline, Polyline> {
        BoundMap f(family, a);
        PeriodicOrbit orbit = find_periodic_orbit(f, period, seed);
        if (orbit.kind != OrbitKind::Saddle)
            throw PreconditionError("continued orbit is not a saddle at a = " +
                                    std::to_string(a));
        ManifoldCurve wu = local_manifold(f, orbit, ManifoldFlavor::Unstable, order);
        ManifoldCurve ws = local_manifold(f, orbit, ManifoldFlavor::Stable, order);

        const Box2 window(Interval(-3, 3), Interval(-3, 3));
        const double maxlen = 0.02;
        const size_t max_pts = 60000;

        // Adaptive image of a local curve under `sweeps` map applications:
        // subdivide in the curve parameter until image segments are short.
        auto trace = [&](const ManifoldCurve& curve, const BoundMap& step, int sweeps) {
            auto image_of = [&](double t) {
                Vec2 z = curve.eval(t);
                for (int s = 0; s < sweeps * period; ++s) {
                    if (exclusion_radius > 0.0 && std::fabs(z.x) < exclusion_radius)
                        return Vec2{1e9, 1e9};
                    z = step.point(z);
                    if (!std::isfinite(z.x) || !std::isfinite(z.y) || z.norm() > 1e6)
                        return Vec2{1e9, 1e9};
                }
                return z;
            };
            Polyline out;
            const double R = curve.validity_radius;
            const int coarse = 256;
            std::function<void(double, double, Vec2, Vec2, int)> refine =
                [&](double t0, double t1, Vec2 p0, Vec2 p1, int depth) {
                    const bool visible = window.contains(p0.x, p0.y) ||
                                         window.contains(p1.x, p1.y);
                    const bool done = (p0 - p1).norm() <= maxlen ||
                                      (!visible && depth >= 6) || depth >= 14 ||
                                      out.pts.size() >= max_pts;
                    if (done) {
                        out.pts.push_back(p1);
                        return;
                    }
                    const double tm = 0.5 * (t0 + t1);
                    const Vec2 pm = image_of(tm);
                    refine(t0, tm, p0, pm, depth + 1);
                    refine(tm, t1, pm, p1, depth + 1);
                };
            Vec2 prev = image_of(-R);
            out.pts.push_back(prev);
            for (int i = 1; i <= coarse; ++i) {
                const double t0 = -R + 2.0 * R * (i - 1) / coarse;
                const double t1 = -R + 2.0 * R * i / coarse;
                const Vec2 p1 = image_of(t1);
                refine(t0, t1, prev, p1, 0);
                prev = p1;
            }
            // clip to the window; gaps are detected downstream by the
            // long-segment filter
            Polyline clipped;
            for (const Vec2& q : out.pts)
                if (window.contains(q.x, q.y)) clipped.pts.push_back(q);
            return clipped;
        };

        Polyline A = trace(wu, f, segments);
        Polyline B;
        if (has_inverse) {
            BoundMap finv(inv, a);
            B = trace(ws, finv, segments);
        } else {
            B = trace(ws, f, 0);
        }
        if (A.pts.size() < 2 || B.pts.size() < 2)
            throw PreconditionError("manifold polylines degenerate at a = " +
                                    std::to_string(a));
        return {A, B};
    };
}

// ---------------------------------------------------------------------------
// Sink census.

namespace {

bool orbit_enters_exclusion(const PeriodicOrbit& orbit, double radius) {
    if (radius <= 0.0) return false;
    for (const Vec2& z : orbit.points)
        if (std::fabs(z.x) < radius) return true;
    return false;
}

double cyclic_distance(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.period != b.period) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const int p = a.period;
    for (int shift = 0; shift < p; ++shift) {
        double worst = 0.0;
        for (int i = 0; i < p; ++i)
            worst = std::max(worst, (a.points[i] - b.points[(i + shift) % p]).norm());
        best = std::min(best, worst);
    }
    return best;
}

// Minimal period: the orbit may close earlier than the requested period.
int minimal_period(const PeriodicOrbit& orbit, double tol) {
    const int p = orbit.period;
    for (int q = 1; q < p; ++q) {
        if (p % q != 0) continue;
        bool closes = true;
        for (int i = 0; i + q < p && closes; ++i)
            closes = (orbit.points[i] - orbit.points[(i + q) % p]).norm() <= tol;
        if (closes) return q;
    }
    return p;
}

bool probe_basin(const BoundMap& f, const PeriodicOrbit& orbit, const CensusOptions& opts,
                 std::uint64_t seed) {
    Lcg rng(seed);
    for (int s = 0; s < opts.probe_starts; ++s) {
        const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        Vec2 z = orbit.points[0] + Vec2{std::cos(ang), std::sin(ang)} * opts.probe_radius;
        bool captured = false;
        for (int it = 0; it < opts.probe_iterations; ++it) {
            z = f.point(z);
            if (!std::isfinite(z.x) || !std::isfinite(z.y)) return false;
            double dist = std::numeric_limits<double>::infinity();
            for (const Vec2& q : orbit.points) dist = std::min(dist, (z - q).norm());
            if (dist <= opts.probe_capture_tol) {
                captured = true;
                break;
            }
        }
        if (!captured) return false;
    }
    return true;
}

std::vector<SinkRecord> census_at(const PlanarMap& family, double a, int a_index,
                                  const CensusOptions& opts) {
    BoundMap f(family, a);
    std::vector<PeriodicOrbit> found;
    for (int period = 1; period <= opts.max_period; ++period) {
        for (int i = 0; i < opts.seed_grid; ++i) {
            for (int j = 0; j < opts.seed_grid; ++j) {
                const Vec2 seed{
                    opts.seed_box.x.lo + opts.seed_box.x.width() * (i + 0.5) / opts.seed_grid,
                    opts.seed_box.y.lo + opts.seed_box.y.width() * (j + 0.5) / opts.seed_grid};
                PeriodicOrbit orbit;
                try {
                    orbit = find_periodic_orbit(f, period, seed);
                } catch (const Error&) {
                    continue;
                }
                if (minimal_period(orbit, opts.dedup_tol) != period) continue;
                if (orbit_enters_exclusion(orbit, opts.exclusion_radius)) continue;
                if (orbit.kind != OrbitKind::Sink) continue;
                bool dup = false;
                for (const PeriodicOrbit& o : found)
                    if (cyclic_distance(o, orbit) < opts.dedup_tol) {
                        dup = true;
                        break;
                    }
                if (dup) continue;
                found.push_back(orbit);
            }
        }
    }
    std::vector<SinkRecord> records;
    for (const PeriodicOrbit& orbit : found) {
        const std::uint64_t seed =
            mix_seed(opts.seed, mix_seed(static_cast<std::uint64_t>(a_index),
                                         mix_seed(static_cast<std::uint64_t>(orbit.period),
                                                  static_cast<std::uint64_t>(
                                                      std::llround(orbit.points[0].x * 1e9)))));
        if (!probe_basin(f, orbit, opts, seed)) continue;
        SinkRecord rec;
        rec.a = a;
        rec.period = orbit.period;
        rec.point = orbit.points[0];
        rec.mu1 = orbit.mu1;
        rec.mu2 = orbit.mu2;
        rec.basin_radius = opts.probe_radius;
        records.push_back(rec);
    }
    std::sort(records.begin(), records.end(), [](const SinkRecord& a, const SinkRecord& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.point.x != b.point.x) return a.point.x < b.point.x;
        return a.point.y < b.point.y;
    });
    return records;
}

}  // namespace

bool sink_record_passes_probe(const PlanarMap& family, const SinkRecord& rec,
                              const CensusOptions& opts) {
    BoundMap f(family, rec.a);
    PeriodicOrbit orbit = find_periodic_orbit(f, rec.period, rec.point);
    return probe_basin(f, orbit, opts, mix_seed(opts.seed, 17));
}

CensusResult sink_census(const PlanarMap& family, const std::vector<double>& a_grid,
                         const CensusOptions& opts) {
    std::vector<std::vector<SinkRecord>> slots(a_grid.size());
    const int workers = std::max(1, opts.workers);
    std::atomic<size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= a_grid.size()) break;
            slots[i] = census_at(family, a_grid[i], static_cast<int>(i), opts);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    CensusResult out;
    for (size_t i = 0; i < a_grid.size(); ++i) {
        out.coexistence.emplace_back(a_grid[i], static_cast<int>(slots[i].size()));
        for (const SinkRecord& r : slots[i]) out.records.push_back(r);
    }
    return out;
}

std::string census_csv(const CensusResult& result) {
    std::string out = "a,period,x,y,mu1_re,mu1_im,mu2_re,mu2_im,basin_radius\n";
    char buf[320];
    for (const SinkRecord& r : result.records) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.a, r.period,
                      r.point.x, r.point.y, r.mu1.real(), r.mu1.imag(), r.mu2.real(),
                      r.mu2.imag(), r.basin_radius);
        out += buf;
    }
    return out;
}

}  // namespace blenderlab
