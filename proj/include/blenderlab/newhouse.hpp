#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blenderlab/dynamics.hpp"
#include "blenderlab/rng.hpp"

namespace blenderlab {

// ---------------------------------------------------------------------------
// Misiurewicz check for the quadratic family g(x) = x^2 + a.

struct MisiurewiczReport {
    double a = 0.0;
    bool landed = false;          // critical orbit reached a periodic point
    bool misiurewicz = false;     // ... and that point is repelling
    int landing_time = 0;
    int period = 0;
    double periodic_point = 0.0;
    double multiplier = 0.0;      // (g^period)' at the landing point
    double landing_distance = 0.0;
};

MisiurewiczReport misiurewicz_check(double a, int max_iter, double tol = 1e-9);

// ---------------------------------------------------------------------------
// The planar example family f(x, y) = (x^2 + a, rho(x) y) with rho equal to
// 1 + eps near the source orbit, 1 - eps near the saddle orbit, glued by
// quintic smoothsteps.

struct ExampleFamily {
    double a = -2.0;
    double eps = 0.1;
    double seam_radius = 0.05;
    double plateau_halfwidth = 0.05;
    PlanarMap map;       // parameter baked into the expressions
    ExprPtr rho;
    Vec2 P;              // designated saddle (p, 0)
    Vec2 S;              // designated source (s, 0)
    double p_mult_x = 0.0, p_mult_y = 0.0;
    double s_mult_x = 0.0, s_mult_y = 0.0;
    // Orbits entering |x| < exclusion_radius are refused by the census and
    // tangency machinery (stands in for the local-diffeomorphism repair at
    // the critical point).
    double exclusion_radius = 0.05;
};

// Builds the family at the canonical parameter a = -2 with S = (2, 0) and
// P = (-1, 0). Verifies that S is a projectively hyperbolic source and P a
// saddle with contracting y-multiplier; throws ConfigError with the two
// moduli otherwise.
ExampleFamily build_bicycle_family(double eps, double a = -2.0, double seam_radius = 0.05);

// ---------------------------------------------------------------------------
// Homoclinic tangency detection.

struct Polyline {
    std::vector<Vec2> pts;
};

// Produces, for a parameter value, the pair (moving curve, reference curve);
// the clearance is measured from the first to the second.
using CurvePairProvider = std::function<std::pair<Polyline, Polyline>(double a)>;

struct TangencyRecord {
    double a_star = 0.0;
    Vec2 point;                 // closest-approach point at a_star
    int contact_order = 2;
    double clearance = 0.0;     // |signed clearance| at a_star
    std::string curves = "";    // which manifold flavors were involved
};

struct TangencyScan {
    std::vector<TangencyRecord> records;
    std::vector<double> skipped_parameters;  // manifold failures, logged
};

// Sweeps a in [a_lo, a_hi] on `steps` points, tracks the crossing structure
// of the curve pair (sign alternations of the clearance along the moving
// curve), and bisects every change to |da| <= 1e-8; records close approaches
// within tol. `curves_label` annotates the records.
TangencyScan detect_tangency(const CurvePairProvider& curves, double a_lo, double a_hi,
                             int steps, double tol = 1e-6,
                             const std::string& curves_label = "");

// Map-based provider: W^u(saddle) against W^s(saddle) for a planar family,
// globalized by word-limited iteration (at most `segments` sweeps). W^s is
// grown with the inverse family when one is supplied, else kept local.
CurvePairProvider manifold_curve_provider(const PlanarMap& family, Vec2 seed, int period,
                                          int segments, int order = 10,
                                          double exclusion_radius = 0.0,
                                          const PlanarMap* inverse_family = nullptr);

// ---------------------------------------------------------------------------
// Sink census.

struct SinkRecord {
    double a = 0.0;
    int period = 1;
    Vec2 point;
    std::complex<double> mu1, mu2;
    double basin_radius = 0.0;  // probe radius at which all random starts converged
};

struct CensusOptions {
    int max_period = 2;
    int seed_grid = 5;                 // seed_grid^2 Newton seeds
    Box2 seed_box{Interval(-2, 2), Interval(-2, 2)};
    double dedup_tol = 1e-6;
    double probe_radius = 1e-3;
    int probe_starts = 10;
    int probe_iterations = 1000;
    double probe_capture_tol = 1e-6;
    double exclusion_radius = 0.0;     // refuse orbits entering |x| < radius
    std::uint64_t seed = 1234567;
    int workers = 1;
};

struct CensusResult {
    std::vector<SinkRecord> records;             // sorted by (a index, period, point)
    std::vector<std::pair<double, int>> coexistence;  // per-parameter sink counts
};

CensusResult sink_census(const PlanarMap& family, const std::vector<double>& a_grid,
                         const CensusOptions& opts);

// CSV with header a,period,x,y,mu1_re,mu1_im,mu2_re,mu2_im,basin_radius.
std::string census_csv(const CensusResult& result);

// Re-runs a record's own basin probe (used by validation tests).
bool sink_record_passes_probe(const PlanarMap& family, const SinkRecord& rec,
                              const CensusOptions& opts);

}  // namespace blenderlab
