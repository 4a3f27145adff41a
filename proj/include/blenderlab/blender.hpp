#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "blenderlab/map2.hpp"
#include "blenderlab/renorm.hpp"
#include "blenderlab/rng.hpp"

namespace blenderlab {

struct PieceInterval {
    int branch = 0;  // +1 / -1
    double lo = 0.0, hi = 0.0;
};

// 1D covering certificate for the interval IFS of the two inverse
// contractions y -> (y -+ 1)/Delta +- 1 acting on [-1, 1].
struct Covering1D {
    bool covered = false;
    double margin = 0.0;    // max(0, overlap half-width)
    double overlap = 0.0;   // signed overlap half-width (2/Delta - 1 ideally)
    double eta = 0.0;
    double delta = 0.0;
    bool robust = false;    // margin >= delta * (1 + 1/(Delta - 1))
    double robust_requirement = 0.0;
    std::optional<double> gap_witness;
    std::vector<PieceInterval> pieces;
    double target_lo = 0.0, target_hi = 0.0;
};

// Certifies that the images of [-1,1] under the two contractions cover
// [-1 + eta, 1 - eta]. The margin is the overlap half-width; endpoints are
// fixed points of the respective contractions and move with a perturbation,
// which the robust requirement delta*(1 + 1/(Delta-1)) accounts for.
Covering1D verify_blender_1d(double Delta, double delta, double eta);

// Same machinery on explicitly given pieces (used by the 2D reduction).
// end_tol absorbs bisection slack in the piece endpoints.
Covering1D cover_interval(double target_lo, double target_hi,
                          std::vector<PieceInterval> pieces, double Delta, double delta,
                          double end_tol = 0.0);

// ---------------------------------------------------------------------------

struct Covering2D {
    Covering1D y_covering;
    double delta_measured = 0.0;  // max C0 deviation of the two branches
    double lip_x = 0.0;           // sup |d/dx of the y components|
    double reduction_slack = 0.0; // delta_measured * (1 + lip_x)
    bool covered = false;
    bool robust = false;
};

// Reduces the planar covering of `activation` = [-2,2] x [y_lo, y_hi] to the
// y-axis: the piece of each branch is the inner preimage
// {y : branch_y([-2,2] x {y}) subset of target}, found by bisection with
// interval evaluation. Preconditions: both branches evaluable on [-2,2]^2
// and measured C0/C1 distance to the targets <= delta.
Covering2D verify_blender_2d(const Map2& g_plus, const Map2& g_minus,
                             const AffineTarget& target_plus, const AffineTarget& target_minus,
                             const Interval& activation_y, double delta);

// ---------------------------------------------------------------------------
// Jet-space covering for the parametrized normal forms
// A_a^+-(y) = (Delta + a) y +- (Delta - 1).

struct JetBox {
    double A = 0.0;               // order-0 half-width
    std::vector<double> B;        // half-widths for orders 1..r
    int order() const { return static_cast<int>(B.size()); }
};

struct JetCoveringCertificate {
    bool covered = false;
    double margin = 0.0;
    double order0_overlap = 0.0;       // half-width of the order-0 piece overlap
    std::vector<double> order_slack;   // B_k - (B_k + k B_{k-1})/Delta per order
    double delta = 0.0;
    bool robust = false;
    std::optional<std::vector<double>> gap_witness;  // jet (t_0, ..., t_r)
    double Delta = 1.0;
    JetBox box;
};

// The induced jet maps are lower triangular: (J y)_0 = Delta y_0 +- (Delta-1)
// and (J y)_k = Delta y_k + k y_{k-1}. A jet t is covered when one branch's
// exact inverse image of t lies in the box; the certificate checks the
// order-0 piece overlap plus the per-order worst-case inverse bounds, and on
// failure hunts a concrete uncovered witness on a grid.
JetCoveringCertificate verify_parablender_jets(double Delta, int r, double delta,
                                               const JetBox& box);

// Exact pointwise test used by the certificate's witness hunt and by test
// oracles: does some branch map t into the box under the inverse?
bool jet_point_covered_exact(double Delta, const JetBox& box, const std::vector<double>& t,
                             double tol = 0.0);

// ---------------------------------------------------------------------------
// Chaos-game sampling of IFS attractors.

struct Ifs1D {
    std::vector<std::pair<double, double>> maps;  // y -> slope*y + offset
};

// Deterministic chaos game; throws when a sampled map fails to contract.
std::vector<double> ifs_attract_1d(const Ifs1D& ifs, int iterations, int burn_in,
                                   std::uint64_t seed);

std::vector<Vec2> ifs_attract_2d(const std::vector<const Map2*>& maps, const Box2& domain,
                                 int iterations, int burn_in, std::uint64_t seed);

}  // namespace blenderlab
