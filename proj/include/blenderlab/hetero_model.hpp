#pragma once

#include <optional>
#include <string>

#include "blenderlab/branch.hpp"
#include "blenderlab/dynamics.hpp"

namespace blenderlab {

// Polynomial transition data: monomial tables for both coordinates, in chart
// coordinates centered at the transition's anchor point. Constant terms are
// stored separately (the unfolding moves them without touching derivatives).
struct TransitionSpec {
    MonomialTable X;  // non-constant part of the first coordinate
    MonomialTable Y;  // non-constant part of the second coordinate
    double const_x = 0.0;
    double const_y = 0.0;
};

struct HeteroModelConfig {
    // Inverse-branch contraction/expansion data. The saddle inverse branch is
    // (x, y) -> (sigma x, lambda y) with 0 < sigma < 1 < |lambda| (lambda may
    // be negative); the source inverse branch is (x, y) -> (sigma_uu x,
    // sigma_u y) with 0 < sigma_uu < sigma_u < 1.
    double sigma = 0.25;
    double lambda = 3.0;
    double sigma_u = 0.5;
    double sigma_uu = 0.2;

    // Transition constants: S' = T_S(0) = (s_x, s_y), Q' = T_Q(0) = (q_x, q_y),
    // and the y-coordinate h of the heteroclinic point H = (0, h).
    double s_x = 1.0;
    double s_y = 0.0;
    double q_x = 0.5;
    double q_y = 0.0;
    double h = 0.5;

    TransitionSpec T_S;                  // source chart -> saddle chart
    std::optional<TransitionSpec> T_Q;   // saddle chart -> source chart (strong cycle)
    std::optional<TransitionSpec> T_H;   // V_H -> source chart, coords centered at H

    // Optional box overrides (defaults derived from the eigenvalues).
    std::optional<Box2> V_S, V_Sp, V_Spp, V_Q, V_Qp, V_Qpp, V_H;
};

struct TransversalityFlags {
    bool t1 = true;  // T_H image of the vertical is transverse to W^uu_loc(S)
    bool t2 = true;  // W^u(P) through S is transverse to E^cu(S)
    bool t3 = true;  // strong cycle: W^uu(S) through Q is transverse to W^s_loc(Q)
};

// Branch indices within the model's BranchSystem.
struct BranchIds {
    int S = -1;    // source inverse branch
    int Q = -1;    // saddle inverse branch (named P in plain heterocycle contexts)
    int TS = -1;
    int TQ = -1;   // present iff strong
    int TH = -1;   // present iff T_H configured
};

struct HeteroModel {
    HeteroModelConfig config;
    Box2 V_S, V_Sp, V_Spp;       // source chart boxes
    Box2 V_Q, V_Qp, V_Qpp;       // saddle chart boxes
    Box2 V_H;                    // transition box around H
    BranchSystem system;
    BranchIds ids;
    TransversalityFlags flags;
    bool strong = false;
    double dyYS = 0.0;  // d/dy of T_S second coordinate at 0
    // Which half-plane the heteroclinic point sits in (h stored signed; the
    // conjugation (x, y) -> (x, -y) that normalizes h > 0 is left to callers).
    bool upper_half_case = true;

    const Branch& branch(int id) const { return system.branches[id]; }
};

// Validates a configuration and assembles the branch atlas. Throws
// ConfigError on violated invariants (eigenvalue ordering, the
// normalization d/dy of T_Q's second coordinate at 0 equal to 1 for strong
// models, resonant eigenvalue ratios).
HeteroModel build_model(const HeteroModelConfig& config);

// Moves only the constant terms of T_S / T_Q second coordinates; all
// derivatives of all branches are unchanged.
HeteroModel unfold(const HeteroModel& model, double s_y, double q_y);

// Resonance proxy: true when log(sigma_u)/log|lambda| is within tol of a
// rational p/q with 1 <= q <= max_den.
bool eigenvalue_ratio_resonant(double sigma_u, double lambda_abs, int max_den = 64,
                               double tol = 1e-9);

// ---------------------------------------------------------------------------
// Expanding Cantor pair (two contraction words with disjoint images).

struct CantorPair {
    BranchWord word1;  // S^N o T_H o Q^n o T~_S
    BranchWord word2;  // S^N
    Box2 W;            // common domain around the source
    Box2 image1, image2;
    double disjointness_margin = 0.0;
    double shifted_s_y = 0.0;  // the T_S unfolding used (lambda^-n h)
    HeteroModel model;         // model with the shifted T_S baked in
};

// Builds the contraction pair on a neighborhood W of S. The T_S constant is
// shifted to lambda^-n h so the saddle-chart excursion lands in V_H. Fails
// with ConfigError when the images are not disjoint or escape W.
CantorPair build_cantor_pair(const HeteroModel& model, int n, int N,
                             double W_halfwidth_x = 0.25);

// ---------------------------------------------------------------------------
// Horseshoe crossing report.

struct HorseshoeReport {
    double threshold = 0.0;         // eps * sigma_u^n * |lambda|^N
    Box2 B;                         // [-1,1] x [(h-eps)/lambda^N, (h+eps)/lambda^N]
    Box2 image;                     // interval image G2(B)
    double margin_x = 0.0;          // clearance of image from the vertical boundary
    double margin_y = 0.0;          // overshoot of image past B's horizontal edges
    PeriodicOrbit saddle;           // Newton-refined fixed point of G2
    double vertical_multiplier = 0.0;
    double expected_vertical = 0.0;  // lambda^N sigma_u^n dyYS dyYH
    BranchWord word;                // G2 = T_S o S^n o T_H o Q^N
};

// Verifies the Markov crossing of G2 := T_S o S^n o T_H o Q^N over the box B
// and Newton-refines its saddle fixed point. Threshold "much greater than 1"
// is concretized as >= 10.
HorseshoeReport build_horseshoe(const HeteroModel& model, int n, int N, double eps,
                                double threshold_min = 10.0);

}  // namespace blenderlab
