#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "blenderlab/branch.hpp"
#include "blenderlab/map2.hpp"

namespace blenderlab {

enum class OrbitKind { Sink, Saddle, Source, ProjectivelyHyperbolicSource, NonHyperbolic };

std::string to_string(OrbitKind k);

// Classification thresholds: theta separates moduli from 1, theta_gap is the
// multiplicative gap required between the moduli of a projectively
// hyperbolic source.
inline constexpr double kClassifyTheta = 1e-9;
inline constexpr double kClassifyThetaGap = 1e-6;

OrbitKind classify(std::complex<double> mu1, std::complex<double> mu2,
                   double theta = kClassifyTheta, double theta_gap = kClassifyThetaGap);

struct PeriodicOrbit {
    std::vector<Vec2> points;  // points[i+1] = f(points[i]), cyclically
    int period = 1;
    std::complex<double> mu1, mu2;  // eigenvalues of D f^period at points[0]
    OrbitKind kind = OrbitKind::NonHyperbolic;
    double residual = 0.0;  // ||f^period(z) - z|| at convergence
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
};

// Newton solve for a fixed point of f^period from `seed`; multipliers from
// the order-1 jet of the composed map. Throws NotConvergedError /
// DegenerateJacobianError.
PeriodicOrbit find_periodic_orbit(const Map2& f, int period, Vec2 seed,
                                  const NewtonOptions& opts = {});

// Interval re-check of the orbit equation, used by tests and the census:
// returns an enclosure radius of ||f^period(z) - z||.
double orbit_residual_enclosure(const Map2& f, const PeriodicOrbit& orbit);

enum class ManifoldFlavor { Stable, Unstable, StrongUnstable, WeakUnstable };

std::string to_string(ManifoldFlavor f);

struct ManifoldCurve {
    PeriodicOrbit orbit;
    ManifoldFlavor flavor = ManifoldFlavor::Stable;
    double mu = 0.0;            // the multiplier the curve is attached to
    JetD hx, hy;                // 1-variable Taylor parameterization h(t)
    double validity_radius = 0.0;

    Vec2 eval(double t) const;
};

// Taylor parameterization h solving f^period(h(t)) = h(mu t) with
// h(0) = orbit point and h'(0) an eigenvector. Resonance mu^k = mu_other
// (within 1e-10) raises ResonanceError; complex multipliers are unsupported.
ManifoldCurve local_manifold(const Map2& f, const PeriodicOrbit& orbit,
                             ManifoldFlavor flavor, int order = 10);

// Residual sup of the invariance equation over `samples` points of
// [-radius, radius]; the curve's validity_radius is the largest dyadic
// radius where this is <= 1e-9.
double manifold_residual(const Map2& f, const ManifoldCurve& curve, double radius,
                         int samples = 100);

// ---------------------------------------------------------------------------
// Cone-field certificates.

struct ConeWitness {
    Vec2 point;
    Vec2 direction;
    double achieved_ratio;  // |u'|/|v'| at the witness, > eta
};

struct ConeCertificate {
    bool certified = false;
    Box2 box;
    double eta = 0.0;
    // Worst directional cone ratio (|u'|/|v'|)/(|u|/|v|) over the sampled
    // grid, inflated by the interval enclosure of the derivative per cell.
    double contraction_ratio = 0.0;
    // Expansion of the forward (inverse-branch-inverted) map on cone
    // vectors: 1 / sup ||Dw||/||w||.
    double expansion_lower_bound = 0.0;
    std::optional<ConeWitness> witness;
};

// Checks that the derivative of `word` maps the closed cone {|u| <= eta|v|}
// strictly into itself over `box`, on a samples x samples cell grid with
// interval-enclosed derivative entries per cell.
ConeCertificate certify_cone(const Map2& word, const Box2& box, double eta, int samples = 16);

}  // namespace blenderlab
