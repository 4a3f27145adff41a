#include "blenderlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace blenderlab {

std::string to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::Sink: return "sink";
        case OrbitKind::Saddle: return "saddle";
        case OrbitKind::Source: return "source";
        case OrbitKind::ProjectivelyHyperbolicSource: return "projectively-hyperbolic-source";
        case OrbitKind::NonHyperbolic: return "non-hyperbolic";
    }
    return "?";
}

std::string to_string(ManifoldFlavor f) {
    switch (f) {
        case ManifoldFlavor::Stable: return "stable";
        case ManifoldFlavor::Unstable: return "unstable";
        case ManifoldFlavor::StrongUnstable: return "strong-unstable";
        case ManifoldFlavor::WeakUnstable: return "weak-unstable";
    }
    return "?";
}

OrbitKind classify(std::complex<double> mu1, std::complex<double> mu2, double theta,
                   double theta_gap) {
    const double m1 = std::abs(mu1), m2 = std::abs(mu2);
    const double lo = std::min(m1, m2), hi = std::max(m1, m2);
    if (hi < 1.0 - theta) return OrbitKind::Sink;
    if (lo < 1.0 - theta && hi > 1.0 + theta) return OrbitKind::Saddle;
    if (lo > 1.0 + theta) {
        const bool real = std::fabs(mu1.imag()) < theta && std::fabs(mu2.imag()) < theta;
        if (real && lo * (1.0 + theta_gap) <= hi)
            return OrbitKind::ProjectivelyHyperbolicSource;
        return OrbitKind::Source;
    }
    return OrbitKind::NonHyperbolic;
}

namespace {

// Eigenvalues of [[a, b], [c, d]].
std::pair<std::complex<double>, std::complex<double>> eigen2(double a, double b, double c,
                                                             double d) {
    const double tr = a + d, det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return {std::complex<double>(tr / 2.0 + s, 0.0), std::complex<double>(tr / 2.0 - s, 0.0)};
    }
    const double s = std::sqrt(-disc);
    return {std::complex<double>(tr / 2.0, s), std::complex<double>(tr / 2.0, -s)};
}

JacobianData iterate_jacobian(const Map2& f, Vec2 z, int period) {
    // Chain order-1 jets through the orbit.
    JetPair jz = jet_vars_xy(z, 1);
    for (int i = 0; i < period; ++i) jz = f.jets(jz);
    JacobianData J;
    J.image = {jz.first.c[0], jz.second.c[0]};
    J.dxx = jz.first.at(1, 0);
    J.dxy = jz.first.at(0, 1);
    J.dyx = jz.second.at(1, 0);
    J.dyy = jz.second.at(0, 1);
    return J;
}

}  // namespace

PeriodicOrbit find_periodic_orbit(const Map2& f, int period, Vec2 seed,
                                  const NewtonOptions& opts) {
    if (period < 1) throw ConfigError("period must be >= 1");
    Vec2 z = seed;
    double prev_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        JacobianData J = iterate_jacobian(f, z, period);
        const Vec2 F = J.image - z;
        const double res = F.norm();
        if (!std::isfinite(res))
            throw NotConvergedError("Newton residual became non-finite");
        if (res <= opts.tol) {
            converged = true;
            break;
        }
        // Solve (Df^p - I) dz = -F.
        const double a = J.dxx - 1.0, b = J.dxy, c = J.dyx, d = J.dyy - 1.0;
        const double det = a * d - b * c;
        if (std::fabs(det) < 1e-300)
            throw DegenerateJacobianError("singular Newton derivative at (" +
                                          std::to_string(z.x) + ", " + std::to_string(z.y) + ")");
        Vec2 dz{(-F.x * d + F.y * b) / det, (F.x * c - F.y * a) / det};
        // Damp when the residual failed to decrease.
        const double step = (res > prev_res) ? 0.5 : 1.0;
        z = z + dz * step;
        prev_res = res;
    }
    JacobianData J = iterate_jacobian(f, z, period);
    const double res = (J.image - z).norm();
    if (!converged && res > opts.tol)
        throw NotConvergedError("Newton did not converge within iteration cap, residual " +
                                std::to_string(res));

    PeriodicOrbit orbit;
    orbit.period = period;
    orbit.residual = res;
    orbit.points.resize(period);
    orbit.points[0] = z;
    for (int i = 1; i < period; ++i) orbit.points[i] = f.point(orbit.points[i - 1]);
    std::tie(orbit.mu1, orbit.mu2) = eigen2(J.dxx, J.dxy, J.dyx, J.dyy);
    orbit.kind = classify(orbit.mu1, orbit.mu2);
    return orbit;
}

double orbit_residual_enclosure(const Map2& f, const PeriodicOrbit& orbit) {
    const Vec2 z = orbit.points[0];
    IJetPair jz = ijet_vars_xy(Box2::centered(z.x, z.y, 0.0, 0.0), 0);
    for (int i = 0; i < orbit.period; ++i) jz = f.ijets(jz);
    const Interval dx = jz.first.c[0] - Interval::point(z.x);
    const Interval dy = jz.second.c[0] - Interval::point(z.y);
    return std::hypot(dx.mag(), dy.mag());
}

Vec2 ManifoldCurve::eval(double t) const {
    double x = 0.0, y = 0.0, tp = 1.0;
    for (int k = 0; k <= hx.order(); ++k) {
        x += hx.c[k] * tp;
        y += hy.c[k] * tp;
        tp *= t;
    }
    return {x, y};
}

ManifoldCurve local_manifold(const Map2& f, const PeriodicOrbit& orbit, ManifoldFlavor flavor,
                             int order) {
    const double im1 = std::fabs(orbit.mu1.imag()), im2 = std::fabs(orbit.mu2.imag());
    if (im1 > 1e-12 || im2 > 1e-12)
        throw UnsupportedFlavorError("local_manifold requires real multipliers");
    const double m1 = orbit.mu1.real(), m2 = orbit.mu2.real();

    double mu = 0.0, mu_other = 0.0;
    switch (flavor) {
        case ManifoldFlavor::Stable: {
            if (std::fabs(m1) < 1.0 - kClassifyTheta) mu = m1, mu_other = m2;
            else if (std::fabs(m2) < 1.0 - kClassifyTheta) mu = m2, mu_other = m1;
            else throw UnsupportedFlavorError("no contracting multiplier for stable manifold");
            break;
        }
        case ManifoldFlavor::Unstable: {
            if (std::fabs(m1) > 1.0 + kClassifyTheta) mu = m1, mu_other = m2;
            else if (std::fabs(m2) > 1.0 + kClassifyTheta) mu = m2, mu_other = m1;
            else throw UnsupportedFlavorError("no expanding multiplier for unstable manifold");
            break;
        }
        case ManifoldFlavor::StrongUnstable:
        case ManifoldFlavor::WeakUnstable: {
            if (orbit.kind != OrbitKind::ProjectivelyHyperbolicSource)
                throw UnsupportedFlavorError(
                    "strong/weak unstable manifolds require a projectively hyperbolic source");
            const bool strong = flavor == ManifoldFlavor::StrongUnstable;
            if ((std::fabs(m1) > std::fabs(m2)) == strong) mu = m1, mu_other = m2;
            else mu = m2, mu_other = m1;
            break;
        }
    }

    const Vec2 z = orbit.points[0];
    // Eigenvector of Df^p at z for eigenvalue mu.
    JetPair j1 = jet_vars_xy(z, 1);
    for (int i = 0; i < orbit.period; ++i) j1 = f.jets(j1);
    const double a = j1.first.at(1, 0), b = j1.first.at(0, 1);
    const double c = j1.second.at(1, 0), d = j1.second.at(0, 1);
    Vec2 v;
    if (std::fabs(b) > std::fabs(c)) v = {b, mu - a};
    else if (std::fabs(c) > 0.0) v = {mu - d, c};
    else v = (std::fabs(a - mu) < std::fabs(d - mu)) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    const double vn = v.norm();
    if (vn == 0.0) throw DegenerateJacobianError("zero eigenvector");
    v = v * (1.0 / vn);

    // Resonance scan: mu^k close to the other multiplier blocks the division.
    for (int k = 2; k <= order; ++k) {
        if (std::fabs(std::pow(mu, k) - mu_other) < 1e-10)
            throw ResonanceError("resonance mu^" + std::to_string(k) + " = other multiplier");
    }

    const JetLayout* L1 = JetLayout::get(1, order);
    ManifoldCurve curve;
    curve.orbit = orbit;
    curve.flavor = flavor;
    curve.mu = mu;
    curve.hx = JetD(L1);
    curve.hy = JetD(L1);
    curve.hx.c[0] = z.x;
    curve.hy.c[0] = z.y;
    if (order >= 1) {
        curve.hx.c[1] = v.x;
        curve.hy.c[1] = v.y;
    }

    // Solve (Df^p - mu^k I) c_k = -[F(h^{<k})]_k order by order. F(h) is
    // computed by evaluating f^period on 1-variable jets in t seeded with
    // the current h (exact for polynomial maps at any base point).
    for (int k = 2; k <= order; ++k) {
        JetPair img{curve.hx, curve.hy};
        for (int i = 0; i < orbit.period; ++i) img = f.jets(img);
        const double rx = img.first.c[k];
        const double ry = img.second.c[k];
        const double muk = std::pow(mu, k);
        const double aa = a - muk, dd = d - muk;
        const double det = aa * dd - b * c;
        if (std::fabs(det) < 1e-12)
            throw ResonanceError("near-singular order-" + std::to_string(k) + " solve");
        curve.hx.c[k] = (-rx * dd + ry * b) / det;
        curve.hy.c[k] = (rx * c - ry * aa) / det;
    }

    // Validity radius: largest dyadic radius with residual <= 1e-9.
    double radius = 1.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
        if (manifold_residual(f, curve, radius) <= 1e-9) break;
        radius *= 0.5;
    }
    curve.validity_radius = radius;
    return curve;
}

double manifold_residual(const Map2& f, const ManifoldCurve& curve, double radius, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = -radius + 2.0 * radius * (i + 0.5) / samples;
        Vec2 p = curve.eval(t);
        for (int j = 0; j < curve.orbit.period; ++j) p = f.point(p);
        const Vec2 q = curve.eval(curve.mu * t);
        worst = std::max(worst, (p - q).norm());
    }
    return worst;
}

ConeCertificate certify_cone(const Map2& word, const Box2& box, double eta, int samples) {
    if (eta <= 0.0 || eta > 1.0) throw ConfigError("cone aperture eta must be in (0, 1]");
    ConeCertificate cert;
    cert.box = box;
    cert.eta = eta;

    const int n = std::max(1, samples);
    double worst_ratio = 0.0;        // (|u'|/|v'|)/eta
    double worst_contraction = 0.0;  // sup ||Dw||/||w|| over cone directions
    constexpr int kDirSamples = 33;

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Box2 cell{Interval(box.x.lo + box.x.width() * i / n, box.x.lo + box.x.width() * (i + 1) / n),
                      Interval(box.y.lo + box.y.width() * j / n, box.y.lo + box.y.width() * (j + 1) / n)};
            IJetPair dj = word.ijets(ijet_vars_xy(cell, 1));
            const Interval dxx = dj.first.at(1, 0), dxy = dj.first.at(0, 1);
            const Interval dyx = dj.second.at(1, 0), dyy = dj.second.at(0, 1);

            // Cone-boundary directions (eta*s, 1), s = +-1; the direction
            // ratio is a Moebius function of s, extremal at the endpoints.
            for (int bs = 0; bs < 2; ++bs) {
                const double s = bs == 0 ? 1.0 : -1.0;
                const Interval u = dxx * Interval::point(eta * s) + dxy;
                const Interval v = dyx * Interval::point(eta * s) + dyy;
                if (v.straddles_zero()) {
                    cert.certified = false;
                    cert.witness = ConeWitness{{cell.x.mid(), cell.y.mid()}, {eta * s, 1.0},
                                               std::numeric_limits<double>::infinity()};
                    return cert;
                }
                const double ratio = abs(u).mag() / abs(v).mig();
                if (ratio >= eta) {
                    cert.certified = false;
                    cert.witness = ConeWitness{{cell.x.mid(), cell.y.mid()}, {eta * s, 1.0}, ratio};
                    cert.contraction_ratio = ratio / eta;
                    return cert;
                }
                worst_ratio = std::max(worst_ratio, ratio / eta);
            }
            // Norm contraction along sampled cone directions.
            for (int q = 0; q < kDirSamples; ++q) {
                const double s = -1.0 + 2.0 * q / (kDirSamples - 1);
                const double wx = eta * s, wy = 1.0;
                const Interval u = dxx * Interval::point(wx) + dxy * Interval::point(wy);
                const Interval v = dyx * Interval::point(wx) + dyy * Interval::point(wy);
                const double img_norm = std::hypot(abs(u).mag(), abs(v).mag());
                worst_contraction = std::max(worst_contraction, img_norm / std::hypot(wx, wy));
            }
        }
    }
    cert.certified = true;
    cert.contraction_ratio = worst_ratio;
    cert.expansion_lower_bound = worst_contraction > 0.0 ? 1.0 / worst_contraction : 0.0;
    if (cert.expansion_lower_bound <= 1.0) {
        // Cone preserved but not expanded by the forward map: report failure.
        cert.certified = false;
        cert.witness = ConeWitness{{box.x.mid(), box.y.mid()}, {0.0, 1.0}, worst_contraction};
    }
    return cert;
}

}  // namespace blenderlab
