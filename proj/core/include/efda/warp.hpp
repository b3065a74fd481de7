#pragma once

#include <stdexcept>
#include <vector>

#include "efda/grid.hpp"

namespace efda {

// Raised when a sphere operation hits a genuinely undefined configuration,
// e.g. the log map at antipodal points.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Boundary-preserving diffeomorphism of [0, 1], sampled on a uniform grid.
// Construction pins gamma(0) = 0 and gamma(1) = 1 exactly (inputs may be off
// by at most 1e-10) and requires strictly increasing samples.
struct Warp {
    Grid grid;
    std::vector<double> values;

    Warp() = default;
    Warp(Grid g, std::vector<double> v);
};

Warp identity_warp(const Grid& g);

// Square-root density of a warp: psi = sqrt(max(gamma', 0)), renormalized to
// unit trapezoid norm. Points of the unit Hilbert sphere; values may go
// negative for general sphere elements (geodesic extrapolations), only the
// norm is enforced.
struct Psi {
    Grid grid;
    std::vector<double> values;

    Psi() = default;
    Psi(Grid g, std::vector<double> v);
};

// Tangent vector at some psi; orthogonality to the base point is the
// caller's responsibility (the log map guarantees it by construction).
struct ShootingVector {
    Grid grid;
    std::vector<double> values;
};

Psi to_psi(const Warp& g);
Warp from_psi(const Psi& p);

// Great-circle distance on the unit sphere, arccos of the trapezoid inner
// product. Exactly symmetric.
double sphere_distance(const Psi& a, const Psi& b);

// Phase distance between warps: sphere distance of their square-root
// densities.
double phase_distance(const Warp& g1, const Warp& g2);

// Inverse map of the sphere exponential at mu. Returns the zero vector when
// p coincides with mu (angle < 1e-10); throws GeometryError within 1e-8 of
// the antipode, where the map is undefined.
ShootingVector sphere_log(const Psi& mu, const Psi& p);

// Geodesic starting at mu with initial velocity v; arc length equals the
// trapezoid norm of v. The result is renormalized to the sphere.
Psi sphere_exp(const Psi& mu, const ShootingVector& v);

struct KarcherOptions {
    double step = 0.3;
    double tol = 1e-6;
    int max_iter = 200;
};

struct KarcherMean {
    Warp mean;
    Psi mu_psi;
    std::vector<ShootingVector> shooting; // at mu_psi, one per input warp
    std::vector<double> cost_trace;       // sum of squared distances, non-increasing
    int iterations = 0;
    bool converged = false;
};

// Intrinsic mean of warps on the sphere by gradient descent on the Frechet
// functional. Stops when the mean shooting vector norm falls below tol, when
// a step would increase the cost (plateau), or after max_iter rounds; the
// last iterate is always returned.
KarcherMean karcher_mean_warps(const std::vector<Warp>& warps,
                               const KarcherOptions& opts = {});

// gamma^{-1} by exchanging axes and re-interpolating onto the uniform grid.
Warp invert_warp(const Warp& g);

// (g1 o g2)(t) = g1(g2(t)).
Warp compose_warps(const Warp& g1, const Warp& g2);

} // namespace efda
