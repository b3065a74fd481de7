#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "efda/srsf.hpp"
#include "efda/warp.hpp"

namespace efda {

// Trapezoid-rule weights of a grid: h/2 at both endpoints, h inside, so that
// a^T diag(w) b equals trapz(a*b). Function-space PCA runs under this inner
// product, which keeps spectra grid-independent.
Eigen::VectorXd quadrature_weights(const Grid& g);

// PCA core shared by the three bases below. The covariance is built from
// outer products about the declared center under the inner product
// <a,b> = a^T diag(weights) b (unit weights when none are given) and
// diagonalized symmetrically. Directions are orthonormal in that inner
// product and carry a deterministic sign (largest-magnitude entry positive);
// coefficients are the weighted projections, so x_i = mean + directions *
// coefficients.row(i) holds exactly at full rank. energy_fraction is
// relative to the full covariance trace.
struct PcaBasis {
    Eigen::VectorXd mean;
    Eigen::MatrixXd directions;      // dim x p, orthonormal under the weights
    Eigen::VectorXd singular_values; // p, non-increasing, clamped at 0
    Eigen::VectorXd energy_fraction; // p
    Eigen::MatrixXd coefficients;    // n x p, rows are <x_i - mean, U_j>
    double total_energy = 0.0;       // trace of the sample covariance
};

// rows: one sample per row. Centered at the sample mean unless a center is
// supplied; supplying one leaves the covariance uncentered about it, which
// is what shooting vectors need.
PcaBasis fit_pca(const Eigen::MatrixXd& rows, int p,
                 const Eigen::VectorXd& weights = Eigen::VectorXd());
PcaBasis fit_pca_about(const Eigen::MatrixXd& rows, const Eigen::VectorXd& center, int p,
                       const Eigen::VectorXd& weights = Eigen::VectorXd());

// Amplitude components: each aligned function contributes the vector
// h = [q values, f0], so initial-value variation rides along with the SRSF.
// The inner product is the product metric trapz(q1*q2) + f0_1*f0_2, i.e.
// quadrature weights on the SRSF block and unit weight on the f0 coordinate.
struct VerticalFpca {
    Grid grid;
    Eigen::VectorXd mu_h;            // length T+1
    Eigen::MatrixXd directions;      // (T+1) x p
    Eigen::VectorXd singular_values; // p
    Eigen::VectorXd energy_fraction; // p
    Eigen::MatrixXd coefficients;    // n x p
    double total_energy = 0.0;
};

VerticalFpca vertical_fpca(const std::vector<Srsf>& aligned, int p);

// Phase components: PCA of the shooting vectors of the warps at their
// Karcher mean, under the trapezoid inner product. The vectors are already
// centered by the mean construction, so no re-centering is applied and the
// directions stay tangent at mu_psi; tau*sqrt(sigma_j)*U_j is a tangent
// vector of arc length |tau|*sqrt(sigma_j).
struct HorizontalFpca {
    Psi mu_psi;
    Warp mean_warp;
    Eigen::MatrixXd directions;      // T x p
    Eigen::VectorXd singular_values; // p
    Eigen::VectorXd energy_fraction; // p
    Eigen::MatrixXd coefficients;    // n x p
    double total_energy = 0.0;
    bool karcher_converged = false;
};

HorizontalFpca horizontal_fpca(const std::vector<Warp>& warps, int p,
                               const KarcherOptions& opts = {});

// Function-space path of the j-th amplitude component (j is 1-based):
// integrates mu_h + tau * sqrt(sigma_j) U_j back to a function.
SampledFunction principal_path_vertical(const VerticalFpca& basis, int j, double tau);

// Warp-space path of the j-th phase component: geodesic shot from mu_psi
// along the direction, mapped back to a warp.
Warp principal_path_horizontal(const HorizontalFpca& basis, int j, double tau);

// Smallest k whose cumulative energy within the given spectrum reaches the
// threshold; a degenerate all-zero spectrum yields 1.
int select_components(std::span<const double> singular_values, double threshold);

VerticalFpca truncate(const VerticalFpca& basis, int k);
HorizontalFpca truncate(const HorizontalFpca& basis, int k);

} // namespace efda
