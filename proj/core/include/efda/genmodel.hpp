#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "efda/fpca.hpp"
#include "efda/rng.hpp"

namespace efda {

// Raised when a required linear-algebra step degenerates (e.g. a covariance
// stays singular even after ridging).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduced coordinates of one function: initial value, amplitude coefficients
// (vertical basis) and phase coefficients (horizontal basis).
struct CoefficientSample {
    double f0 = 0.0;
    Eigen::VectorXd c;
    Eigen::VectorXd z;
};

// Bundles the reduced coordinates of the training set; aligned supplies the
// true initial values, the bases supply the projections.
std::vector<CoefficientSample> collect_coefficients(const VerticalFpca& vertical,
                                                    const HorizontalFpca& horizontal,
                                                    const std::vector<Srsf>& aligned);

// Multivariate normal over an arbitrary coefficient vector. The stored
// covariance already includes the ridge delta * I with
// delta = 1e-8 * trace / dim, so the density is evaluable whenever the data
// had any spread at all.
struct GaussianDensity {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

GaussianDensity fit_gaussian_density(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean,
                                     bool diagonal);
double log_density(const GaussianDensity& d, const Eigen::VectorXd& x);
Eigen::VectorXd draw(const GaussianDensity& d, Rng& rng);

// Product of per-coordinate Gaussian-kernel estimates. Bandwidths follow
// Silverman's rule, 0.9 * min(sd, IQR/1.34) * n^(-1/5), floored at
// 1e-6 * (range + 1e-12); coordinates with no spread at all are counted in
// degenerate_coordinates.
struct KdeDensity {
    std::vector<std::vector<double>> samples; // one list per coordinate
    std::vector<double> bandwidths;
    int degenerate_coordinates = 0;
};

KdeDensity fit_kde_density(const Eigen::MatrixXd& rows);
double log_density(const KdeDensity& d, const Eigen::VectorXd& x);
Eigen::VectorXd draw(const KdeDensity& d, Rng& rng); // smoothed bootstrap

enum class GaussianMode {
    diagonal_blocks, // independent coordinates, variances from the data
    full_joint       // complete sample covariance across (f0, c, z)
};

// Joint generative model over stacked vectors [f0, c, z]; the mean is
// [mean f0, 0, 0] because fPCA coefficients are centered by construction.
struct GaussianModel {
    GaussianMode mode = GaussianMode::full_joint;
    int k1 = 0;
    int k2 = 0;
    GaussianDensity density;
    VerticalFpca vertical;
    HorizontalFpca horizontal;
};

GaussianModel fit_gaussian(const std::vector<CoefficientSample>& samples, GaussianMode mode,
                           VerticalFpca vertical, HorizontalFpca horizontal);
double gaussian_log_likelihood(const GaussianModel& model, const CoefficientSample& sample);

struct KdeModel {
    int k1 = 0;
    int k2 = 0;
    KdeDensity density;
    VerticalFpca vertical;
    HorizontalFpca horizontal;
};

KdeModel fit_kde(const std::vector<CoefficientSample>& samples, VerticalFpca vertical,
                 HorizontalFpca horizontal);
double kde_log_likelihood(const KdeModel& model, const CoefficientSample& sample);

enum class F0Policy {
    explicit_value, // use the supplied f0 as-is
    model_driven    // add the f0 component of each direction, scaled by c
};

// Function with amplitude coefficients c relative to the vertical basis.
SampledFunction reconstruct_amplitude(const VerticalFpca& basis, const Eigen::VectorXd& c,
                                      double f0, F0Policy policy = F0Policy::explicit_value);

// Warp with phase coefficients z relative to the horizontal basis.
Warp reconstruct_phase(const HorizontalFpca& basis, const Eigen::VectorXd& z);

struct FunctionDraw {
    CoefficientSample coefficients;
    SampledFunction amplitude;
    Warp warp;
    SampledFunction composed; // amplitude o warp
};

FunctionDraw sample(const GaussianModel& model, Rng& rng);
FunctionDraw sample(const KdeModel& model, Rng& rng);

} // namespace efda
