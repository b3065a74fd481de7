#include "efda/fpca.hpp"

#include <cmath>
#include <stdexcept>

namespace efda {

Eigen::VectorXd quadrature_weights(const Grid& g) {
    const double h = g.spacing();
    Eigen::VectorXd w = Eigen::VectorXd::Constant(g.n, h);
    w[0] = 0.5 * h;
    w[g.n - 1] = 0.5 * h;
    return w;
}

namespace {

// Weighted PCA via the isometry x -> sqrt(W) x onto Euclidean coordinates:
// eigenvectors there map back to W-orthonormal directions, and projections
// in the scaled space are exactly the <.,.>_W coefficients.
PcaBasis pca_impl(const Eigen::MatrixXd& rows, const Eigen::VectorXd& center, int p,
                  const Eigen::VectorXd& weights) {
    const int n = static_cast<int>(rows.rows());
    const int dim = static_cast<int>(rows.cols());
    if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 samples");
    if (center.size() != dim) throw std::invalid_argument("fit_pca: center dimension mismatch");
    if (p < 1 || p > dim) throw std::invalid_argument("fit_pca: component count out of range");
    Eigen::VectorXd w = weights;
    if (w.size() == 0) w = Eigen::VectorXd::Ones(dim);
    if (w.size() != dim) throw std::invalid_argument("fit_pca: weight dimension mismatch");
    for (int k = 0; k < dim; ++k)
        if (!(w[k] > 0.0)) throw std::invalid_argument("fit_pca: weights must be positive");
    const Eigen::VectorXd sqw = w.cwiseSqrt();

    Eigen::MatrixXd centered = rows.rowwise() - center.transpose();
    centered = centered.array().rowwise() * sqw.transpose().array();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fit_pca: eigendecomposition failed");

    PcaBasis basis;
    basis.mean = center;
    basis.total_energy = cov.trace();
    basis.directions.resize(dim, p);
    basis.singular_values.resize(p);
    Eigen::MatrixXd scaled(dim, p); // eigenvectors in sqrt(W) coordinates
    // Eigen returns ascending order; take the top p descending.
    for (int j = 0; j < p; ++j) {
        basis.singular_values[j] = std::max(solver.eigenvalues()[dim - 1 - j], 0.0);
        scaled.col(j) = solver.eigenvectors().col(dim - 1 - j);
        basis.directions.col(j) = scaled.col(j).cwiseQuotient(sqw);
    }
    for (int j = 0; j < p; ++j) {
        int arg = 0;
        double mag = -1.0;
        for (int k = 0; k < dim; ++k) {
            const double a = std::abs(basis.directions(k, j));
            if (a > mag) {
                mag = a;
                arg = k;
            }
        }
        if (basis.directions(arg, j) < 0.0) {
            basis.directions.col(j) = -basis.directions.col(j);
            scaled.col(j) = -scaled.col(j);
        }
    }
    basis.coefficients = centered * scaled;
    basis.energy_fraction.resize(p);
    const double total = basis.total_energy;
    for (int j = 0; j < p; ++j)
        basis.energy_fraction[j] = total > 0.0 ? basis.singular_values[j] / total : 0.0;
    return basis;
}

} // namespace

PcaBasis fit_pca(const Eigen::MatrixXd& rows, int p, const Eigen::VectorXd& weights) {
    const Eigen::VectorXd mean = rows.colwise().mean();
    return pca_impl(rows, mean, p, weights);
}

PcaBasis fit_pca_about(const Eigen::MatrixXd& rows, const Eigen::VectorXd& center, int p,
                       const Eigen::VectorXd& weights) {
    return pca_impl(rows, center, p, weights);
}

VerticalFpca vertical_fpca(const std::vector<Srsf>& aligned, int p) {
    const int n = static_cast<int>(aligned.size());
    if (n < 2) throw std::invalid_argument("vertical_fpca: need at least 2 functions");
    const Grid& g = aligned[0].grid;
    for (const Srsf& q : aligned) require_shared_grid(g, q.grid, "vertical_fpca");
    const int dim = g.n + 1;
    if (p < 1 || p > std::min(n - 1, dim))
        throw std::invalid_argument("vertical_fpca: component count out of range");

    Eigen::MatrixXd rows(n, dim);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < g.n; ++k) rows(i, k) = aligned[i].values[k];
        rows(i, g.n) = aligned[i].f0;
    }
    Eigen::VectorXd w(dim);
    w.head(g.n) = quadrature_weights(g);
    w[g.n] = 1.0; // f0 coordinate: unit weight in the product metric
    PcaBasis basis = fit_pca(rows, p, w);

    VerticalFpca out;
    out.grid = g;
    out.mu_h = std::move(basis.mean);
    out.directions = std::move(basis.directions);
    out.singular_values = std::move(basis.singular_values);
    out.energy_fraction = std::move(basis.energy_fraction);
    out.coefficients = std::move(basis.coefficients);
    out.total_energy = basis.total_energy;
    return out;
}

HorizontalFpca horizontal_fpca(const std::vector<Warp>& warps, int p, const KarcherOptions& opts) {
    const int n = static_cast<int>(warps.size());
    if (n < 2) throw std::invalid_argument("horizontal_fpca: need at least 2 warps");
    const Grid& g = warps[0].grid;
    const int dim = g.n;
    if (p < 1 || p > std::min(n, dim))
        throw std::invalid_argument("horizontal_fpca: component count out of range");

    KarcherMean km = karcher_mean_warps(warps, opts);
    Eigen::MatrixXd rows(n, dim);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) rows(i, k) = km.shooting[i].values[k];
    PcaBasis basis =
        fit_pca_about(rows, Eigen::VectorXd::Zero(dim), p, quadrature_weights(g));

    HorizontalFpca out;
    out.mu_psi = std::move(km.mu_psi);
    out.mean_warp = std::move(km.mean);
    out.directions = std::move(basis.directions);
    out.singular_values = std::move(basis.singular_values);
    out.energy_fraction = std::move(basis.energy_fraction);
    out.coefficients = std::move(basis.coefficients);
    out.total_energy = basis.total_energy;
    out.karcher_converged = km.converged;
    return out;
}

SampledFunction principal_path_vertical(const VerticalFpca& basis, int j, double tau) {
    const int p = static_cast<int>(basis.singular_values.size());
    if (j < 1 || j > p) throw std::invalid_argument("principal_path_vertical: component index out of range");
    if (!std::isfinite(tau)) throw std::invalid_argument("principal_path_vertical: tau must be finite");
    const Eigen::VectorXd h =
        basis.mu_h + tau * std::sqrt(basis.singular_values[j - 1]) * basis.directions.col(j - 1);
    std::vector<double> q(basis.grid.n);
    for (int k = 0; k < basis.grid.n; ++k) q[k] = h[k];
    return from_srsf(Srsf(basis.grid, std::move(q), h[basis.grid.n]));
}

Warp principal_path_horizontal(const HorizontalFpca& basis, int j, double tau) {
    const int p = static_cast<int>(basis.singular_values.size());
    if (j < 1 || j > p) throw std::invalid_argument("principal_path_horizontal: component index out of range");
    if (!std::isfinite(tau)) throw std::invalid_argument("principal_path_horizontal: tau must be finite");
    const Grid& g = basis.mu_psi.grid;
    std::vector<double> v(g.n);
    const double scale = tau * std::sqrt(basis.singular_values[j - 1]);
    for (int k = 0; k < g.n; ++k) v[k] = scale * basis.directions(k, j - 1);
    return from_psi(sphere_exp(basis.mu_psi, ShootingVector{g, std::move(v)}));
}

int select_components(std::span<const double> singular_values, double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw std::invalid_argument("select_components: threshold must lie in (0, 1]");
    if (singular_values.empty())
        throw std::invalid_argument("select_components: empty spectrum");
    double total = 0.0;
    for (double s : singular_values) total += s;
    if (!(total > 0.0)) return 1;
    double acc = 0.0;
    for (size_t j = 0; j < singular_values.size(); ++j) {
        acc += singular_values[j];
        if (acc >= threshold * total) return static_cast<int>(j) + 1;
    }
    return static_cast<int>(singular_values.size());
}

VerticalFpca truncate(const VerticalFpca& basis, int k) {
    const int p = static_cast<int>(basis.singular_values.size());
    if (k < 1 || k > p) throw std::invalid_argument("truncate: component count out of range");
    VerticalFpca out = basis;
    out.directions = basis.directions.leftCols(k);
    out.singular_values = basis.singular_values.head(k);
    out.energy_fraction = basis.energy_fraction.head(k);
    out.coefficients = basis.coefficients.leftCols(k);
    return out;
}

HorizontalFpca truncate(const HorizontalFpca& basis, int k) {
    const int p = static_cast<int>(basis.singular_values.size());
    if (k < 1 || k > p) throw std::invalid_argument("truncate: component count out of range");
    HorizontalFpca out = basis;
    out.directions = basis.directions.leftCols(k);
    out.singular_values = basis.singular_values.head(k);
    out.energy_fraction = basis.energy_fraction.head(k);
    out.coefficients = basis.coefficients.leftCols(k);
    return out;
}

} // namespace efda
