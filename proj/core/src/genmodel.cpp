#include "efda/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "efda/numerics.hpp"

namespace efda {

std::vector<CoefficientSample> collect_coefficients(const VerticalFpca& vertical,
                                                    const HorizontalFpca& horizontal,
                                                    const std::vector<Srsf>& aligned) {
    const int n = static_cast<int>(vertical.coefficients.rows());
    if (horizontal.coefficients.rows() != n || static_cast<int>(aligned.size()) != n)
        throw std::invalid_argument("collect_coefficients: bases fit on different sample counts");
    std::vector<CoefficientSample> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].f0 = aligned[i].f0;
        out[i].c = vertical.coefficients.row(i).transpose();
        out[i].z = horizontal.coefficients.row(i).transpose();
    }
    return out;
}

namespace {

Eigen::MatrixXd add_ridge(Eigen::MatrixXd cov) {
    const double delta = 1e-8 * cov.trace() / cov.rows();
    cov.diagonal().array() += delta;
    return cov;
}

Eigen::LLT<Eigen::MatrixXd> cholesky_or_throw(const Eigen::MatrixXd& cov, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": covariance is singular despite ridge");
    return llt;
}

} // namespace

GaussianDensity fit_gaussian_density(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean,
                                     bool diagonal) {
    const int n = static_cast<int>(rows.rows());
    if (n < 2) throw std::invalid_argument("fit_gaussian_density: need at least 2 samples");
    if (mean.size() != rows.cols())
        throw std::invalid_argument("fit_gaussian_density: mean dimension mismatch");
    const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    if (diagonal) {
        // eval() breaks the aliasing: asDiagonal zero-fills before copying.
        const Eigen::VectorXd variances = cov.diagonal().eval();
        cov = variances.asDiagonal();
    }
    GaussianDensity d;
    d.mean = mean;
    d.covariance = add_ridge(std::move(cov));
    return d;
}

double log_density(const GaussianDensity& d, const Eigen::VectorXd& x) {
    if (x.size() != d.mean.size())
        throw std::invalid_argument("log_density: dimension mismatch with Gaussian model");
    const auto llt = cholesky_or_throw(d.covariance, "gaussian log_density");
    const Eigen::VectorXd diff = x - d.mean;
    const Eigen::VectorXd sol = llt.solve(diff);
    double logdet = 0.0;
    for (int i = 0; i < d.mean.size(); ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const double dim = static_cast<double>(d.mean.size());
    return -0.5 * (diff.dot(sol) + logdet + dim * std::log(2.0 * std::numbers::pi));
}

Eigen::VectorXd draw(const GaussianDensity& d, Rng& rng) {
    // Identical training samples leave an all-zero covariance (the ridge is
    // trace-scaled, so it stays zero too): a point mass at the mean.
    if (d.covariance.isZero(0.0)) return d.mean;
    const auto llt = cholesky_or_throw(d.covariance, "gaussian draw");
    Eigen::VectorXd xi(d.mean.size());
    for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
    return d.mean + Eigen::MatrixXd(llt.matrixL()) * xi;
}

namespace {

// Linear-interpolation quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& s, double p) {
    const double pos = p * (s.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= s.size()) return s.back();
    const double frac = pos - lo;
    return s[lo] + frac * (s[lo + 1] - s[lo]);
}

double silverman_bandwidth(const std::vector<double>& samples, bool* degenerate) {
    const size_t n = samples.size();
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double range = sorted.back() - sorted.front();
    const double spread = std::min(sd, iqr / 1.34);
    const double floor = 1e-6 * (range + 1e-12);
    *degenerate = !(sd > 0.0) && !(iqr > 0.0);
    return std::max(0.9 * spread * std::pow(static_cast<double>(n), -0.2), floor);
}

} // namespace

KdeDensity fit_kde_density(const Eigen::MatrixXd& rows) {
    const int n = static_cast<int>(rows.rows());
    if (n < 2) throw std::invalid_argument("fit_kde_density: need at least 2 samples");
    KdeDensity d;
    d.samples.resize(rows.cols());
    d.bandwidths.resize(rows.cols());
    for (int j = 0; j < rows.cols(); ++j) {
        d.samples[j].assign(rows.col(j).data(), rows.col(j).data() + n);
        bool degenerate = false;
        d.bandwidths[j] = silverman_bandwidth(d.samples[j], &degenerate);
        if (degenerate) ++d.degenerate_coordinates;
    }
    return d;
}

double log_density(const KdeDensity& d, const Eigen::VectorXd& x) {
    if (static_cast<size_t>(x.size()) != d.samples.size())
        throw std::invalid_argument("log_density: dimension mismatch with KDE model");
    double total = 0.0;
    for (size_t j = 0; j < d.samples.size(); ++j) {
        const std::vector<double>& s = d.samples[j];
        const double b = d.bandwidths[j];
        // log of (1/(n b)) sum_i K((x - x_i) / b) via log-sum-exp, so far
        // queries stay finite instead of underflowing to -inf.
        double peak = -std::numeric_limits<double>::infinity();
        std::vector<double> expo(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            const double u = (x[j] - s[i]) / b;
            expo[i] = -0.5 * u * u;
            peak = std::max(peak, expo[i]);
        }
        double acc = 0.0;
        for (double e : expo) acc += std::exp(e - peak);
        total += peak + std::log(acc) - std::log(s.size() * b) -
                 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return total;
}

Eigen::VectorXd draw(const KdeDensity& d, Rng& rng) {
    Eigen::VectorXd x(d.samples.size());
    for (size_t j = 0; j < d.samples.size(); ++j) {
        const std::vector<double>& s = d.samples[j];
        const size_t pick = rng.uniform_index(s.size());
        x[j] = s[pick] + d.bandwidths[j] * rng.normal();
    }
    return x;
}

namespace {

Eigen::MatrixXd stack_samples(const std::vector<CoefficientSample>& samples, int k1, int k2) {
    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd rows(n, 1 + k1 + k2);
    for (int i = 0; i < n; ++i) {
        if (samples[i].c.size() != k1 || samples[i].z.size() != k2)
            throw std::invalid_argument("fit: inconsistent coefficient dimensions");
        rows(i, 0) = samples[i].f0;
        rows.block(i, 1, 1, k1) = samples[i].c.transpose();
        rows.block(i, 1 + k1, 1, k2) = samples[i].z.transpose();
    }
    return rows;
}

Eigen::VectorXd stack_one(const CoefficientSample& s, int k1, int k2) {
    if (s.c.size() != k1 || s.z.size() != k2)
        throw std::invalid_argument("log_likelihood: coefficient length mismatch with model");
    Eigen::VectorXd x(1 + k1 + k2);
    x[0] = s.f0;
    x.segment(1, k1) = s.c;
    x.segment(1 + k1, k2) = s.z;
    return x;
}

Eigen::VectorXd declared_mean(const Eigen::MatrixXd& rows, int k1, int k2) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(1 + k1 + k2);
    mean[0] = rows.col(0).mean();
    return mean;
}

} // namespace

GaussianModel fit_gaussian(const std::vector<CoefficientSample>& samples, GaussianMode mode,
                           VerticalFpca vertical, HorizontalFpca horizontal) {
    if (samples.size() < 2) throw std::invalid_argument("fit_gaussian: need at least 2 samples");
    GaussianModel m;
    m.mode = mode;
    m.k1 = static_cast<int>(samples[0].c.size());
    m.k2 = static_cast<int>(samples[0].z.size());
    const Eigen::MatrixXd rows = stack_samples(samples, m.k1, m.k2);
    m.density = fit_gaussian_density(rows, declared_mean(rows, m.k1, m.k2),
                                     mode == GaussianMode::diagonal_blocks);
    m.vertical = std::move(vertical);
    m.horizontal = std::move(horizontal);
    return m;
}

double gaussian_log_likelihood(const GaussianModel& model, const CoefficientSample& sample) {
    return log_density(model.density, stack_one(sample, model.k1, model.k2));
}

KdeModel fit_kde(const std::vector<CoefficientSample>& samples, VerticalFpca vertical,
                 HorizontalFpca horizontal) {
    if (samples.size() < 2) throw std::invalid_argument("fit_kde: need at least 2 samples");
    KdeModel m;
    m.k1 = static_cast<int>(samples[0].c.size());
    m.k2 = static_cast<int>(samples[0].z.size());
    m.density = fit_kde_density(stack_samples(samples, m.k1, m.k2));
    m.vertical = std::move(vertical);
    m.horizontal = std::move(horizontal);
    return m;
}

double kde_log_likelihood(const KdeModel& model, const CoefficientSample& sample) {
    return log_density(model.density, stack_one(sample, model.k1, model.k2));
}

SampledFunction reconstruct_amplitude(const VerticalFpca& basis, const Eigen::VectorXd& c,
                                      double f0, F0Policy policy) {
    if (c.size() > basis.directions.cols())
        throw std::invalid_argument("reconstruct_amplitude: more coefficients than directions");
    const int t = basis.grid.n;
    Eigen::VectorXd h = basis.mu_h;
    h.head(t) += basis.directions.topRows(t).leftCols(c.size()) * c;
    double value0 = f0;
    if (policy == F0Policy::model_driven)
        value0 += basis.directions.row(t).leftCols(c.size()) * c;
    std::vector<double> q(t);
    for (int k = 0; k < t; ++k) q[k] = h[k];
    return from_srsf(Srsf(basis.grid, std::move(q), value0));
}

Warp reconstruct_phase(const HorizontalFpca& basis, const Eigen::VectorXd& z) {
    if (z.size() > basis.directions.cols())
        throw std::invalid_argument("reconstruct_phase: more coefficients than directions");
    const Grid& g = basis.mu_psi.grid;
    const Eigen::VectorXd v = basis.directions.leftCols(z.size()) * z;
    std::vector<double> vv(g.n);
    for (int k = 0; k < g.n; ++k) vv[k] = v[k];
    return from_psi(sphere_exp(basis.mu_psi, ShootingVector{g, std::move(vv)}));
}

namespace {

FunctionDraw assemble_draw(const Eigen::VectorXd& x, int k1, int k2,
                           const VerticalFpca& vertical, const HorizontalFpca& horizontal) {
    FunctionDraw out;
    out.coefficients.f0 = x[0];
    out.coefficients.c = x.segment(1, k1);
    out.coefficients.z = x.segment(1 + k1, k2);
    out.amplitude = reconstruct_amplitude(vertical, out.coefficients.c, out.coefficients.f0);
    out.warp = reconstruct_phase(horizontal, out.coefficients.z);
    out.composed = SampledFunction(
        out.amplitude.grid,
        interp_uniform(out.amplitude.grid, out.amplitude.values, out.warp.values));
    return out;
}

} // namespace

FunctionDraw sample(const GaussianModel& model, Rng& rng) {
    return assemble_draw(draw(model.density, rng), model.k1, model.k2, model.vertical,
                         model.horizontal);
}

FunctionDraw sample(const KdeModel& model, Rng& rng) {
    return assemble_draw(draw(model.density, rng), model.k1, model.k2, model.vertical,
                         model.horizontal);
}

} // namespace efda
