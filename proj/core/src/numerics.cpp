#include "efda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efda {

std::vector<double> gradient(std::span<const double> f, double spacing) {
    const int n = static_cast<int>(f.size());
    if (n < 3) throw std::invalid_argument("gradient: need at least 3 samples");
    if (!(spacing > 0.0)) throw std::invalid_argument("gradient: spacing must be positive");
    std::vector<double> d(n);
    const double inv2h = 1.0 / (2.0 * spacing);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (int k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) * inv2h;
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
    return d;
}

double trapz(std::span<const double> f, double spacing) {
    const int n = static_cast<int>(f.size());
    if (n < 2) throw std::invalid_argument("trapz: need at least 2 samples");
    double acc = 0.5 * (f[0] + f[n - 1]);
    for (int k = 1; k + 1 < n; ++k) acc += f[k];
    return acc * spacing;
}

std::vector<double> cumtrapz(std::span<const double> f, double spacing) {
    const int n = static_cast<int>(f.size());
    if (n < 2) throw std::invalid_argument("cumtrapz: need at least 2 samples");
    std::vector<double> out(n);
    out[0] = 0.0;
    for (int k = 1; k < n; ++k)
        out[k] = out[k - 1] + 0.5 * spacing * (f[k - 1] + f[k]);
    return out;
}

double l2_inner(std::span<const double> a, std::span<const double> b, double spacing) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_inner: size mismatch");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw std::invalid_argument("l2_inner: need at least 2 samples");
    double acc = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (int k = 1; k + 1 < n; ++k) acc += a[k] * b[k];
    return acc * spacing;
}

double l2_norm(std::span<const double> a, double spacing) {
    return std::sqrt(std::max(0.0, l2_inner(a, a, spacing)));
}

std::vector<double> smooth_box(std::span<const double> f, int iterations) {
    if (iterations < 0) throw std::invalid_argument("smooth_box: negative iteration count");
    const int n = static_cast<int>(f.size());
    std::vector<double> cur(f.begin(), f.end());
    if (n < 3 || iterations == 0) return cur;
    std::vector<double> next(n);
    for (int it = 0; it < iterations; ++it) {
        next[0] = cur[0];
        for (int k = 1; k + 1 < n; ++k)
            next[k] = 0.25 * cur[k - 1] + 0.5 * cur[k] + 0.25 * cur[k + 1];
        next[n - 1] = cur[n - 1];
        cur.swap(next);
    }
    return cur;
}

SampledFunction smooth_box(const SampledFunction& f, int iterations) {
    return SampledFunction(f.grid, smooth_box(std::span<const double>(f.values), iterations));
}

namespace {

constexpr double kDomainSlack = 1e-9;

double interp_uniform_one(const Grid& g, std::span<const double> values, double t) {
    const double h = g.spacing();
    if (t < g.t0 - kDomainSlack * (1.0 + std::abs(g.t0)) ||
        t > g.t1 + kDomainSlack * (1.0 + std::abs(g.t1)))
        throw std::domain_error("interp_uniform: query outside sampled domain");
    double u = (t - g.t0) / h;
    int k = static_cast<int>(std::floor(u));
    if (k < 0) k = 0;
    if (k >= g.n - 1) k = g.n - 2;
    const double frac = u - k;
    return values[k] + frac * (values[k + 1] - values[k]);
}

} // namespace

double interp_uniform(const Grid& g, std::span<const double> values, double t) {
    if (static_cast<int>(values.size()) != g.n)
        throw std::invalid_argument("interp_uniform: value count must equal grid.n");
    return interp_uniform_one(g, values, t);
}

std::vector<double> interp_uniform(const Grid& g, std::span<const double> values,
                                   std::span<const double> queries) {
    if (static_cast<int>(values.size()) != g.n)
        throw std::invalid_argument("interp_uniform: value count must equal grid.n");
    std::vector<double> out(queries.size());
    for (size_t i = 0; i < queries.size(); ++i)
        out[i] = interp_uniform_one(g, values, queries[i]);
    return out;
}

std::vector<double> interp_sorted(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> queries) {
    if (xs.size() != ys.size()) throw std::invalid_argument("interp_sorted: size mismatch");
    const int n = static_cast<int>(xs.size());
    if (n < 2) throw std::invalid_argument("interp_sorted: need at least 2 samples");
    const double lo = xs[0], hi = xs[n - 1];
    std::vector<double> out(queries.size());
    for (size_t i = 0; i < queries.size(); ++i) {
        double x = queries[i];
        if (x < lo - kDomainSlack * (1.0 + std::abs(lo)) ||
            x > hi + kDomainSlack * (1.0 + std::abs(hi)))
            throw std::domain_error("interp_sorted: query outside sampled domain");
        x = std::clamp(x, lo, hi);
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        int k = static_cast<int>(it - xs.begin()) - 1;
        if (k < 0) k = 0;
        if (k >= n - 1) k = n - 2;
        const double dx = xs[k + 1] - xs[k];
        const double frac = dx > 0.0 ? (x - xs[k]) / dx : 0.0;
        out[i] = ys[k] + frac * (ys[k + 1] - ys[k]);
    }
    return out;
}

SampledFunction resample(const SampledFunction& f, const Grid& target) {
    if (std::abs(f.grid.t0 - target.t0) > 1e-9 || std::abs(f.grid.t1 - target.t1) > 1e-9)
        throw std::domain_error("resample: target grid must span the same domain");
    if (target.n == f.grid.n) return f;
    return SampledFunction(target,
                           interp_uniform(f.grid, f.values, target.points()));
}

double cross_sectional_variance(const std::vector<SampledFunction>& fs) {
    const int n = static_cast<int>(fs.size());
    if (n < 2) throw std::invalid_argument("cross_sectional_variance: need at least 2 functions");
    const Grid& g = fs[0].grid;
    for (const auto& f : fs) require_shared_grid(g, f.grid, "cross_sectional_variance");
    std::vector<double> mean(g.n, 0.0);
    for (const auto& f : fs)
        for (int k = 0; k < g.n; ++k) mean[k] += f.values[k];
    for (double& m : mean) m /= n;
    std::vector<double> sq(g.n, 0.0);
    for (const auto& f : fs)
        for (int k = 0; k < g.n; ++k) {
            const double d = f.values[k] - mean[k];
            sq[k] += d * d;
        }
    return trapz(sq, g.spacing()) / (n - 1);
}

} // namespace efda
