#include "efda/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "efda/numerics.hpp"

namespace efda {

DpLattice make_lattice(int n, int slope_cap) {
    if (n < 3) throw std::invalid_argument("make_lattice: need at least 3 nodes");
    if (slope_cap < 1) throw std::invalid_argument("make_lattice: slope_cap must be positive");
    DpLattice lat;
    lat.n = n;
    lat.slope_cap = slope_cap;
    for (int a = 1; a <= slope_cap; ++a)
        for (int b = 1; b <= slope_cap; ++b)
            if (std::gcd(a, b) == 1) lat.slopes.emplace_back(a, b);
    std::sort(lat.slopes.begin(), lat.slopes.end(),
              [](const std::pair<int, int>& x, const std::pair<int, int>& y) {
                  const int dx = (x.first - 1) * (x.first - 1) + (x.second - 1) * (x.second - 1);
                  const int dy = (y.first - 1) * (y.first - 1) + (y.second - 1) * (y.second - 1);
                  if (dx != dy) return dx < dy;
                  return x < y;
              });
    return lat;
}

Warp optimal_warp(const Srsf& q1, const Srsf& q2, const DpLattice& lattice, double* cost_out) {
    require_shared_grid(q1.grid, q2.grid, "optimal_warp");
    const int n = q1.grid.n;
    if (lattice.n != n)
        throw std::invalid_argument("optimal_warp: lattice size must equal grid size");
    if (lattice.slopes.empty() || lattice.slopes.front() != std::make_pair(1, 1))
        throw std::invalid_argument("optimal_warp: lattice must contain slope (1,1) first");
    const double h = q1.grid.spacing();
    const int ns = static_cast<int>(lattice.slopes.size());

    // Per-slope constants. qs[s][r] = q2[r] * sqrt(drow/dcol), so a segment
    // ending at (r, c) with slope s costs w[s] * ((q1[pc]-qs[s][pr])^2 +
    // (q1[c]-qs[s][r])^2): endpoint trapezoid under constant slope, with the
    // integrand exact at lattice nodes.
    std::vector<double> w(ns);
    std::vector<std::vector<double>> qs(ns, std::vector<double>(n));
    for (int s = 0; s < ns; ++s) {
        const auto [dr, dc] = lattice.slopes[s];
        const double root = std::sqrt(static_cast<double>(dr) / dc);
        w[s] = 0.5 * dc * h;
        for (int r = 0; r < n; ++r) qs[s][r] = q2.values[r] * root;
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<size_t>(n) * n, inf);
    std::vector<int16_t> pred(static_cast<size_t>(n) * n, -1);
    cost[0] = 0.0;
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            if (r == 0 && c == 0) continue;
            double best = inf;
            int16_t best_s = -1;
            for (int s = 0; s < ns; ++s) {
                const auto [dr, dc] = lattice.slopes[s];
                const int pr = r - dr, pc = c - dc;
                if (pr < 0 || pc < 0) continue;
                const double base = cost[static_cast<size_t>(pr) * n + pc];
                if (base == inf) continue;
                const double e0 = q1.values[pc] - qs[s][pr];
                const double e1 = q1.values[c] - qs[s][r];
                const double cand = base + w[s] * (e0 * e0 + e1 * e1);
                if (cand < best) {
                    best = cand;
                    best_s = static_cast<int16_t>(s);
                }
            }
            cost[static_cast<size_t>(r) * n + c] = best;
            pred[static_cast<size_t>(r) * n + c] = best_s;
        }
    }

    if (cost_out) *cost_out = cost[static_cast<size_t>(n) * n - 1];

    // Backtrack, filling every column along each constant-slope segment.
    std::vector<double> gamma(n, 0.0);
    int r = n - 1, c = n - 1;
    const double denom = n - 1;
    while (r != 0 || c != 0) {
        const int s = pred[static_cast<size_t>(r) * n + c];
        const auto [dr, dc] = lattice.slopes[s];
        const int pr = r - dr, pc = c - dc;
        for (int col = pc; col <= c; ++col)
            gamma[col] = (pr + static_cast<double>(dr) * (col - pc) / dc) / denom;
        r = pr;
        c = pc;
    }
    gamma[n - 1] = 1.0;
    return Warp(q1.grid, std::move(gamma));
}

Warp align_pair(const Srsf& q1, const Srsf& q2, const DpSettings& settings) {
    require_shared_grid(q1.grid, q2.grid, "align_pair");
    if (settings.lattice_n < 3) throw std::invalid_argument("align_pair: lattice_n too small");
    const int n = q1.grid.n;
    const int m = std::min(settings.lattice_n, n);
    const DpLattice lat = make_lattice(m, settings.slope_cap);
    if (m == n) return optimal_warp(q1, q2, lat);

    const Grid coarse(q1.grid.t0, q1.grid.t1, m);
    const auto down = [&](const Srsf& q) {
        return Srsf(coarse, interp_uniform(q.grid, q.values, coarse.points()), q.f0);
    };
    Warp wc = optimal_warp(down(q1), down(q2), lat);
    std::vector<double> fine = interp_uniform(coarse, wc.values, q1.grid.points());
    fine.front() = 0.0;
    fine.back() = 1.0;
    return Warp(q1.grid, std::move(fine));
}

double amplitude_distance(const SampledFunction& f1, const SampledFunction& f2,
                          const DpSettings& settings) {
    const Srsf q1 = to_srsf(f1), q2 = to_srsf(f2);
    const Warp g = align_pair(q1, q2, settings);
    return l2_distance(q1, warp_action(q2, g));
}

namespace {

Srsf mean_srsf_of(const std::vector<Srsf>& qs) {
    const Grid& g = qs[0].grid;
    std::vector<double> m(g.n, 0.0);
    double f0 = 0.0;
    for (const Srsf& q : qs) {
        for (int k = 0; k < g.n; ++k) m[k] += q.values[k];
        f0 += q.f0;
    }
    for (double& x : m) x /= static_cast<double>(qs.size());
    return Srsf(g, std::move(m), f0 / static_cast<double>(qs.size()));
}

} // namespace

SeparationResult separate(const std::vector<SampledFunction>& fs, const SeparationOptions& opts) {
    const int n = static_cast<int>(fs.size());
    if (n < 2) throw std::invalid_argument("separate: need at least 2 functions");
    const Grid& g = fs[0].grid;
    for (const auto& f : fs) require_shared_grid(g, f.grid, "separate");
    if (opts.max_iter < 1) throw std::invalid_argument("separate: max_iter must be positive");
    const double h = g.spacing();

    std::vector<Srsf> qs;
    qs.reserve(n);
    for (const auto& f : fs) qs.push_back(to_srsf(f));

    // Initial template: the sample closest to the pointwise mean SRSF.
    const Srsf qbar = mean_srsf_of(qs);
    int init = 0;
    double init_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double d = l2_distance(qs[i], qbar);
        if (d < init_d) {
            init_d = d;
            init = i;
        }
    }
    Srsf mu = qs[init];

    SeparationResult result;
    std::vector<Warp> warps(n, identity_warp(g));
    std::vector<Srsf> aligned(qs);
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        std::vector<Warp> cand_warps(n, identity_warp(g));
        std::vector<Srsf> cand_aligned(n);
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            cand_warps[i] = align_pair(mu, qs[i], opts.dp);
            cand_aligned[i] = warp_action(qs[i], cand_warps[i]);
            const double d = l2_distance(mu, cand_aligned[i]);
            cost += d * d;
        }
        if (!result.cost_trace.empty() && cost > result.cost_trace.back())
            break; // plateau before the tolerance was met
        warps = std::move(cand_warps);
        aligned = std::move(cand_aligned);
        result.cost_trace.push_back(cost);
        result.iterations = iter + 1;

        Srsf next_mu = mean_srsf_of(aligned);
        std::vector<double> diff(g.n);
        for (int k = 0; k < g.n; ++k) diff[k] = next_mu.values[k] - mu.values[k];
        const double increment = l2_norm(diff, h);
        mu = std::move(next_mu);
        if (increment <= opts.tol) {
            result.converged = true;
            break;
        }
    }
    if (!result.converged) result.warnings += 1;

    // Centering: transport the template and all warps by the inverse of the
    // warps' Karcher mean, so the returned warps average to the identity.
    KarcherMean km = karcher_mean_warps(warps, opts.karcher);
    if (!km.converged) result.warnings += 1;
    const Warp center = invert_warp(km.mean);
    mu = warp_action(mu, center);
    for (int i = 0; i < n; ++i) {
        warps[i] = compose_warps(warps[i], center);
        aligned[i] = warp_action(qs[i], warps[i]);
    }

    result.warps = std::move(warps);
    result.aligned_srsf = std::move(aligned);
    result.aligned.reserve(n);
    for (int i = 0; i < n; ++i) result.aligned.push_back(from_srsf(result.aligned_srsf[i]));
    result.mean_srsf = Srsf(g, mu.values, qbar.f0);
    result.mean_function = from_srsf(result.mean_srsf);
    return result;
}

VarianceDecomposition variance_decomposition(const std::vector<SampledFunction>& fs,
                                             const SeparationResult& result) {
    if (fs.size() != result.aligned.size())
        throw std::invalid_argument("variance_decomposition: size mismatch with result");
    VarianceDecomposition out;
    out.original = cross_sectional_variance(fs);
    out.amplitude = cross_sectional_variance(result.aligned);
    std::vector<SampledFunction> phase_only;
    phase_only.reserve(fs.size());
    const SampledFunction& mf = result.mean_function;
    for (const Warp& w : result.warps)
        phase_only.emplace_back(mf.grid, interp_uniform(mf.grid, mf.values, w.values));
    out.phase = cross_sectional_variance(phase_only);
    return out;
}

} // namespace efda
