#include "efda/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "efda/numerics.hpp"

namespace efda {

namespace {

constexpr double kBoundaryTol = 1e-10;
constexpr double kZeroAngle = 1e-10;
constexpr double kAntipodalGap = 1e-8;

void require_unit_domain(const Grid& g, const char* what) {
    if (std::abs(g.t0) > kBoundaryTol || std::abs(g.t1 - 1.0) > kBoundaryTol)
        throw std::invalid_argument(std::string(what) + ": domain must be [0, 1]");
}

} // namespace

Warp::Warp(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require_unit_domain(grid, "Warp");
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("Warp: value count must equal grid.n");
    if (std::abs(values.front()) > kBoundaryTol || std::abs(values.back() - 1.0) > kBoundaryTol)
        throw std::invalid_argument("Warp: boundary values must be 0 and 1");
    for (int k = 1; k < grid.n; ++k)
        if (!(values[k] > values[k - 1]))
            throw std::invalid_argument("Warp: samples must be strictly increasing");
    values.front() = 0.0;
    values.back() = 1.0;
}

Warp identity_warp(const Grid& g) {
    require_unit_domain(g, "identity_warp");
    return Warp(g, g.points());
}

Psi::Psi(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require_unit_domain(grid, "Psi");
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("Psi: value count must equal grid.n");
    const double norm = l2_norm(values, grid.spacing());
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("Psi: samples must have unit trapezoid norm");
}

Psi to_psi(const Warp& g) {
    std::vector<double> d = gradient(g.values, g.grid.spacing());
    for (double& x : d) x = std::sqrt(std::max(x, 0.0));
    const double norm = l2_norm(d, g.grid.spacing());
    if (!(norm > 0.0)) throw std::invalid_argument("to_psi: degenerate warp");
    for (double& x : d) x /= norm;
    return Psi(g.grid, std::move(d));
}

Warp from_psi(const Psi& p) {
    const double h = p.grid.spacing();
    std::vector<double> sq(p.values.size());
    for (size_t k = 0; k < sq.size(); ++k) sq[k] = p.values[k] * p.values[k];
    std::vector<double> g = cumtrapz(sq, h);
    // Monotonicity floor: zero-density stretches would otherwise produce
    // flat samples, which the Warp invariant forbids.
    const double floor = 1e-12 * h;
    for (size_t k = 1; k < g.size(); ++k)
        if (g[k] - g[k - 1] < floor) g[k] = g[k - 1] + floor;
    const double total = g.back();
    for (double& x : g) x /= total;
    return Warp(p.grid, std::move(g));
}

double sphere_distance(const Psi& a, const Psi& b) {
    require_shared_grid(a.grid, b.grid, "sphere_distance");
    const double ip = l2_inner(a.values, b.values, a.grid.spacing());
    return std::acos(std::clamp(ip, -1.0, 1.0));
}

double phase_distance(const Warp& g1, const Warp& g2) {
    return sphere_distance(to_psi(g1), to_psi(g2));
}

ShootingVector sphere_log(const Psi& mu, const Psi& p) {
    require_shared_grid(mu.grid, p.grid, "sphere_log");
    const double ip = l2_inner(mu.values, p.values, mu.grid.spacing());
    const double theta = std::acos(std::clamp(ip, -1.0, 1.0));
    ShootingVector v{mu.grid, std::vector<double>(mu.grid.n, 0.0)};
    if (theta < kZeroAngle) return v;
    if (std::numbers::pi - theta < kAntipodalGap)
        throw GeometryError("sphere_log: undefined at antipodal points");
    const double scale = theta / std::sin(theta);
    const double c = std::cos(theta);
    for (int k = 0; k < mu.grid.n; ++k)
        v.values[k] = scale * (p.values[k] - c * mu.values[k]);
    return v;
}

Psi sphere_exp(const Psi& mu, const ShootingVector& v) {
    require_shared_grid(mu.grid, v.grid, "sphere_exp");
    const double h = mu.grid.spacing();
    const double norm = l2_norm(v.values, h);
    if (norm < kZeroAngle) return mu;
    const double c = std::cos(norm), s = std::sin(norm);
    std::vector<double> out(mu.grid.n);
    for (int k = 0; k < mu.grid.n; ++k)
        out[k] = c * mu.values[k] + s * v.values[k] / norm;
    const double onorm = l2_norm(out, h);
    for (double& x : out) x /= onorm;
    return Psi(mu.grid, std::move(out));
}

namespace {

struct TangentState {
    std::vector<ShootingVector> v;
    std::vector<double> vbar;
    double vbar_norm = 0.0;
    double cost = 0.0;
};

TangentState evaluate_tangents(const Psi& mu, const std::vector<Psi>& psis) {
    TangentState s;
    const int n = mu.grid.n;
    const double h = mu.grid.spacing();
    s.v.reserve(psis.size());
    s.vbar.assign(n, 0.0);
    for (const Psi& p : psis) {
        ShootingVector vi = sphere_log(mu, p);
        const double d = l2_norm(vi.values, h);
        s.cost += d * d;
        for (int k = 0; k < n; ++k) s.vbar[k] += vi.values[k];
        s.v.push_back(std::move(vi));
    }
    for (double& x : s.vbar) x /= static_cast<double>(psis.size());
    s.vbar_norm = l2_norm(s.vbar, h);
    return s;
}

} // namespace

KarcherMean karcher_mean_warps(const std::vector<Warp>& warps, const KarcherOptions& opts) {
    if (warps.empty()) throw std::invalid_argument("karcher_mean_warps: empty input");
    if (!(opts.step > 0.0)) throw std::invalid_argument("karcher_mean_warps: step must be positive");
    if (opts.max_iter < 1) throw std::invalid_argument("karcher_mean_warps: max_iter must be positive");
    const Grid& g = warps[0].grid;
    std::vector<Psi> psis;
    psis.reserve(warps.size());
    for (const Warp& w : warps) {
        require_shared_grid(g, w.grid, "karcher_mean_warps");
        psis.push_back(to_psi(w));
    }

    // Extrinsic mean projected back to the sphere; square-root densities are
    // nonnegative, so the projection never degenerates.
    std::vector<double> init(g.n, 0.0);
    for (const Psi& p : psis)
        for (int k = 0; k < g.n; ++k) init[k] += p.values[k];
    const double inorm = l2_norm(init, g.spacing());
    for (double& x : init) x /= inorm;
    Psi mu(g, std::move(init));

    KarcherMean result;
    TangentState cur = evaluate_tangents(mu, psis);
    result.cost_trace.push_back(cur.cost);
    for (int it = 1; it < opts.max_iter; ++it) {
        if (cur.vbar_norm <= opts.tol) break;
        std::vector<double> stepv(g.n);
        for (int k = 0; k < g.n; ++k) stepv[k] = opts.step * cur.vbar[k];
        Psi cand = sphere_exp(mu, ShootingVector{g, std::move(stepv)});
        TangentState next = evaluate_tangents(cand, psis);
        if (next.cost > cur.cost) break; // plateau: keep the better iterate
        mu = std::move(cand);
        cur = std::move(next);
        result.cost_trace.push_back(cur.cost);
    }
    result.converged = cur.vbar_norm <= opts.tol;
    result.iterations = static_cast<int>(result.cost_trace.size());
    result.mu_psi = mu;
    result.mean = from_psi(mu);
    result.shooting = std::move(cur.v);
    return result;
}

Warp invert_warp(const Warp& g) {
    std::vector<double> t = g.grid.points();
    std::vector<double> inv = interp_sorted(g.values, t, t);
    inv.front() = 0.0;
    inv.back() = 1.0;
    return Warp(g.grid, std::move(inv));
}

Warp compose_warps(const Warp& g1, const Warp& g2) {
    require_shared_grid(g1.grid, g2.grid, "compose_warps");
    std::vector<double> out = interp_uniform(g1.grid, g1.values, g2.values);
    out.front() = 0.0;
    out.back() = 1.0;
    return Warp(g1.grid, std::move(out));
}

} // namespace efda
