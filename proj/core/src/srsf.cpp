#include "efda/srsf.hpp"

#include <cmath>

#include "efda/numerics.hpp"

namespace efda {

Srsf::Srsf(Grid g, std::vector<double> v, double f0_) : grid(g), values(std::move(v)), f0(f0_) {
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("Srsf: value count must equal grid.n");
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("Srsf: values must be finite");
    if (!std::isfinite(f0)) throw std::invalid_argument("Srsf: f0 must be finite");
}

Srsf to_srsf(const SampledFunction& f) {
    std::vector<double> d = gradient(f.values, f.grid.spacing());
    for (double& x : d) {
        const double s = x < 0.0 ? -1.0 : 1.0;
        x = s * std::sqrt(std::abs(x));
    }
    return Srsf(f.grid, std::move(d), f.values.front());
}

SampledFunction from_srsf(const Srsf& q) {
    std::vector<double> integrand(q.values.size());
    for (size_t k = 0; k < integrand.size(); ++k)
        integrand[k] = q.values[k] * std::abs(q.values[k]);
    std::vector<double> f = cumtrapz(integrand, q.grid.spacing());
    for (double& x : f) x += q.f0;
    return SampledFunction(q.grid, std::move(f));
}

Srsf warp_action(const Srsf& q, const Warp& gamma) {
    require_shared_grid(q.grid, gamma.grid, "warp_action");
    std::vector<double> comp = interp_uniform(q.grid, q.values, gamma.values);
    std::vector<double> dg = gradient(gamma.values, gamma.grid.spacing());
    for (size_t k = 0; k < comp.size(); ++k)
        comp[k] *= std::sqrt(std::max(dg[k], 0.0));
    return Srsf(q.grid, std::move(comp), q.f0);
}

double l2_distance(const Srsf& q1, const Srsf& q2) {
    require_shared_grid(q1.grid, q2.grid, "l2_distance");
    std::vector<double> diff(q1.values.size());
    for (size_t k = 0; k < diff.size(); ++k) diff[k] = q1.values[k] - q2.values[k];
    return l2_norm(diff, q1.grid.spacing());
}

} // namespace efda
