#pragma once

#include <span>
#include <vector>

#include "efda/grid.hpp"

namespace efda {

// Derivative on a uniform grid: second-order central differences in the
// interior, second-order one-sided stencils at both endpoints. Exact for
// quadratics everywhere including the boundary.
std::vector<double> gradient(std::span<const double> f, double spacing);

// Composite trapezoid rule over the whole grid.
double trapz(std::span<const double> f, double spacing);

// Running trapezoid integral; out[0] = 0, out[k] = integral up to t_k.
std::vector<double> cumtrapz(std::span<const double> f, double spacing);

// L2 inner product and norm under the trapezoid rule.
double l2_inner(std::span<const double> a, std::span<const double> b, double spacing);
double l2_norm(std::span<const double> a, double spacing);

// Repeated passes of the 3-point box filter [1/4, 1/2, 1/4]; endpoints are
// held fixed so the sampled range never shrinks.
std::vector<double> smooth_box(std::span<const double> f, int iterations);
SampledFunction smooth_box(const SampledFunction& f, int iterations);

// Linear interpolation of a uniformly sampled function at arbitrary query
// points. Queries outside [t0, t1] beyond a roundoff allowance raise a
// domain error.
double interp_uniform(const Grid& g, std::span<const double> values, double t);
std::vector<double> interp_uniform(const Grid& g, std::span<const double> values,
                                   std::span<const double> queries);

// Linear interpolation with non-uniform strictly increasing abscissae.
std::vector<double> interp_sorted(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> queries);

// Resample onto another uniform grid spanning the same domain.
SampledFunction resample(const SampledFunction& f, const Grid& target);

// Pointwise sample variance integrated over the domain:
//   (1/(n-1)) * trapz( sum_i (f_i - fbar)^2 ).
double cross_sectional_variance(const std::vector<SampledFunction>& fs);

} // namespace efda
