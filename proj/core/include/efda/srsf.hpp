#pragma once

#include <vector>

#include "efda/grid.hpp"
#include "efda/warp.hpp"

namespace efda {

// Square-root slope representation of a function: q = sign(f') sqrt(|f'|).
// Together with f0 = f(t0) this determines f, so the pair is a bijective
// encoding of absolutely continuous functions.
struct Srsf {
    Grid grid;
    std::vector<double> values;
    double f0 = 0.0;

    Srsf() = default;
    Srsf(Grid g, std::vector<double> v, double f0_);
};

Srsf to_srsf(const SampledFunction& f);

// f(t) = f0 + integral of q|q|.
SampledFunction from_srsf(const Srsf& q);

// Right action of a warp: (q, gamma) = (q o gamma) sqrt(gamma'). Preserves
// the L2 norm, which is what makes the representation elastic.
Srsf warp_action(const Srsf& q, const Warp& gamma);

double l2_distance(const Srsf& q1, const Srsf& q2);

} // namespace efda
