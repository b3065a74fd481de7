#pragma once

#include <utility>
#include <vector>

#include "efda/srsf.hpp"
#include "efda/warp.hpp"

namespace efda {

struct DpSettings {
    int lattice_n = 241;  // cap on DP nodes per axis; grids below this run exact
    int slope_cap = 7;    // admissible segment slopes p/q with p, q <= slope_cap
};

// Monotone lattice for the alignment DP. Slopes are the coprime pairs
// (drow, dcol) within the cap, ordered by closeness to (1, 1) and then by
// smaller drow; this order is the tie-break rule for equal-cost paths.
struct DpLattice {
    int n = 0;
    int slope_cap = 0;
    std::vector<std::pair<int, int>> slopes;
};

DpLattice make_lattice(int n, int slope_cap);

// Globally optimal warp over lattice paths for
//   min_gamma || q1 - (q2 o gamma) sqrt(gamma') ||^2,
// with per-segment endpoint-trapezoid quadrature under constant segment
// slope. Requires lattice.n == grid.n. cost_out, when given, receives the
// exact DP objective of the returned path.
Warp optimal_warp(const Srsf& q1, const Srsf& q2, const DpLattice& lattice,
                  double* cost_out = nullptr);

// optimal_warp with the subsampling policy applied: inputs are resampled
// down to at most settings.lattice_n nodes, the warp is interpolated back.
Warp align_pair(const Srsf& q1, const Srsf& q2, const DpSettings& settings);

// Amplitude distance: residual L2 gap after optimally warping f2 toward f1.
double amplitude_distance(const SampledFunction& f1, const SampledFunction& f2,
                          const DpSettings& settings = {});

struct SeparationOptions {
    DpSettings dp{};
    double tol = 1e-4; // on the L2 increment of the mean SRSF
    int max_iter = 20;
    KarcherOptions karcher{};
};

struct SeparationResult {
    std::vector<SampledFunction> aligned; // same initial values as the inputs
    std::vector<Srsf> aligned_srsf;
    std::vector<Warp> warps;
    Srsf mean_srsf;                 // centered template, f0 = mean initial value
    SampledFunction mean_function;  // integral of the template
    std::vector<double> cost_trace; // sum of squared residuals, non-increasing
    int iterations = 0;
    bool converged = false;
    int warnings = 0; // nonzero when the loop or the warp mean stopped early
};

// Phase-amplitude separation: iteratively warps every function onto the
// evolving mean SRSF, then centers the result so the Karcher mean of the
// returned warps is the identity.
SeparationResult separate(const std::vector<SampledFunction>& fs,
                          const SeparationOptions& opts = {});

struct VarianceDecomposition {
    double original = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

// original: cross-sectional variance of the inputs; amplitude: of the
// aligned functions; phase: of the mean function composed with each warp.
VarianceDecomposition variance_decomposition(const std::vector<SampledFunction>& fs,
                                             const SeparationResult& result);

} // namespace efda
