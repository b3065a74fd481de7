#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "efda/grid.hpp"
#include "efda/warp.hpp"

namespace efda {

// CSV or recipe ingestion failure, located for error messages. Rows and
// columns are 1-based; row 1 is the header.
struct ParseError : std::runtime_error {
    int row = 0;
    int col = 0;
    ParseError(const std::string& msg, int r, int c)
        : std::runtime_error(msg + " (row " + std::to_string(r) + ", column " +
                             std::to_string(c) + ")"),
          row(r), col(c) {}
};

// One synthetic draw: observed functions on the canonical [0, 1] grid plus
// the amplitude/warp decomposition they were built from, so observed_i is
// truth_amplitude_i composed with truth_warps_i up to interpolation error.
struct SimulatedSet {
    std::string recipe;
    std::uint64_t seed = 0;
    double domain_lo = 0.0; // natural domain, used when writing CSV
    double domain_hi = 1.0;
    std::vector<SampledFunction> observed;
    std::vector<SampledFunction> truth_amplitude;
    std::vector<Warp> truth_warps;
    std::vector<std::string> labels; // per function; class names for two-class
};

// Gaussian bumps exp(-(t-a)^2/2) on [-6, 6] with random centers
// a ~ N(0, 1.25^2) and heights z ~ N(1, 0.05^2). Phase variability lives in
// the center shifts, so the truth warps are identities.
SimulatedSet gen_unimodal(int n, std::uint64_t seed);

// Two fixed peaks at +-1.5 on [-3, 3] with heights z ~ N(1, 0.25^2),
// composed with exponential warps of equally spaced log-slopes in [-1, 1]
// (the middle one is the identity when n is odd).
SimulatedSet gen_bimodal(int n, std::uint64_t seed);

// Sharp bumps exp(-(t-b)^2 / 0.005) on [0, 1] with centers equally spaced in
// [0.15, 0.85] and heights z ~ N(1, 0.05^2). The width (sd 0.05) keeps every
// bump's tails inside the domain, so alignment can remove nearly all of the
// cross-sectional variance; wider bumps leave warp-invariant boundary values
// that put a floor under the amplitude variance.
SimulatedSet gen_unimodal_spread(int n, std::uint64_t seed);

// Two labeled classes built on the two-peak recipe: class A is gen_bimodal;
// class B shifts the height means to (1.4, 0.7) and takes its warps from the
// disjoint log-slope range [2, 5], i.e. systematically delayed timing. The
// height means alone leave the classes overlapping (the peak-height gap is
// under two noise sds), so phase has to carry part of the class signal.
SimulatedSet gen_two_class(int n_per_class, std::uint64_t seed);

struct CsvTable {
    std::vector<SampledFunction> functions; // canonical [0, 1] grid
    std::vector<std::string> names;         // header names; labels for classification
    double domain_lo = 0.0;
    double domain_hi = 1.0;
};

// Layout: header row, first column t (strictly increasing, uniform within
// 1e-6 relative), one function per remaining column. The t axis is affinely
// mapped to [0, 1]; the original span is reported back for output mapping.
CsvTable load_csv(const std::string& path);

// JSON alternative to load_csv:
//   {"domain": [a, b], "grid_n": n, "functions": [[...], ...],
//    "labels": ["..."] (optional, one per function)}
// Missing labels default to f1..fn.
CsvTable load_json(const std::string& path);

// Exact inverse layout of load_csv; doubles are written shortest-roundtrip
// so save/load reproduces values bit for bit.
void save_csv(const std::string& path, const std::vector<SampledFunction>& fs,
              const std::vector<std::string>& names, double domain_lo, double domain_hi);

// Shortest-roundtrip decimal rendering used for all text output.
std::string format_double(double x);

} // namespace efda
