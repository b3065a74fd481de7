#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace efda {

// Uniform sampling grid on [t0, t1]. All functions, SRSFs and warps in this
// library live on such grids; n >= 3 so that second-order difference stencils
// are always applicable.
struct Grid {
    double t0 = 0.0;
    double t1 = 1.0;
    int n = 0;

    Grid() = default;
    Grid(double a, double b, int count) : t0(a), t1(b), n(count) {
        if (!(std::isfinite(a) && std::isfinite(b)))
            throw std::invalid_argument("Grid: endpoints must be finite");
        if (b <= a) throw std::invalid_argument("Grid: t1 must exceed t0");
        if (count < 3) throw std::invalid_argument("Grid: need at least 3 samples");
    }

    double spacing() const { return (t1 - t0) / (n - 1); }

    double point(int k) const { return t0 + k * (t1 - t0) / (n - 1); }

    std::vector<double> points() const {
        std::vector<double> t(n);
        for (int k = 0; k < n; ++k) t[k] = point(k);
        return t;
    }

    bool matches(const Grid& other, double tol = 1e-12) const {
        return n == other.n && std::abs(t0 - other.t0) <= tol &&
               std::abs(t1 - other.t1) <= tol;
    }
};

inline Grid unit_grid(int n) { return Grid(0.0, 1.0, n); }

// A function sampled on a uniform grid; values[k] = f(grid.point(k)).
struct SampledFunction {
    Grid grid;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw std::invalid_argument("SampledFunction: value count must equal grid.n");
        for (double x : values)
            if (!std::isfinite(x))
                throw std::invalid_argument("SampledFunction: values must be finite");
    }
};

inline void require_shared_grid(const Grid& a, const Grid& b, const char* what) {
    if (!a.matches(b)) throw std::invalid_argument(std::string(what) + ": grids differ");
}

} // namespace efda
