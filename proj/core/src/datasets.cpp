#include "efda/datasets.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "efda/numerics.hpp"
#include "efda/rng.hpp"

namespace efda {

namespace {

constexpr int kRecipeGridN = 101;

// Exponential warp on [0, 1]: identity at a = 0, log-slope a otherwise.
double exp_warp(double a, double u) {
    if (a == 0.0) return u;
    return std::expm1(a * u) / std::expm1(a);
}

Warp make_exp_warp(const Grid& g, double a) {
    std::vector<double> v(g.n);
    for (int k = 0; k < g.n; ++k) v[k] = exp_warp(a, g.point(k));
    return Warp(g, std::move(v));
}

SimulatedSet gen_bimodal_class(int n, Rng& rng, double mean1, double mean2,
                               double slope_lo, double slope_hi) {
    if (n < 2) throw std::invalid_argument("gen_bimodal: need at least 2 functions");
    const Grid g = unit_grid(kRecipeGridN);
    SimulatedSet set;
    for (int i = 0; i < n; ++i) {
        const double z1 = rng.normal(mean1, 0.25);
        const double z2 = rng.normal(mean2, 0.25);
        std::vector<double> y(g.n);
        for (int k = 0; k < g.n; ++k) {
            const double s = -3.0 + 6.0 * g.point(k);
            y[k] = z1 * std::exp(-0.5 * (s - 1.5) * (s - 1.5)) +
                   z2 * std::exp(-0.5 * (s + 1.5) * (s + 1.5));
        }
        SampledFunction amp(g, std::move(y));
        const double a = slope_lo + (slope_hi - slope_lo) * i / (n - 1);
        Warp w = make_exp_warp(g, a);
        set.observed.emplace_back(g, interp_uniform(g, amp.values, w.values));
        set.truth_amplitude.push_back(std::move(amp));
        set.truth_warps.push_back(std::move(w));
    }
    set.domain_lo = -3.0;
    set.domain_hi = 3.0;
    return set;
}

} // namespace

SimulatedSet gen_unimodal(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_unimodal: need at least 2 functions");
    Rng rng(seed);
    const Grid g = unit_grid(kRecipeGridN);
    SimulatedSet set;
    set.recipe = "unimodal";
    set.seed = seed;
    set.domain_lo = -6.0;
    set.domain_hi = 6.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(1.0, 0.05);
        const double a = rng.normal(0.0, 1.25);
        std::vector<double> y(g.n);
        for (int k = 0; k < g.n; ++k) {
            const double s = -6.0 + 12.0 * g.point(k);
            y[k] = z * std::exp(-0.5 * (s - a) * (s - a));
        }
        set.observed.emplace_back(g, y);
        set.truth_amplitude.emplace_back(g, std::move(y));
        set.truth_warps.push_back(identity_warp(g));
    }
    return set;
}

SimulatedSet gen_bimodal(int n, std::uint64_t seed) {
    Rng rng(seed);
    SimulatedSet set = gen_bimodal_class(n, rng, 1.0, 1.0, -1.0, 1.0);
    set.recipe = "bimodal";
    set.seed = seed;
    return set;
}

SimulatedSet gen_unimodal_spread(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_unimodal_spread: need at least 2 functions");
    Rng rng(seed);
    const Grid g = unit_grid(kRecipeGridN);
    SimulatedSet set;
    set.recipe = "unimodal-spread";
    set.seed = seed;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(1.0, 0.05);
        const double b = 0.15 + 0.7 * i / (n - 1);
        std::vector<double> y(g.n);
        for (int k = 0; k < g.n; ++k) {
            const double t = g.point(k);
            y[k] = z * std::exp(-(t - b) * (t - b) / 0.005);
        }
        set.observed.emplace_back(g, y);
        set.truth_amplitude.emplace_back(g, std::move(y));
        set.truth_warps.push_back(identity_warp(g));
    }
    return set;
}

SimulatedSet gen_two_class(int n_per_class, std::uint64_t seed) {
    Rng rng(seed);
    SimulatedSet a = gen_bimodal_class(n_per_class, rng, 1.0, 1.0, -1.0, 1.0);
    SimulatedSet b = gen_bimodal_class(n_per_class, rng, 1.4, 0.7, 2.0, 5.0);
    SimulatedSet set;
    set.recipe = "two-class";
    set.seed = seed;
    set.domain_lo = a.domain_lo;
    set.domain_hi = a.domain_hi;
    for (int i = 0; i < n_per_class; ++i) {
        set.observed.push_back(std::move(a.observed[i]));
        set.truth_amplitude.push_back(std::move(a.truth_amplitude[i]));
        set.truth_warps.push_back(std::move(a.truth_warps[i]));
        set.labels.emplace_back("A");
    }
    for (int i = 0; i < n_per_class; ++i) {
        set.observed.push_back(std::move(b.observed[i]));
        set.truth_amplitude.push_back(std::move(b.truth_amplitude[i]));
        set.truth_warps.push_back(std::move(b.truth_warps[i]));
        set.labels.emplace_back("B");
    }
    return set;
}

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, int row, int col) {
    const char* first = cell.data();
    const char* last = first + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || first == last)
        throw ParseError("load_csv: cell is not a number", row, col);
    return value;
}

} // namespace

CsvTable load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("load_csv: missing header row", 1, 1);
    const std::vector<std::string> header = split_line(line);
    const int cols = static_cast<int>(header.size());
    if (cols < 2) throw ParseError("load_csv: need a t column and at least one function", 1, 1);

    std::vector<double> t;
    std::vector<std::vector<double>> fn(cols - 1);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() && in.eof()) break;
        const std::vector<std::string> cells = split_line(line);
        if (static_cast<int>(cells.size()) != cols)
            throw ParseError("load_csv: expected " + std::to_string(cols) + " cells, found " +
                                 std::to_string(cells.size()),
                             row, static_cast<int>(cells.size()));
        t.push_back(parse_cell(cells[0], row, 1));
        for (int c = 1; c < cols; ++c) fn[c - 1].push_back(parse_cell(cells[c], row, c + 1));
    }
    const int n = static_cast<int>(t.size());
    if (n < 3) throw ParseError("load_csv: need at least 3 data rows", row, 1);

    // Strictly increasing, uniform within 1e-6 relative spacing.
    const double mean_dt = (t.back() - t.front()) / (n - 1);
    if (!(mean_dt > 0.0)) throw ParseError("load_csv: t must be increasing", 2, 1);
    for (int k = 1; k < n; ++k) {
        const double dt = t[k] - t[k - 1];
        if (!(dt > 0.0)) throw ParseError("load_csv: t must be strictly increasing", k + 2, 1);
        if (std::abs(dt - mean_dt) > 1e-6 * std::abs(mean_dt))
            throw ParseError("load_csv: t must be uniformly spaced", k + 2, 1);
    }

    CsvTable table;
    table.domain_lo = t.front();
    table.domain_hi = t.back();
    table.names.assign(header.begin() + 1, header.end());
    const Grid g = unit_grid(n);
    for (int c = 0; c < cols - 1; ++c) {
        for (int k = 0; k < n; ++k)
            if (!std::isfinite(fn[c][k]))
                throw ParseError("load_csv: non-finite value", k + 2, c + 2);
        table.functions.emplace_back(g, std::move(fn[c]));
    }
    return table;
}

CsvTable load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_json: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("load_json: " + std::string(e.what()));
    }
    try {
        const auto domain = j.at("domain");
        if (!domain.is_array() || domain.size() != 2)
            throw std::invalid_argument("load_json: domain must be [lo, hi]");
        CsvTable table;
        table.domain_lo = domain[0].get<double>();
        table.domain_hi = domain[1].get<double>();
        if (!(table.domain_hi > table.domain_lo))
            throw std::invalid_argument("load_json: domain must be increasing");
        const int n = j.at("grid_n").get<int>();
        if (n < 3) throw std::invalid_argument("load_json: grid_n must be at least 3");
        const auto& fns = j.at("functions");
        if (!fns.is_array() || fns.empty())
            throw std::invalid_argument("load_json: functions must be a non-empty array");
        const Grid g = unit_grid(n);
        for (const auto& row : fns) {
            std::vector<double> v = row.get<std::vector<double>>();
            if (static_cast<int>(v.size()) != n)
                throw std::invalid_argument("load_json: every function needs grid_n values");
            table.functions.emplace_back(g, std::move(v));
        }
        if (j.contains("labels")) {
            table.names = j.at("labels").get<std::vector<std::string>>();
            if (table.names.size() != table.functions.size())
                throw std::invalid_argument("load_json: one label per function required");
        } else {
            for (size_t i = 0; i < table.functions.size(); ++i)
                table.names.push_back("f" + std::to_string(i + 1));
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("load_json: " + std::string(e.what()));
    }
}

void save_csv(const std::string& path, const std::vector<SampledFunction>& fs,
              const std::vector<std::string>& names, double domain_lo, double domain_hi) {
    if (fs.empty()) throw std::invalid_argument("save_csv: nothing to write");
    if (names.size() != fs.size())
        throw std::invalid_argument("save_csv: one name per function required");
    if (!(domain_hi > domain_lo)) throw std::invalid_argument("save_csv: empty domain");
    const Grid& g = fs[0].grid;
    for (const auto& f : fs) require_shared_grid(g, f.grid, "save_csv");

    std::ostringstream out;
    out << "t";
    for (const auto& name : names) out << "," << name;
    out << "\n";
    for (int k = 0; k < g.n; ++k) {
        const double u = (g.point(k) - g.t0) / (g.t1 - g.t0);
        const double t = domain_lo + (domain_hi - domain_lo) * u;
        out << format_double(t);
        for (const auto& f : fs) out << "," << format_double(f.values[k]);
        out << "\n";
    }

    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("save_csv: cannot open " + tmp.string());
        file << out.str();
        if (!file.flush()) throw std::runtime_error("save_csv: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

} // namespace efda
