// Command-line pipeline: simulate, align, fpca, fit, sample, classify.
// Every artifact is plain CSV/JSON written atomically; the effective
// configuration is echoed into each output directory as config.json.
//
// Exit codes: 0 success (warnings allowed), 2 usage or data error,
// 3 numeric or convergence failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "efda/align.hpp"
#include "efda/classify.hpp"
#include "efda/datasets.hpp"
#include "efda/fpca.hpp"
#include "efda/genmodel.hpp"
#include "efda/model_io.hpp"
#include "efda/numerics.hpp"
#include "efda/rng.hpp"
#include "efda/srsf.hpp"
#include "efda/warp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out.empty() ? "." : out);
    fs::create_directories(dir);
    return dir;
}

// Functional-data inputs accept both table formats, picked by extension.
efda::CsvTable load_table(const std::string& path) {
    if (fs::path(path).extension() == ".json") return efda::load_json(path);
    return efda::load_csv(path);
}

std::vector<std::string> numbered_names(std::size_t n, const std::string& prefix) {
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = prefix + std::to_string(i + 1);
    return names;
}

// Warps live on [0, 1]; artifacts present them in the data's natural domain
// on both axes so they plot directly against the functions.
efda::SampledFunction warp_as_function(const efda::Warp& g, double lo, double hi) {
    std::vector<double> v(g.values.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = lo + (hi - lo) * g.values[k];
    return efda::SampledFunction(g.grid, std::move(v));
}

efda::Warp function_as_warp(const efda::SampledFunction& f, double lo, double hi) {
    std::vector<double> v(f.values.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (f.values[k] - lo) / (hi - lo);
    return efda::Warp(f.grid, std::move(v));
}

std::vector<efda::SampledFunction> smooth_all(std::vector<efda::SampledFunction> fs,
                                              int iterations) {
    if (iterations > 0)
        for (auto& f : fs) f = efda::smooth_box(f, iterations);
    return fs;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string recipe;
    int n = 0; // 0: recipe default; two-class counts per class
    std::uint64_t seed = 0;
    std::string out = ".";
};

int run_simulate(const SimulateArgs& a) {
    if (a.n != 0 && a.n < 2)
        throw std::invalid_argument("simulate: --n must be at least 2");

    efda::SimulatedSet set;
    int n = a.n;
    if (a.recipe == "unimodal") {
        set = efda::gen_unimodal(n ? n : 21, a.seed);
    } else if (a.recipe == "bimodal") {
        set = efda::gen_bimodal(n ? n : 21, a.seed);
    } else if (a.recipe == "unimodal-spread") {
        set = efda::gen_unimodal_spread(n ? n : 39, a.seed);
    } else if (a.recipe == "two-class") {
        set = efda::gen_two_class(n ? n : 20, a.seed);
    } else {
        std::cerr << "efda simulate: unknown recipe '" << a.recipe
                  << "' (valid recipes: bimodal, two-class, unimodal, unimodal-spread)\n";
        return 2;
    }

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "simulate"},
                                              {"recipe", set.recipe},
                                              {"n", static_cast<int>(set.observed.size())},
                                              {"seed", set.seed},
                                              {"out", a.out}});

    std::vector<std::string> names =
        set.labels.empty() ? numbered_names(set.observed.size(), "f") : set.labels;
    efda::save_csv((dir / "observed.csv").string(), set.observed, names, set.domain_lo,
                   set.domain_hi);
    efda::save_csv((dir / "truth_amplitude.csv").string(), set.truth_amplitude, names,
                   set.domain_lo, set.domain_hi);
    std::vector<efda::SampledFunction> warps;
    warps.reserve(set.truth_warps.size());
    for (const auto& g : set.truth_warps)
        warps.push_back(warp_as_function(g, set.domain_lo, set.domain_hi));
    efda::save_csv((dir / "truth_warps.csv").string(), warps, names, set.domain_lo,
                   set.domain_hi);
    return 0;
}

// ---------------------------------------------------------------------------
// align

struct AlignArgs {
    std::string in;
    std::string out = ".";
    int smooth_iters = 0;
    int lattice_n = 241;
    int slope_cap = 7;
};

int run_align(const AlignArgs& a) {
    const efda::CsvTable table = load_table(a.in);
    const auto fns = smooth_all(table.functions, a.smooth_iters);

    efda::SeparationOptions opts;
    opts.dp.lattice_n = a.lattice_n;
    opts.dp.slope_cap = a.slope_cap;
    const efda::SeparationResult res = efda::separate(fns, opts);
    const efda::VarianceDecomposition var = efda::variance_decomposition(fns, res);

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "align"},
                                              {"in", a.in},
                                              {"smooth_iters", a.smooth_iters},
                                              {"lattice_n", a.lattice_n},
                                              {"slope_cap", a.slope_cap},
                                              {"out", a.out}});

    efda::save_csv((dir / "aligned.csv").string(), res.aligned, table.names, table.domain_lo,
                   table.domain_hi);
    std::vector<efda::SampledFunction> warps;
    warps.reserve(res.warps.size());
    for (const auto& g : res.warps)
        warps.push_back(warp_as_function(g, table.domain_lo, table.domain_hi));
    efda::save_csv((dir / "warps.csv").string(), warps, table.names, table.domain_lo,
                   table.domain_hi);
    efda::save_csv((dir / "karcher_mean.csv").string(), {res.mean_function}, {"mean"},
                   table.domain_lo, table.domain_hi);

    json variance{{"original_variance", var.original},
                  {"amplitude_variance", var.amplitude},
                  {"phase_variance", var.phase}};
    if (res.warnings > 0) variance["warnings"] = res.warnings;
    write_json_file(dir / "variance.json", variance);
    return 0;
}

// ---------------------------------------------------------------------------
// fpca / fit share the decomposition pipeline

struct Decomposition {
    efda::CsvTable table;
    std::vector<efda::Srsf> srsfs;
    std::vector<efda::Warp> warps;
    efda::VerticalFpca vertical_full;
    efda::HorizontalFpca horizontal_full;
    efda::VerticalFpca vertical;
    efda::HorizontalFpca horizontal;
};

Decomposition decompose(const std::string& aligned_path, const std::string& warps_path,
                        double energy_threshold) {
    Decomposition d;
    d.table = efda::load_csv(aligned_path);
    const efda::CsvTable warp_table = efda::load_csv(warps_path);
    if (warp_table.functions.size() != d.table.functions.size())
        throw std::invalid_argument("fpca: aligned and warp files disagree on function count");
    efda::require_shared_grid(d.table.functions.front().grid,
                              warp_table.functions.front().grid, "fpca inputs");

    d.srsfs.reserve(d.table.functions.size());
    for (const auto& f : d.table.functions) d.srsfs.push_back(efda::to_srsf(f));
    d.warps.reserve(warp_table.functions.size());
    for (const auto& f : warp_table.functions)
        d.warps.push_back(function_as_warp(f, warp_table.domain_lo, warp_table.domain_hi));

    const int n = static_cast<int>(d.srsfs.size());
    const int grid_n = d.table.functions.front().grid.n;
    d.vertical_full = efda::vertical_fpca(d.srsfs, std::min(n - 1, grid_n + 1));
    d.horizontal_full = efda::horizontal_fpca(d.warps, std::min(n, grid_n));

    const auto pick = [energy_threshold](const Eigen::VectorXd& sv) {
        return efda::select_components({sv.data(), static_cast<std::size_t>(sv.size())},
                                       energy_threshold);
    };
    d.vertical = efda::truncate(d.vertical_full, pick(d.vertical_full.singular_values));
    d.horizontal = efda::truncate(d.horizontal_full, pick(d.horizontal_full.singular_values));
    return d;
}

// Full-rank reconstruction check behind `fpca --verify`: both bases must
// reproduce their training vectors to near machine precision.
double verify_reconstruction(const Decomposition& d) {
    double worst = 0.0;
    const int grid_n = d.table.functions.front().grid.n;
    const auto& v = d.vertical_full;
    for (std::size_t i = 0; i < d.srsfs.size(); ++i) {
        Eigen::VectorXd h(grid_n + 1);
        for (int k = 0; k < grid_n; ++k) h[k] = d.srsfs[i].values[k];
        h[grid_n] = d.srsfs[i].f0;
        const Eigen::VectorXd rebuilt =
            v.mu_h + v.directions * v.coefficients.row(static_cast<int>(i)).transpose();
        worst = std::max(worst, (h - rebuilt).cwiseAbs().maxCoeff());
    }
    const auto& hz = d.horizontal_full;
    for (std::size_t i = 0; i < d.warps.size(); ++i) {
        const efda::ShootingVector sv = efda::sphere_log(hz.mu_psi, efda::to_psi(d.warps[i]));
        Eigen::VectorXd raw(sv.values.size());
        for (std::size_t k = 0; k < sv.values.size(); ++k) raw[static_cast<int>(k)] = sv.values[k];
        const Eigen::VectorXd rebuilt =
            hz.directions * hz.coefficients.row(static_cast<int>(i)).transpose();
        worst = std::max(worst, (raw - rebuilt).cwiseAbs().maxCoeff());
    }
    return worst;
}

struct FpcaArgs {
    std::string aligned;
    std::string warps;
    std::string out = ".";
    double energy_threshold = 0.95;
    bool verify = false;
};

int run_fpca(const FpcaArgs& a) {
    const Decomposition d = decompose(a.aligned, a.warps, a.energy_threshold);

    if (a.verify) {
        const double worst = verify_reconstruction(d);
        if (!(worst <= 1e-8))
            throw efda::NumericError("fpca --verify: full-rank reconstruction error " +
                                     efda::format_double(worst) + " exceeds 1e-8");
        std::cout << "verify: full-rank reconstruction error " << efda::format_double(worst)
                  << " (within 1e-8)\n";
    }

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "fpca"},
                                              {"aligned", a.aligned},
                                              {"warps", a.warps},
                                              {"energy_threshold", a.energy_threshold},
                                              {"verify", a.verify},
                                              {"out", a.out}});

    json vert = efda::to_json(d.vertical);
    vert["format_version"] = 1;
    vert["kind"] = "vertical-fpca";
    write_json_file(dir / "vertical_basis.json", vert);
    json horiz = efda::to_json(d.horizontal);
    horiz["format_version"] = 1;
    horiz["kind"] = "horizontal-fpca";
    write_json_file(dir / "horizontal_basis.json", horiz);

    const int k1 = static_cast<int>(d.vertical.singular_values.size());
    const int k2 = static_cast<int>(d.horizontal.singular_values.size());
    std::ostringstream coeffs;
    coeffs << "function";
    for (int j = 1; j <= k1; ++j) coeffs << ",vertical_" << j;
    for (int j = 1; j <= k2; ++j) coeffs << ",horizontal_" << j;
    coeffs << "\n";
    for (std::size_t i = 0; i < d.table.functions.size(); ++i) {
        coeffs << d.table.names[i];
        for (int j = 0; j < k1; ++j)
            coeffs << ',' << efda::format_double(d.vertical.coefficients(static_cast<int>(i), j));
        for (int j = 0; j < k2; ++j)
            coeffs << ','
                   << efda::format_double(d.horizontal.coefficients(static_cast<int>(i), j));
        coeffs << "\n";
    }
    write_text_atomic(dir / "coefficients.csv", coeffs.str());

    // One row per (component, tau): the component's function-space path,
    // sampled on the input grid. tau = 0 rows reproduce the mean.
    const int grid_n = d.table.functions.front().grid.n;
    std::ostringstream paths;
    paths << "component,tau";
    for (int k = 1; k <= grid_n; ++k) paths << ",x" << k;
    paths << "\n";
    const double taus[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    for (int j = 1; j <= std::min(3, k1); ++j) {
        for (double tau : taus) {
            const efda::SampledFunction f = efda::principal_path_vertical(d.vertical, j, tau);
            paths << "vertical_" << j << ',' << efda::format_double(tau);
            for (double y : f.values) paths << ',' << efda::format_double(y);
            paths << "\n";
        }
    }
    for (int j = 1; j <= std::min(3, k2); ++j) {
        for (double tau : taus) {
            const efda::Warp g = efda::principal_path_horizontal(d.horizontal, j, tau);
            const efda::SampledFunction f =
                warp_as_function(g, d.table.domain_lo, d.table.domain_hi);
            paths << "horizontal_" << j << ',' << efda::format_double(tau);
            for (double y : f.values) paths << ',' << efda::format_double(y);
            paths << "\n";
        }
    }
    write_text_atomic(dir / "principal_paths.csv", paths.str());
    return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string aligned;
    std::string warps;
    std::string out = ".";
    std::string family = "gaussian";
    std::string gaussian_mode = "full-joint";
    double energy_threshold = 0.95;
};

int run_fit(const FitArgs& a) {
    const Decomposition d = decompose(a.aligned, a.warps, a.energy_threshold);
    const std::vector<efda::CoefficientSample> samples =
        efda::collect_coefficients(d.vertical, d.horizontal, d.srsfs);

    json model_json;
    if (a.family == "gaussian") {
        const efda::GaussianMode mode = a.gaussian_mode == "diagonal-blocks"
                                            ? efda::GaussianMode::diagonal_blocks
                                            : efda::GaussianMode::full_joint;
        model_json = efda::to_json(efda::fit_gaussian(samples, mode, d.vertical, d.horizontal));
    } else {
        model_json = efda::to_json(efda::fit_kde(samples, d.vertical, d.horizontal));
    }
    model_json["domain"] = json::array({d.table.domain_lo, d.table.domain_hi});

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "fit"},
                                              {"aligned", a.aligned},
                                              {"warps", a.warps},
                                              {"model", a.family},
                                              {"gaussian_mode", a.gaussian_mode},
                                              {"energy_threshold", a.energy_threshold},
                                              {"out", a.out}});
    write_json_file(dir / "model.json", model_json);
    return 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
    std::string model;
    int n = 10;
    std::uint64_t seed = 0;
    std::string out = ".";
};

int run_sample(const SampleArgs& a) {
    if (a.n < 0) throw std::invalid_argument("sample: --n must be non-negative");

    std::ifstream in(a.model);
    if (!in) throw std::invalid_argument("sample: cannot open " + a.model);
    json j;
    double lo = 0.0;
    double hi = 1.0;
    efda::GenerativeModel model;
    try {
        in >> j;
        if (j.contains("domain")) {
            lo = j.at("domain").at(0).get<double>();
            hi = j.at("domain").at(1).get<double>();
        }
        model = efda::model_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument("sample: bad model file: " + std::string(e.what()));
    }
    if (!(hi > lo)) throw std::invalid_argument("sample: bad model domain");

    const efda::Grid grid = std::visit([](const auto& m) { return m.vertical.grid; }, model);
    const efda::Grid warp_grid =
        std::visit([](const auto& m) { return m.horizontal.mu_psi.grid; }, model);
    if (!grid.matches(warp_grid))
        throw std::invalid_argument("sample: model amplitude and phase grids disagree");

    efda::Rng rng(a.seed);
    std::vector<efda::SampledFunction> composed;
    std::vector<efda::SampledFunction> amplitudes;
    std::vector<efda::SampledFunction> warps;
    for (int i = 0; i < a.n; ++i) {
        const efda::FunctionDraw draw =
            std::visit([&rng](const auto& m) { return efda::sample(m, rng); }, model);
        composed.push_back(draw.composed);
        amplitudes.push_back(draw.amplitude);
        warps.push_back(warp_as_function(draw.warp, lo, hi));
    }

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "sample"},
                                              {"model", a.model},
                                              {"n", a.n},
                                              {"seed", a.seed},
                                              {"out", a.out}});
    if (a.n == 0) {
        write_text_atomic(dir / "samples.csv", "t\n");
        write_text_atomic(dir / "amplitudes_sampled.csv", "t\n");
        write_text_atomic(dir / "warps_sampled.csv", "t\n");
        return 0;
    }
    const std::vector<std::string> names = numbered_names(composed.size(), "s");
    efda::save_csv((dir / "samples.csv").string(), composed, names, lo, hi);
    efda::save_csv((dir / "amplitudes_sampled.csv").string(), amplitudes, names, lo, hi);
    efda::save_csv((dir / "warps_sampled.csv").string(), warps, names, lo, hi);
    return 0;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
    std::string in;
    std::string out = ".";
    int folds = 5;
    std::uint64_t seed = 0;
    int smooth_iters = 0;
    double energy_threshold = 0.95;
    std::string gaussian_mode = "diagonal-blocks";
    int lattice_n = 241;
    int slope_cap = 7;
};

json report_block(const efda::CvReport& r) {
    return json{{"fold_accuracy", r.fold_accuracy},
                {"mean_accuracy", r.mean_accuracy},
                {"sd_accuracy", r.sd_accuracy},
                {"confusion", r.confusion}};
}

std::string accuracy_cell(const efda::CvReport& r, int rule) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f (%.3f)", r.mean_accuracy[rule], r.sd_accuracy[rule]);
    return buf;
}

int run_classify(const ClassifyArgs& a) {
    const efda::CsvTable table = load_table(a.in);
    std::vector<efda::LabeledFunction> data;
    data.reserve(table.functions.size());
    for (std::size_t i = 0; i < table.functions.size(); ++i)
        data.push_back({table.names[i], table.functions[i]});

    efda::ClassifyOptions opts;
    opts.smooth_iterations = a.smooth_iters;
    opts.energy_threshold = a.energy_threshold;
    opts.gaussian_mode = a.gaussian_mode == "full-joint" ? efda::GaussianMode::full_joint
                                                         : efda::GaussianMode::diagonal_blocks;
    opts.separation.dp.lattice_n = a.lattice_n;
    opts.separation.dp.slope_cap = a.slope_cap;

    opts.family = efda::ModelFamily::gaussian;
    const efda::CvReport gauss = efda::kfold_cv(data, opts, a.folds, a.seed);
    opts.family = efda::ModelFamily::kde;
    const efda::CvReport kde = efda::kfold_cv(data, opts, a.folds, a.seed);

    const fs::path dir = prepare_out(a.out);
    write_json_file(dir / "config.json", json{{"subcommand", "classify"},
                                              {"in", a.in},
                                              {"folds", a.folds},
                                              {"seed", a.seed},
                                              {"smooth_iters", a.smooth_iters},
                                              {"energy_threshold", a.energy_threshold},
                                              {"gaussian_mode", a.gaussian_mode},
                                              {"lattice_n", a.lattice_n},
                                              {"slope_cap", a.slope_cap},
                                              {"out", a.out}});

    json report{{"format_version", 1},
                {"folds", gauss.folds},
                {"seed", gauss.seed},
                {"labels", gauss.labels},
                {"rules", gauss.rule_names},
                {"gaussian", report_block(gauss)},
                {"kde", report_block(kde)}};
    write_json_file(dir / "report.json", report);

    std::ostringstream tbl;
    tbl << "rule,Gaussian,Kernel Density\n";
    for (int rule = 0; rule < 4; ++rule)
        tbl << efda::kRuleNames[rule] << ',' << accuracy_cell(gauss, rule) << ','
            << accuracy_cell(kde, rule) << "\n";
    write_text_atomic(dir / "table.csv", tbl.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Elastic analysis of functional data: phase-amplitude separation, "
        "functional PCA, generative models, and classification."};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "Generate a seeded synthetic dataset");
    sim->add_option("--recipe", sim_args.recipe,
                    "Recipe: bimodal, two-class, unimodal, unimodal-spread")
        ->required();
    sim->add_option("--n", sim_args.n,
                    "Number of functions (two-class: per class); 0 = recipe default");
    sim->add_option("--seed", sim_args.seed, "RNG seed")->required();
    sim->add_option("--out", sim_args.out, "Output directory");

    AlignArgs align_args;
    CLI::App* align = app.add_subcommand("align", "Separate phase and amplitude");
    align->add_option("--in", align_args.in, "Input functions (CSV)")->required();
    align->add_option("--smooth-iters", align_args.smooth_iters, "Box-smoothing passes");
    align->add_option("--lattice-n", align_args.lattice_n, "Max DP lattice nodes per axis");
    align->add_option("--slope-cap", align_args.slope_cap, "Max DP segment slope numerator");
    align->add_option("--out", align_args.out, "Output directory");

    FpcaArgs fpca_args;
    CLI::App* fpca = app.add_subcommand("fpca", "Amplitude and phase principal components");
    fpca->add_option("--aligned", fpca_args.aligned, "Aligned functions (CSV)")->required();
    fpca->add_option("--warps", fpca_args.warps, "Warping functions (CSV)")->required();
    fpca->add_option("--energy-threshold", fpca_args.energy_threshold,
                     "Cumulative energy cutoff in (0, 1]");
    fpca->add_flag("--verify", fpca_args.verify, "Check full-rank reconstruction");
    fpca->add_option("--out", fpca_args.out, "Output directory");

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Fit a generative model to aligned data");
    fit->add_option("--aligned", fit_args.aligned, "Aligned functions (CSV)")->required();
    fit->add_option("--warps", fit_args.warps, "Warping functions (CSV)")->required();
    fit->add_option("--model", fit_args.family, "Model family")
        ->check(CLI::IsMember({"gaussian", "kde"}));
    fit->add_option("--gaussian-mode", fit_args.gaussian_mode, "Gaussian covariance structure")
        ->check(CLI::IsMember({"diagonal-blocks", "full-joint"}));
    fit->add_option("--energy-threshold", fit_args.energy_threshold,
                    "Cumulative energy cutoff in (0, 1]");
    fit->add_option("--out", fit_args.out, "Output directory");

    SampleArgs sample_args;
    CLI::App* sample = app.add_subcommand("sample", "Draw functions from a fitted model");
    sample->add_option("--model", sample_args.model, "Model file (JSON)")->required();
    sample->add_option("--n", sample_args.n, "Number of draws");
    sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
    sample->add_option("--out", sample_args.out, "Output directory");

    ClassifyArgs classify_args;
    CLI::App* classify =
        app.add_subcommand("classify", "Cross-validated classification report");
    classify->add_option("--in", classify_args.in, "Labeled functions (CSV, labels in header)")
        ->required();
    classify->add_option("--folds", classify_args.folds, "Cross-validation folds");
    classify->add_option("--seed", classify_args.seed, "Shuffle seed")->required();
    classify->add_option("--smooth-iters", classify_args.smooth_iters, "Box-smoothing passes");
    classify->add_option("--energy-threshold", classify_args.energy_threshold,
                         "Cumulative energy cutoff in (0, 1]");
    classify->add_option("--gaussian-mode", classify_args.gaussian_mode,
                         "Gaussian covariance structure")
        ->check(CLI::IsMember({"diagonal-blocks", "full-joint"}));
    classify->add_option("--lattice-n", classify_args.lattice_n, "Max DP lattice nodes per axis");
    classify->add_option("--slope-cap", classify_args.slope_cap,
                         "Max DP segment slope numerator");
    classify->add_option("--out", classify_args.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (align->parsed()) return run_align(align_args);
        if (fpca->parsed()) return run_fpca(fpca_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (sample->parsed()) return run_sample(sample_args);
        if (classify->parsed()) return run_classify(classify_args);
    } catch (const efda::ParseError& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 2;
    } catch (const efda::NumericError& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 3;
    } catch (const efda::GeometryError& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "efda: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
