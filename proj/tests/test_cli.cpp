#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "test_util.hpp"

#include "efda/datasets.hpp"

using namespace efda;
using nlohmann::json;
using testutil::run_cli;
using testutil::slurp;
using testutil::snapshot_tree;
using testutil::spit;
using testutil::TempDir;

namespace {

json parse_file(const std::string& path) { return json::parse(slurp(path)); }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// simulate -> align -> fpca -> fit, run once and shared across test cases.
struct CliPipeline {
    TempDir dir;
    std::string sim, al, fp, ft;
    testutil::CliResult sim_r, al_r, fp_r, ft_r;

    CliPipeline() {
        sim = dir.file("sim");
        al = dir.file("al");
        fp = dir.file("fp");
        ft = dir.file("ft");
        sim_r = run_cli("simulate --recipe bimodal --n 5 --seed 3 --out " + sim, dir);
        al_r = run_cli("align --in " + sim + "/observed.csv --out " + al, dir);
        fp_r = run_cli("fpca --aligned " + al + "/aligned.csv --warps " + al +
                           "/warps.csv --verify --out " + fp,
                       dir);
        ft_r = run_cli("fit --aligned " + al + "/aligned.csv --warps " + al +
                           "/warps.csv --model gaussian --gaussian-mode full-joint --out " + ft,
                       dir);
    }
};

CliPipeline& pipeline() {
    static CliPipeline p;
    return p;
}

void check_monotone_warp_table(const std::string& path, double lo, double hi) {
    const CsvTable t = load_csv(path);
    for (const auto& f : t.functions) {
        CHECK(f.values.front() == lo);
        CHECK(f.values.back() == hi);
        for (size_t k = 0; k + 1 < f.values.size(); ++k)
            CHECK(f.values[k + 1] >= f.values[k] - 1e-12);
    }
}

} // namespace

TEST_CASE("cli: bare call fails and help lists every subcommand") {
    TempDir d;
    CHECK(run_cli("", d).exit_code == 2);
    const auto help = run_cli("--help", d);
    CHECK(help.exit_code == 0);
    for (const char* sub : {"simulate", "align", "fpca", "fit", "sample", "classify"})
        CHECK(contains(help.out, sub));
}

TEST_CASE("cli simulate: seeded tables, config echo, and input validation") {
    CliPipeline& p = pipeline();
    REQUIRE(p.sim_r.exit_code == 0);

    const json cfg = parse_file(p.sim + "/config.json");
    CHECK(cfg.at("subcommand") == "simulate");
    CHECK(cfg.at("recipe") == "bimodal");
    CHECK(cfg.at("n") == 5);
    CHECK(cfg.at("seed") == 3);

    const CsvTable obs = load_csv(p.sim + "/observed.csv");
    REQUIRE(obs.functions.size() == 5);
    CHECK(obs.names == std::vector<std::string>{"f1", "f2", "f3", "f4", "f5"});
    CHECK(obs.functions[0].grid.matches(unit_grid(101)));
    CHECK(obs.domain_lo == 0.0);
    CHECK(obs.domain_hi == 1.0);
    CHECK(load_csv(p.sim + "/truth_amplitude.csv").functions.size() == 5);
    check_monotone_warp_table(p.sim + "/truth_warps.csv", 0.0, 1.0);

    // identical invocation, identical bytes
    const auto before = snapshot_tree(p.sim);
    CHECK(run_cli("simulate --recipe bimodal --n 5 --seed 3 --out " + p.sim, p.dir).exit_code ==
          0);
    CHECK(snapshot_tree(p.sim) == before);

    TempDir d;
    const auto bad = run_cli("simulate --recipe widget --seed 1 --out " + d.file("x"), d);
    CHECK(bad.exit_code == 2);
    CHECK(bad.err == "efda simulate: unknown recipe 'widget' "
                     "(valid recipes: bimodal, two-class, unimodal, unimodal-spread)\n");

    const auto small = run_cli("simulate --recipe bimodal --n 1 --seed 1 --out " + d.file("y"), d);
    CHECK(small.exit_code == 2);
    CHECK(contains(small.err, "simulate: --n must be at least 2"));

    CHECK(run_cli("simulate --recipe bimodal", d).exit_code == 2); // --seed is required
}

TEST_CASE("cli align: aligned functions, warps, mean, and variance summary") {
    CliPipeline& p = pipeline();
    REQUIRE(p.al_r.exit_code == 0);

    const CsvTable aligned = load_csv(p.al + "/aligned.csv");
    CHECK(aligned.functions.size() == 5);
    CHECK(aligned.names == load_csv(p.sim + "/observed.csv").names);
    check_monotone_warp_table(p.al + "/warps.csv", 0.0, 1.0);

    const CsvTable mean = load_csv(p.al + "/karcher_mean.csv");
    REQUIRE(mean.functions.size() == 1);
    CHECK(mean.names[0] == "mean");

    const json var = parse_file(p.al + "/variance.json");
    const double orig = var.at("original_variance").get<double>();
    const double amp = var.at("amplitude_variance").get<double>();
    const double phase = var.at("phase_variance").get<double>();
    CHECK(orig > 0.0);
    CHECK(amp >= 0.0);
    CHECK(phase >= 0.0);
    CHECK(amp < orig); // alignment removes the phase share
    if (var.contains("warnings")) CHECK(var.at("warnings").get<int>() >= 1);

    const auto before = snapshot_tree(p.al);
    CHECK(run_cli("align --in " + p.sim + "/observed.csv --out " + p.al, p.dir).exit_code == 0);
    CHECK(snapshot_tree(p.al) == before);
}

TEST_CASE("cli fpca: verified reconstruction, bases, coefficients, and paths") {
    CliPipeline& p = pipeline();
    REQUIRE(p.fp_r.exit_code == 0);
    CHECK(contains(p.fp_r.out, "verify: full-rank reconstruction error"));
    CHECK(contains(p.fp_r.out, "(within 1e-8)"));

    const json vert = parse_file(p.fp + "/vertical_basis.json");
    CHECK(vert.at("kind") == "vertical-fpca");
    CHECK(vert.at("format_version") == 1);
    const json horiz = parse_file(p.fp + "/horizontal_basis.json");
    CHECK(horiz.at("kind") == "horizontal-fpca");
    CHECK(horiz.at("format_version") == 1);

    const std::string coeffs = slurp(p.fp + "/coefficients.csv");
    CHECK(coeffs.rfind("function,vertical_1", 0) == 0);
    CHECK(std::count(coeffs.begin(), coeffs.end(), '\n') == 6); // header + 5 functions

    const std::string paths = slurp(p.fp + "/principal_paths.csv");
    CHECK(paths.rfind("component,tau,x1,", 0) == 0);
    CHECK(contains(paths, "vertical_1,-2,"));
    CHECK(contains(paths, "horizontal_1,0,"));

    const auto before = snapshot_tree(p.fp);
    CHECK(run_cli("fpca --aligned " + p.al + "/aligned.csv --warps " + p.al +
                      "/warps.csv --verify --out " + p.fp,
                  p.dir)
              .exit_code == 0);
    CHECK(snapshot_tree(p.fp) == before);
}

TEST_CASE("cli fit: model file carries family, mode, and data domain") {
    CliPipeline& p = pipeline();
    REQUIRE(p.ft_r.exit_code == 0);

    const json model = parse_file(p.ft + "/model.json");
    CHECK(model.at("format_version") == 1);
    CHECK(model.at("family") == "gaussian");
    CHECK(model.at("mode") == "full-joint");
    CHECK(model.at("domain") == json::array({0.0, 1.0}));

    const std::string kde_dir = p.dir.file("ft_kde");
    CHECK(run_cli("fit --aligned " + p.al + "/aligned.csv --warps " + p.al +
                      "/warps.csv --model kde --out " + kde_dir,
                  p.dir)
              .exit_code == 0);
    CHECK(parse_file(kde_dir + "/model.json").at("family") == "kde");

    const auto bad = run_cli("fit --aligned " + p.al + "/aligned.csv --warps " + p.al +
                                 "/warps.csv --model banana --out " + p.dir.file("ft_bad"),
                             p.dir);
    CHECK(bad.exit_code == 2);
    CHECK(!bad.err.empty());
}

TEST_CASE("cli sample: seeded draws, empty draw, and model validation") {
    CliPipeline& p = pipeline();
    REQUIRE(p.ft_r.exit_code == 0);
    const std::string sm = p.dir.file("sm");

    CHECK(run_cli("sample --model " + p.ft + "/model.json --n 4 --seed 9 --out " + sm, p.dir)
              .exit_code == 0);
    const CsvTable draws = load_csv(sm + "/samples.csv");
    REQUIRE(draws.functions.size() == 4);
    CHECK(draws.names == std::vector<std::string>{"s1", "s2", "s3", "s4"});
    CHECK(draws.functions[0].grid.matches(unit_grid(101)));
    CHECK(load_csv(sm + "/amplitudes_sampled.csv").functions.size() == 4);
    check_monotone_warp_table(sm + "/warps_sampled.csv", 0.0, 1.0);

    const auto before = snapshot_tree(sm);
    CHECK(run_cli("sample --model " + p.ft + "/model.json --n 4 --seed 9 --out " + sm, p.dir)
              .exit_code == 0);
    CHECK(snapshot_tree(sm) == before);

    const std::string empty = p.dir.file("sm0");
    CHECK(run_cli("sample --model " + p.ft + "/model.json --n 0 --seed 9 --out " + empty, p.dir)
              .exit_code == 0);
    CHECK(slurp(empty + "/samples.csv") == "t\n");
    CHECK(slurp(empty + "/amplitudes_sampled.csv") == "t\n");
    CHECK(slurp(empty + "/warps_sampled.csv") == "t\n");

    const auto neg =
        run_cli("sample --model " + p.ft + "/model.json --n -1 --seed 9 --out " + empty, p.dir);
    CHECK(neg.exit_code == 2);
    CHECK(contains(neg.err, "sample: --n must be non-negative"));

    const auto missing =
        run_cli("sample --model " + p.dir.file("nope.json") + " --seed 1 --out " + empty, p.dir);
    CHECK(missing.exit_code == 2);
    CHECK(contains(missing.err, "sample: cannot open"));

    const std::string garbage = p.dir.file("garbage.json");
    spit(garbage, "not json at all");
    const auto bad = run_cli("sample --model " + garbage + " --seed 1 --out " + empty, p.dir);
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.err, "sample: bad model file:"));

    json tampered = parse_file(p.ft + "/model.json");
    tampered["vertical"]["grid"]["t1"] = 2.0;
    const std::string tam = p.dir.file("tampered.json");
    spit(tam, tampered.dump());
    const auto mism = run_cli("sample --model " + tam + " --seed 1 --out " + empty, p.dir);
    CHECK(mism.exit_code == 2);
    CHECK(contains(mism.err, "sample: model amplitude and phase grids disagree"));

    json flat = parse_file(p.ft + "/model.json");
    flat["domain"] = json::array({0.0, 0.0});
    const std::string fl = p.dir.file("flat.json");
    spit(fl, flat.dump());
    const auto dom = run_cli("sample --model " + fl + " --seed 1 --out " + empty, p.dir);
    CHECK(dom.exit_code == 2);
    CHECK(contains(dom.err, "sample: bad model domain"));
}

TEST_CASE("cli classify: cross-validated report and summary table") {
    TempDir d;
    const std::string sim = d.file("sim");
    REQUIRE(run_cli("simulate --recipe two-class --n 3 --seed 1 --out " + sim, d).exit_code == 0);

    const std::string cl = d.file("cl");
    REQUIRE(run_cli("classify --in " + sim + "/observed.csv --folds 3 --seed 2 --out " + cl, d)
                .exit_code == 0);

    const json rep = parse_file(cl + "/report.json");
    CHECK(rep.at("format_version") == 1);
    CHECK(rep.at("folds") == 3);
    CHECK(rep.at("seed") == 2);
    CHECK(rep.at("labels") == json::array({"A", "B"}));
    REQUIRE(rep.at("rules").size() == 4);
    CHECK(rep.at("rules")[0] == "amplitude only");
    CHECK(rep.at("rules")[3] == "standard L2");
    for (const char* family : {"gaussian", "kde"}) {
        const json& block = rep.at(family);
        REQUIRE(block.at("fold_accuracy").size() == 4);
        for (const auto& per_rule : block.at("fold_accuracy")) REQUIRE(per_rule.size() == 3);
        CHECK(block.at("mean_accuracy").size() == 4);
        CHECK(block.at("sd_accuracy").size() == 4);
        const json& conf = block.at("confusion");
        REQUIRE(conf.size() == 4);
        for (const auto& per_rule : conf)
            for (const auto& row : per_rule)
                CHECK(row[0].get<int>() + row[1].get<int>() == 3);
    }

    const std::string table = slurp(cl + "/table.csv");
    CHECK(table.rfind("rule,Gaussian,Kernel Density\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK(contains(table, "\nphase and amplitude,"));

    const auto before = snapshot_tree(cl);
    CHECK(run_cli("classify --in " + sim + "/observed.csv --folds 3 --seed 2 --out " + cl, d)
              .exit_code == 0);
    CHECK(snapshot_tree(cl) == before);
}

TEST_CASE("cli input loading: malformed csv is located, json comes by extension") {
    TempDir d;
    const std::string bad = d.file("bad.csv");
    spit(bad, "t,f1,f2\n0,1,2\n0.5,3\n1,4,5\n");
    const auto r = run_cli("align --in " + bad + " --out " + d.file("x"), d);
    CHECK(r.exit_code == 2);
    CHECK(r.err.rfind("efda: ", 0) == 0);
    CHECK(contains(r.err, "(row 3"));

    const auto gone = run_cli("align --in " + d.file("gone.csv") + " --out " + d.file("y"), d);
    CHECK(gone.exit_code == 2);
    CHECK(contains(gone.err, "load_csv: cannot open"));

    // a JSON dataset is accepted wherever a CSV is, picked by extension
    json data;
    data["domain"] = json::array({0.0, 2.0});
    data["grid_n"] = 21;
    std::vector<std::vector<double>> fns(3, std::vector<double>(21));
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 21; ++k) {
            const double t = k / 20.0;
            fns[i][k] = std::sin(3.0 * t + 0.2 * i) + 0.1 * i;
        }
    data["functions"] = fns;
    data["labels"] = {"u", "v", "w"};
    const std::string jpath = d.file("data.json");
    spit(jpath, data.dump());
    const std::string aj = d.file("aj");
    CHECK(run_cli("align --in " + jpath + " --out " + aj, d).exit_code == 0);
    const CsvTable aligned = load_csv(aj + "/aligned.csv");
    CHECK(aligned.names == std::vector<std::string>{"u", "v", "w"});
    CHECK(aligned.domain_lo == 0.0);
    CHECK(aligned.domain_hi == 2.0);
}
