#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

#include "efda/classify.hpp"
#include "efda/datasets.hpp"
#include "efda/numerics.hpp"
#include "efda/rng.hpp"

using namespace efda;
using testutil::throws_with;

namespace {

std::vector<LabeledFunction> as_data(const SimulatedSet& s) {
    std::vector<LabeledFunction> d;
    for (size_t i = 0; i < s.observed.size(); ++i) d.push_back({s.labels[i], s.observed[i]});
    return d;
}

int count_correct(const TrainedClassifier& clf, const std::vector<LabeledFunction>& data,
                  std::string (*rule)(const TrainedClassifier&, const SampledFunction&)) {
    int ok = 0;
    for (const auto& d : data)
        if (rule(clf, d.function) == d.label) ++ok;
    return ok;
}

} // namespace

TEST_CASE("resubstitution separates the two simulated classes") {
    const SimulatedSet s = gen_two_class(8, 1);
    const auto data = as_data(s);
    const TrainedClassifier clf = train(data, ClassifyOptions{});

    REQUIRE(clf.classes.size() == 2);
    CHECK(clf.classes[0].label == "A"); // first-appearance order
    CHECK(clf.classes[1].label == "B");
    CHECK(clf.grid.matches(s.observed[0].grid));

    CHECK(count_correct(clf, data, classify_phase) == 16);
    CHECK(count_correct(clf, data, classify_joint) == 16);
    CHECK(count_correct(clf, data, classify_baseline_l2) == 16);
    // The two classes differ mostly in phase; amplitude alone is weaker but
    // still clearly better than the 8/16 chance level.
    CHECK(count_correct(clf, data, classify_amplitude) >= 10);

    // A warped copy of a class-A function keeps its amplitude and should not
    // change the joint decision.
    Rng wr(77);
    const Grid g = s.observed[0].grid;
    const SampledFunction warped(
        g, interp_uniform(g, s.observed[0].values, testutil::random_warp(g, wr, 0.2).values));
    CHECK(classify_joint(clf, warped) == "A");

    // The pointwise class mean is a prototypical class-A function.
    std::vector<double> mean(g.n, 0.0);
    for (int i = 0; i < 8; ++i)
        for (int k = 0; k < g.n; ++k) mean[k] += s.observed[i].values[k] / 8.0;
    CHECK(classify_joint(clf, SampledFunction(g, mean)) == "A");
}

TEST_CASE("equalizing one channel collapses the joint rule onto the other") {
    const SimulatedSet s = gen_two_class(8, 1);
    const auto data = as_data(s);
    const TrainedClassifier clf = train(data, ClassifyOptions{});

    // Copy the phase channel (alignment template, warp basis, phase density)
    // from class A into class B: the phase scores tie everywhere, so the
    // joint rule must agree with the amplitude rule and the phase rule must
    // fall back to the earlier class.
    TrainedClassifier eq = clf;
    eq.classes[1].separation.mean_srsf = eq.classes[0].separation.mean_srsf;
    eq.classes[1].horizontal = eq.classes[0].horizontal;
    eq.classes[1].phase_density = eq.classes[0].phase_density;
    for (const auto& d : data) {
        CHECK(classify_joint(eq, d.function) == classify_amplitude(eq, d.function));
        CHECK(classify_phase(eq, d.function) == eq.classes[0].label);
    }

    // Same with the amplitude channel equalized: joint degenerates to phase.
    TrainedClassifier eq2 = clf;
    eq2.classes[1].separation.mean_srsf = eq2.classes[0].separation.mean_srsf;
    eq2.classes[1].vertical = eq2.classes[0].vertical;
    eq2.classes[1].amplitude_density = eq2.classes[0].amplitude_density;
    for (const auto& d : data)
        CHECK(classify_joint(eq2, d.function) == classify_phase(eq2, d.function));
}

TEST_CASE("leave-one-out cross validation: accuracy and report structure") {
    const SimulatedSet s = gen_two_class(6, 5);
    const auto data = as_data(s);
    const ClassifyOptions opts;
    const CvReport rep = kfold_cv(data, opts, 6, 5);

    CHECK(rep.labels == std::vector<std::string>{"A", "B"});
    REQUIRE(rep.rule_names.size() == 4);
    for (int r = 0; r < 4; ++r) CHECK(rep.rule_names[r] == kRuleNames[r]);
    CHECK(rep.folds == 6);
    CHECK(rep.seed == 5);

    REQUIRE(rep.fold_accuracy.size() == 4);
    REQUIRE(rep.mean_accuracy.size() == 4);
    REQUIRE(rep.sd_accuracy.size() == 4);
    for (int r = 0; r < 4; ++r) {
        REQUIRE(rep.fold_accuracy[r].size() == 6);
        for (double a : rep.fold_accuracy[r]) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
        }
        // mean and sample sd must match the per-fold accuracies exactly
        double m = 0.0;
        for (double a : rep.fold_accuracy[r]) m += a;
        m /= 6.0;
        CHECK(std::abs(rep.mean_accuracy[r] - m) <= 1e-15);
        double ss = 0.0;
        for (double a : rep.fold_accuracy[r]) ss += (a - m) * (a - m);
        CHECK(std::abs(rep.sd_accuracy[r] - std::sqrt(ss / 5.0)) <= 1e-12);
    }

    // Stratified folds test every sample exactly once: confusion rows count
    // each class's 6 functions.
    REQUIRE(rep.confusion.size() == 4);
    for (int r = 0; r < 4; ++r) {
        REQUIRE(rep.confusion[r].size() == 2);
        for (int t = 0; t < 2; ++t) {
            REQUIRE(rep.confusion[r][t].size() == 2);
            CHECK(rep.confusion[r][t][0] + rep.confusion[r][t][1] == 6);
        }
    }

    // Phase separates these classes perfectly; the joint rule stays strong
    // and amplitude alone trails it.
    CHECK(rep.mean_accuracy[1] == 1.0);
    CHECK(rep.mean_accuracy[2] >= 0.8);
    CHECK(rep.mean_accuracy[3] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(rep.mean_accuracy[0] < rep.mean_accuracy[2]);

    // Same data, options, folds, and seed: the report is reproducible.
    const CvReport rep2 = kfold_cv(data, opts, 6, 5);
    CHECK(rep2.fold_accuracy == rep.fold_accuracy);
    CHECK(rep2.mean_accuracy == rep.mean_accuracy);
    CHECK(rep2.sd_accuracy == rep.sd_accuracy);
    CHECK(rep2.confusion == rep.confusion);
}

TEST_CASE("ties resolve to the earlier class") {
    const SimulatedSet s = gen_bimodal(4, 9);
    std::vector<LabeledFunction> data;
    for (int i = 0; i < 4; ++i) data.push_back({"A", s.observed[i]});
    for (int i = 0; i < 4; ++i) data.push_back({"B", s.observed[i]});
    const TrainedClassifier clf = train(data, ClassifyOptions{});
    CHECK(classify_joint(clf, s.observed[1]) == "A");
    CHECK(classify_amplitude(clf, s.observed[2]) == "A");
    CHECK(classify_baseline_l2(clf, s.observed[3]) == "A");
}

TEST_CASE("warp-only classes are separated by phase but not by amplitude") {
    const Grid g = unit_grid(101);
    std::vector<double> amp(g.n);
    for (int k = 0; k < g.n; ++k) {
        const double sc = -3.0 + 6.0 * g.point(k);
        amp[k] = std::exp(-0.5 * (sc - 1.5) * (sc - 1.5)) +
                 std::exp(-0.5 * (sc + 1.5) * (sc + 1.5));
    }
    // One shared amplitude, warped with disjoint slope ranges per class.
    std::vector<LabeledFunction> data;
    for (int i = 0; i < 6; ++i) {
        const Warp w = testutil::exp_warp(g, -1.0 + 0.8 * i / 5.0);
        data.push_back({"A", SampledFunction(g, interp_uniform(g, amp, w.values))});
    }
    for (int i = 0; i < 6; ++i) {
        const Warp w = testutil::exp_warp(g, 1.2 + 0.8 * i / 5.0);
        data.push_back({"B", SampledFunction(g, interp_uniform(g, amp, w.values))});
    }
    const TrainedClassifier clf = train(data, ClassifyOptions{});
    CHECK(count_correct(clf, data, classify_phase) == 12);
    CHECK(count_correct(clf, data, classify_amplitude) <= 8);
}

TEST_CASE("height-only classes are separated by amplitude and by raw L2") {
    const Grid g = unit_grid(101);
    Rng rng(11);
    std::vector<LabeledFunction> data;
    for (int cls = 0; cls < 2; ++cls) {
        for (int i = 0; i < 6; ++i) {
            const double z = rng.normal(cls == 0 ? 1.0 : 1.5, 0.05);
            std::vector<double> v(g.n);
            for (int k = 0; k < g.n; ++k) {
                const double t = g.point(k);
                v[k] = z * std::exp(-(t - 0.5) * (t - 0.5) / 0.02);
            }
            data.push_back({cls == 0 ? "A" : "B", SampledFunction(g, v)});
        }
    }
    const TrainedClassifier clf = train(data, ClassifyOptions{});
    CHECK(count_correct(clf, data, classify_amplitude) == 12);
    CHECK(count_correct(clf, data, classify_baseline_l2) == 12);
}

TEST_CASE("joint rule survives heavy warping at least as well as raw L2") {
    const SimulatedSet s = gen_two_class(10, 1);
    const auto data = as_data(s);
    const TrainedClassifier clf = train(data, ClassifyOptions{});
    const int joint_ok = count_correct(clf, data, classify_joint);
    const int base_ok = count_correct(clf, data, classify_baseline_l2);
    CHECK(joint_ok == 20);
    CHECK(joint_ok >= base_ok);
}

TEST_CASE("kernel density family trains and classifies the same data") {
    const SimulatedSet s = gen_two_class(8, 1);
    const auto data = as_data(s);
    ClassifyOptions opts;
    opts.family = ModelFamily::kde;
    const TrainedClassifier clf = train(data, opts);
    CHECK(count_correct(clf, data, classify_phase) == 16);
    CHECK(count_correct(clf, data, classify_joint) == 16);
    CHECK(count_correct(clf, data, classify_amplitude) >= 10);
    // scoring is deterministic
    CHECK(classify_joint(clf, data[3].function) == classify_joint(clf, data[3].function));
}

TEST_CASE("identical functions within a class train but cannot be scored") {
    // Zero spread collapses every channel covariance to zero; training
    // succeeds, but density evaluation is then singular by construction.
    const SimulatedSet s = gen_bimodal(2, 3);
    std::vector<LabeledFunction> data;
    for (int i = 0; i < 3; ++i) data.push_back({"A", s.observed[0]});
    for (int i = 0; i < 3; ++i) data.push_back({"B", s.observed[1]});
    const TrainedClassifier clf = train(data, ClassifyOptions{});
    CHECK(clf.classes.size() == 2);
    CHECK_THROWS_AS((void)classify_amplitude(clf, s.observed[0]), NumericError);
    CHECK(throws_with([&] { (void)classify_amplitude(clf, s.observed[0]); },
                      "gaussian log_density: covariance is singular despite ridge"));
}

TEST_CASE("training and query validation") {
    const SimulatedSet s = gen_two_class(3, 1);
    const auto data = as_data(s);

    CHECK(throws_with([&] { (void)train({}, ClassifyOptions{}); }, "train: empty training set"));

    std::vector<LabeledFunction> one_class;
    for (int i = 0; i < 3; ++i) one_class.push_back({"A", s.observed[i]});
    CHECK(throws_with([&] { (void)train(one_class, ClassifyOptions{}); },
                      "train: need at least 2 classes"));

    std::vector<LabeledFunction> small = one_class;
    small.push_back({"B", s.observed[3]});
    CHECK(throws_with([&] { (void)train(small, ClassifyOptions{}); },
                      "train: class 'B' has fewer than 2 samples"));

    const TrainedClassifier untrained;
    CHECK(throws_with([&] { (void)classify_joint(untrained, s.observed[0]); },
                      "classify: untrained classifier"));

    const TrainedClassifier clf = train(data, ClassifyOptions{});
    const SampledFunction off_grid(unit_grid(55), std::vector<double>(55, 1.0));
    CHECK(throws_with([&] { (void)classify_joint(clf, off_grid); }, "classify: grids differ"));

    CHECK(throws_with([&] { (void)kfold_cv(data, ClassifyOptions{}, 1, 0); },
                      "kfold_cv: need at least 2 folds"));
    CHECK(throws_with([&] { (void)kfold_cv(data, ClassifyOptions{}, 4, 0); },
                      "kfold_cv: class 'A' has fewer samples than folds"));
}
