#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "efda/align.hpp"
#include "efda/genmodel.hpp"

namespace efda {

enum class ModelFamily { gaussian, kde };

struct ClassifyOptions {
    int smooth_iterations = 0;      // box-filter passes applied to every function
    double energy_threshold = 0.95; // component selection for all three bases
    ModelFamily family = ModelFamily::gaussian;
    GaussianMode gaussian_mode = GaussianMode::diagonal_blocks;
    SeparationOptions separation{};
};

using ChannelDensity = std::variant<GaussianDensity, KdeDensity>;

double log_density(const ChannelDensity& d, const Eigen::VectorXd& x);

// Everything learned about one class: its separation, the truncated bases,
// the amplitude density over (f0, c), the phase density over z, and the
// no-separation baseline (PCA of the smoothed functions themselves).
struct ClassModel {
    std::string label;
    SeparationResult separation;
    VerticalFpca vertical;
    HorizontalFpca horizontal;
    ChannelDensity amplitude_density;
    ChannelDensity phase_density;
    PcaBasis baseline;
    ChannelDensity baseline_density;
};

struct TrainedClassifier {
    std::vector<ClassModel> classes; // in first-appearance order of labels
    ClassifyOptions options;
    Grid grid;
};

struct LabeledFunction {
    std::string label;
    SampledFunction function;
};

TrainedClassifier train(const std::vector<LabeledFunction>& data, const ClassifyOptions& opts);

// All rules run the same per-class pipeline (smooth, one DP alignment to the
// class template, project) and pick the argmax log-likelihood; ties go to
// the earlier class. A class whose phase projection is geometrically
// undefined (antipodal) scores -inf for the rules that need it.
std::string classify_amplitude(const TrainedClassifier& clf, const SampledFunction& f);
std::string classify_phase(const TrainedClassifier& clf, const SampledFunction& f);
std::string classify_joint(const TrainedClassifier& clf, const SampledFunction& f);
std::string classify_baseline_l2(const TrainedClassifier& clf, const SampledFunction& f);

inline constexpr const char* kRuleNames[4] = {"amplitude only", "phase only",
                                              "phase and amplitude", "standard L2"};

struct CvReport {
    std::vector<std::string> labels;     // class labels in training order
    std::vector<std::string> rule_names; // kRuleNames
    std::vector<std::vector<double>> fold_accuracy; // [rule][fold]
    std::vector<double> mean_accuracy;              // [rule]
    std::vector<double> sd_accuracy;                // [rule], sample sd over folds
    std::vector<std::vector<std::vector<int>>> confusion; // [rule][true][predicted]
    int folds = 0;
    std::uint64_t seed = 0;
};

// Stratified k-fold cross validation: per class, a seeded shuffle followed
// by round-robin fold assignment, so fold sizes differ by at most one within
// each class.
CvReport kfold_cv(const std::vector<LabeledFunction>& data, const ClassifyOptions& opts, int k,
                  std::uint64_t seed);

} // namespace efda
