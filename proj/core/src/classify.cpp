#include "efda/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "efda/numerics.hpp"

namespace efda {

double log_density(const ChannelDensity& d, const Eigen::VectorXd& x) {
    return std::visit([&](const auto& inner) { return log_density(inner, x); }, d);
}

namespace {

ChannelDensity fit_channel(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean,
                           const ClassifyOptions& opts) {
    if (opts.family == ModelFamily::kde) return fit_kde_density(rows);
    return fit_gaussian_density(rows, mean,
                                opts.gaussian_mode == GaussianMode::diagonal_blocks);
}

ClassModel train_class(const std::string& label, const std::vector<SampledFunction>& fs,
                       const ClassifyOptions& opts) {
    ClassModel model;
    model.label = label;
    model.separation = separate(fs, opts.separation);

    const int n = static_cast<int>(fs.size());
    const int t = fs[0].grid.n;

    const int p1 = std::min(n - 1, t + 1);
    VerticalFpca vfull = vertical_fpca(model.separation.aligned_srsf, p1);
    const int k1 = select_components(
        std::span<const double>(vfull.singular_values.data(), vfull.singular_values.size()),
        opts.energy_threshold);
    model.vertical = truncate(vfull, k1);

    const int p2 = std::min(n, t);
    HorizontalFpca hfull =
        horizontal_fpca(model.separation.warps, p2, opts.separation.karcher);
    const int k2 = select_components(
        std::span<const double>(hfull.singular_values.data(), hfull.singular_values.size()),
        opts.energy_threshold);
    model.horizontal = truncate(hfull, k2);

    // Amplitude channel over (f0, c); the declared mean keeps f0 at its
    // sample mean and the centered coefficients at zero.
    Eigen::MatrixXd amp_rows(n, 1 + k1);
    for (int i = 0; i < n; ++i) {
        amp_rows(i, 0) = model.separation.aligned_srsf[i].f0;
        amp_rows.block(i, 1, 1, k1) = model.vertical.coefficients.row(i);
    }
    Eigen::VectorXd amp_mean = Eigen::VectorXd::Zero(1 + k1);
    amp_mean[0] = amp_rows.col(0).mean();
    model.amplitude_density = fit_channel(amp_rows, amp_mean, opts);

    // Phase channel over z; shooting vectors average out at the Karcher
    // mean, so the declared center is zero.
    model.phase_density = fit_channel(model.horizontal.coefficients,
                                      Eigen::VectorXd::Zero(k2), opts);

    // Baseline: PCA of the smoothed functions without any alignment.
    Eigen::MatrixXd raw(n, t);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < t; ++k) raw(i, k) = fs[i].values[k];
    PcaBasis bfull = fit_pca(raw, std::min(n - 1, t), quadrature_weights(fs[0].grid));
    const int kb = select_components(
        std::span<const double>(bfull.singular_values.data(), bfull.singular_values.size()),
        opts.energy_threshold);
    model.baseline = bfull;
    model.baseline.directions = bfull.directions.leftCols(kb);
    model.baseline.singular_values = bfull.singular_values.head(kb);
    model.baseline.energy_fraction = bfull.energy_fraction.head(kb);
    model.baseline.coefficients = bfull.coefficients.leftCols(kb);
    model.baseline_density =
        fit_channel(model.baseline.coefficients, Eigen::VectorXd::Zero(kb), opts);
    return model;
}

} // namespace

TrainedClassifier train(const std::vector<LabeledFunction>& data, const ClassifyOptions& opts) {
    if (data.empty()) throw std::invalid_argument("train: empty training set");
    const Grid& g = data[0].function.grid;
    std::vector<std::string> order;
    std::map<std::string, std::vector<SampledFunction>> groups;
    for (const auto& item : data) {
        require_shared_grid(g, item.function.grid, "train");
        if (!groups.count(item.label)) order.push_back(item.label);
        groups[item.label].push_back(smooth_box(item.function, opts.smooth_iterations));
    }
    if (order.size() < 2) throw std::invalid_argument("train: need at least 2 classes");

    TrainedClassifier clf;
    clf.options = opts;
    clf.grid = g;
    for (const auto& label : order) {
        if (groups[label].size() < 2)
            throw std::invalid_argument("train: class '" + label + "' has fewer than 2 samples");
        clf.classes.push_back(train_class(label, groups[label], opts));
    }
    return clf;
}

namespace {

struct ClassScores {
    double amplitude = 0.0;
    double phase = 0.0;
    double baseline = 0.0;
};

ClassScores score_class(const ClassModel& model, const SampledFunction& smoothed,
                        const Srsf& q, const ClassifyOptions& opts) {
    constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
    ClassScores s;

    const Warp gamma = align_pair(model.separation.mean_srsf, q, opts.separation.dp);
    const Srsf warped = warp_action(q, gamma);
    const int t = q.grid.n;
    const Eigen::VectorXd qw = quadrature_weights(q.grid);

    // Projections mirror training: inner products under the bases' metric.
    Eigen::VectorXd h(t + 1);
    for (int k = 0; k < t; ++k) h[k] = warped.values[k];
    h[t] = q.f0;
    Eigen::VectorXd hw(t + 1);
    hw.head(t) = qw;
    hw[t] = 1.0;
    const Eigen::VectorXd c = model.vertical.directions.transpose() *
                              hw.cwiseProduct(h - model.vertical.mu_h);
    Eigen::VectorXd amp(1 + c.size());
    amp[0] = q.f0;
    amp.tail(c.size()) = c;
    s.amplitude = log_density(model.amplitude_density, amp);

    try {
        const ShootingVector v = sphere_log(model.horizontal.mu_psi, to_psi(gamma));
        Eigen::VectorXd vv(t);
        for (int k = 0; k < t; ++k) vv[k] = v.values[k];
        const Eigen::VectorXd z =
            model.horizontal.directions.transpose() * qw.cwiseProduct(vv);
        s.phase = log_density(model.phase_density, z);
    } catch (const GeometryError&) {
        s.phase = kMinusInf;
    }

    Eigen::VectorXd raw(t);
    for (int k = 0; k < t; ++k) raw[k] = smoothed.values[k];
    const Eigen::VectorXd b = model.baseline.directions.transpose() *
                              qw.cwiseProduct(raw - model.baseline.mean);
    s.baseline = log_density(model.baseline_density, b);
    return s;
}

std::vector<ClassScores> score_all(const TrainedClassifier& clf, const SampledFunction& f) {
    if (clf.classes.empty()) throw std::invalid_argument("classify: untrained classifier");
    require_shared_grid(clf.grid, f.grid, "classify");
    const SampledFunction smoothed = smooth_box(f, clf.options.smooth_iterations);
    const Srsf q = to_srsf(smoothed);
    std::vector<ClassScores> scores;
    scores.reserve(clf.classes.size());
    for (const ClassModel& model : clf.classes)
        scores.push_back(score_class(model, smoothed, q, clf.options));
    return scores;
}

template <typename Score>
const std::string& argmax_label(const TrainedClassifier& clf,
                                const std::vector<ClassScores>& scores, Score&& score) {
    size_t best = 0;
    double best_score = score(scores[0]);
    for (size_t i = 1; i < scores.size(); ++i) {
        const double s = score(scores[i]);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return clf.classes[best].label;
}

} // namespace

std::string classify_amplitude(const TrainedClassifier& clf, const SampledFunction& f) {
    return argmax_label(clf, score_all(clf, f), [](const ClassScores& s) { return s.amplitude; });
}

std::string classify_phase(const TrainedClassifier& clf, const SampledFunction& f) {
    return argmax_label(clf, score_all(clf, f), [](const ClassScores& s) { return s.phase; });
}

std::string classify_joint(const TrainedClassifier& clf, const SampledFunction& f) {
    return argmax_label(clf, score_all(clf, f),
                        [](const ClassScores& s) { return s.amplitude + s.phase; });
}

std::string classify_baseline_l2(const TrainedClassifier& clf, const SampledFunction& f) {
    return argmax_label(clf, score_all(clf, f), [](const ClassScores& s) { return s.baseline; });
}

CvReport kfold_cv(const std::vector<LabeledFunction>& data, const ClassifyOptions& opts, int k,
                  std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_cv: need at least 2 folds");
    std::vector<std::string> order;
    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < data.size(); ++i) {
        if (!by_class.count(data[i].label)) order.push_back(data[i].label);
        by_class[data[i].label].push_back(i);
    }
    for (const auto& label : order)
        if (static_cast<int>(by_class[label].size()) < k)
            throw std::invalid_argument("kfold_cv: class '" + label + "' has fewer samples than folds");

    // Stratified assignment: seeded Fisher-Yates within each class (classes
    // consume the stream in first-appearance order), then round-robin.
    Rng rng(seed);
    std::vector<int> fold_of(data.size(), 0);
    for (const auto& label : order) {
        std::vector<size_t>& idx = by_class[label];
        for (size_t i = idx.size() - 1; i > 0; --i) {
            const size_t j = rng.uniform_index(i + 1);
            std::swap(idx[i], idx[j]);
        }
        for (size_t pos = 0; pos < idx.size(); ++pos)
            fold_of[idx[pos]] = static_cast<int>(pos % k);
    }

    const int n_labels = static_cast<int>(order.size());
    std::map<std::string, int> label_index;
    for (int i = 0; i < n_labels; ++i) label_index[order[i]] = i;

    CvReport report;
    report.labels = order;
    report.rule_names.assign(std::begin(kRuleNames), std::end(kRuleNames));
    report.folds = k;
    report.seed = seed;
    report.fold_accuracy.assign(4, std::vector<double>(k, 0.0));
    report.confusion.assign(
        4, std::vector<std::vector<int>>(n_labels, std::vector<int>(n_labels, 0)));

    for (int fold = 0; fold < k; ++fold) {
        std::vector<LabeledFunction> train_set;
        std::vector<size_t> test_idx;
        for (size_t i = 0; i < data.size(); ++i) {
            if (fold_of[i] == fold)
                test_idx.push_back(i);
            else
                train_set.push_back(data[i]);
        }
        const TrainedClassifier clf = train(train_set, opts);

        std::array<int, 4> correct{0, 0, 0, 0};
        for (size_t i : test_idx) {
            const std::vector<ClassScores> scores = score_all(clf, data[i].function);
            const std::string predictions[4] = {
                argmax_label(clf, scores, [](const ClassScores& s) { return s.amplitude; }),
                argmax_label(clf, scores, [](const ClassScores& s) { return s.phase; }),
                argmax_label(clf, scores,
                             [](const ClassScores& s) { return s.amplitude + s.phase; }),
                argmax_label(clf, scores, [](const ClassScores& s) { return s.baseline; }),
            };
            const int truth = label_index.at(data[i].label);
            for (int r = 0; r < 4; ++r) {
                const int pred = label_index.at(predictions[r]);
                report.confusion[r][truth][pred] += 1;
                if (pred == truth) correct[r] += 1;
            }
        }
        for (int r = 0; r < 4; ++r)
            report.fold_accuracy[r][fold] =
                static_cast<double>(correct[r]) / static_cast<double>(test_idx.size());
    }

    report.mean_accuracy.resize(4);
    report.sd_accuracy.resize(4);
    for (int r = 0; r < 4; ++r) {
        double mean = 0.0;
        for (double a : report.fold_accuracy[r]) mean += a;
        mean /= k;
        double ss = 0.0;
        for (double a : report.fold_accuracy[r]) ss += (a - mean) * (a - mean);
        report.mean_accuracy[r] = mean;
        report.sd_accuracy[r] = std::sqrt(ss / (k - 1));
    }
    return report;
}

} // namespace efda
