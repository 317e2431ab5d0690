#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imblab/feature_matrix.hpp"

namespace imblab {

enum class LossKind { kSquared, kPinball };

struct GbtLoss {
    LossKind kind = LossKind::kSquared;
    double tau = 0.5; // only meaningful for pinball

    static GbtLoss squared() { return {LossKind::kSquared, 0.5}; }
    static GbtLoss pinball(double tau) { return {LossKind::kPinball, tau}; }
};

struct GbtConfig {
    GbtLoss loss = GbtLoss::squared();
    double learning_rate = 0.1;
    int max_iterations = 200;
    int max_bins = 255;
    int max_leaf_nodes = 31;
    int min_samples_leaf = 20;
    double l2_regularization = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Binary regression tree over raw feature values. Internal nodes route
/// x <= threshold left; missing values follow missing_goes_left.
struct TreeNode {
    bool is_leaf = true;
    double leaf_value = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool missing_goes_left = true;
    int left = -1;
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    std::size_t leaf_count() const;
    /// Raw (unshrunk) output for one row; columns are in training order.
    double predict_row(const std::vector<const std::vector<double>*>& columns,
                       std::size_t row) const;
};

/// Per-feature histogram binning: thresholds at quantiles of the present
/// values (midpoints between distinct values when there are at most
/// max_bins of them), plus one reserved bin for missing entries.
struct BinnedFeatures {
    std::vector<std::vector<double>> thresholds;   // per feature, strictly increasing
    std::vector<std::vector<std::uint8_t>> codes;  // per feature, bin index per row
    std::vector<int> bin_counts;                   // non-missing bins per feature
    std::size_t n_rows = 0;

    /// The reserved missing bin for a feature is bin_counts[f].
    int missing_code(int feature) const { return bin_counts[feature]; }
};

/// Bins every column of m. Throws on a zero-row matrix or max_bins < 2.
BinnedFeatures bin_features(const FeatureMatrix& m, int max_bins);

/// Gradient-boosted tree ensemble. prediction = baseline + learning_rate *
/// sum of tree outputs.
struct GbtModel {
    GbtConfig config;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> bin_thresholds;
    double baseline = 0.0;
    std::vector<Tree> trees;
    /// Training loss per boosting round; entry 0 is the baseline-only loss,
    /// so the vector has max_iterations + 1 entries.
    std::vector<double> training_loss;

    /// Requires every training column (matched by name) to be present in m;
    /// extra columns are ignored. Throws on a missing column.
    std::vector<double> predict(const FeatureMatrix& m, int threads = 1) const;
};

/// Trains one model. Histogram building is data-parallel across features
/// with per-feature sequential accumulation, so results are bit-identical
/// for any thread count. Tie-breaks on equal split gain: lowest feature
/// index, then lowest threshold, missing routed left.
GbtModel fit(const FeatureMatrix& m, const std::vector<double>& target, const GbtConfig& config,
             int threads = 1);

/// The split fit would put at the root of the first tree for the given
/// per-sample gradients, with its histogram gain. found is false when no
/// candidate clears min_samples_leaf or the gain threshold. Exposed so tests
/// can cross-check histogram splits against exhaustive enumeration and
/// recompute gains from raw gradients.
struct RootSplitInfo {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    bool missing_left = true;
    double gain = 0.0;
};
RootSplitInfo root_split(const FeatureMatrix& m, const std::vector<double>& gradients,
                         const GbtConfig& config);

/// The four-model set used throughout: mean (squared loss) plus pinball
/// models at the 1st, 50th and 99th percentiles, identical hyperparameters.
struct QuantileSuite {
    GbtModel mean_model;
    GbtModel q01;
    GbtModel q50;
    GbtModel q99;
};

QuantileSuite fit_quantile_suite(const FeatureMatrix& m, const std::vector<double>& target,
                                 const GbtConfig& config, int threads = 1);

/// Training loss at the model's own loss kind (MSE for squared, mean
/// pinball for pinball).
double training_loss_value(const GbtLoss& loss, const std::vector<double>& target,
                           const std::vector<double>& predictions);

} // namespace imblab
