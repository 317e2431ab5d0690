#include "imblab/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "imblab/error.hpp"
#include "imblab/parallel.hpp"
#include "imblab/stats.hpp"

namespace imblab {

namespace {

// Suppresses splits whose gain is numerical noise relative to the parent
// score (keeps constant-gradient nodes unsplit regardless of sample count).
double min_gain_threshold(double parent_score) {
    return 1e-10 * std::max(1.0, std::abs(parent_score));
}

// Nodes run at least this many samples before histogram building fans out
// across features on multiple threads.
constexpr std::size_t kParallelHistMinRows = 8192;

struct HistEntry {
    double g = 0.0;
    std::uint32_t count = 0;
};

struct SplitChoice {
    bool valid = false;
    double gain = 0.0;
    int feature = -1;
    int bin = -1; // left side takes codes <= bin
    bool missing_left = true;
    double left_g = 0.0;
    std::uint32_t left_count = 0;
};

struct GrowNode {
    std::size_t begin = 0; // range in the sample index array
    std::size_t end = 0;
    double g_sum = 0.0;
    std::uint32_t count = 0;
    std::vector<HistEntry> hist;
    SplitChoice split;
    bool is_leaf = true;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
};

class TreeGrower {
public:
    TreeGrower(const BinnedFeatures& binned, const std::vector<double>& gradients,
               const GbtConfig& config, int threads)
        : binned_(binned), gradients_(gradients), config_(config), threads_(threads) {
        offsets_.resize(binned.bin_counts.size());
        std::size_t total = 0;
        for (std::size_t f = 0; f < binned.bin_counts.size(); ++f) {
            offsets_[f] = total;
            total += static_cast<std::size_t>(binned.bin_counts[f]) + 1; // + missing bin
        }
        hist_size_ = total;
        sample_idx_.resize(binned.n_rows);
        for (std::size_t i = 0; i < binned.n_rows; ++i) sample_idx_[i] = i;
        scratch_.resize(binned.n_rows);
    }

    // Root node with its best candidate computed (no splits applied yet).
    SplitChoice root_choice() {
        init_root();
        return nodes_[0].split;
    }

    // Grows the tree; returns node storage (empty split chain = single leaf).
    std::vector<GrowNode> grow() {
        init_root();
        push_candidate(0);

        int leaves = 1;
        while (leaves < config_.max_leaf_nodes && !queue_.empty()) {
            const Candidate top = queue_.top();
            queue_.pop();
            apply_split(top.node);
            ++leaves;
        }
        for (GrowNode& node : nodes_) {
            if (node.is_leaf)
                node.leaf_value =
                    -node.g_sum / (static_cast<double>(node.count) + config_.l2_regularization);
            node.hist.clear();
            node.hist.shrink_to_fit();
        }
        return std::move(nodes_);
    }

    const std::vector<std::size_t>& sample_indices() const { return sample_idx_; }

private:
    struct Candidate {
        double gain;
        std::uint64_t seq;
        int node;
        bool operator<(const Candidate& other) const {
            if (gain != other.gain) return gain < other.gain;
            return seq > other.seq; // FIFO among equal gains
        }
    };

    void init_root() {
        nodes_.clear();
        GrowNode root;
        root.begin = 0;
        root.end = binned_.n_rows;
        root.count = static_cast<std::uint32_t>(binned_.n_rows);
        double g = 0.0;
        for (std::size_t i = 0; i < binned_.n_rows; ++i) g += gradients_[i];
        root.g_sum = g;
        nodes_.push_back(std::move(root));
        build_histogram(0);
        find_best_split(0);
    }

    void push_candidate(int node_id) {
        if (nodes_[node_id].split.valid)
            queue_.push(Candidate{nodes_[node_id].split.gain, seq_counter_++, node_id});
    }

    void build_histogram(int node_id) {
        GrowNode& node = nodes_[node_id];
        node.hist.assign(hist_size_, HistEntry{});
        const std::size_t rows = node.end - node.begin;
        const int threads = rows >= kParallelHistMinRows ? threads_ : 1;
        parallel_for(binned_.bin_counts.size(), threads, [&](std::size_t f) {
            const std::vector<std::uint8_t>& codes = binned_.codes[f];
            HistEntry* slots = node.hist.data() + offsets_[f];
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t row = sample_idx_[i];
                HistEntry& e = slots[codes[row]];
                e.g += gradients_[row];
                e.count += 1;
            }
        });
    }

    // sibling = parent - child, bin by bin (counts are exact).
    void derive_histogram(int node_id, const GrowNode& parent, const GrowNode& child) {
        GrowNode& node = nodes_[node_id];
        node.hist.resize(hist_size_);
        for (std::size_t i = 0; i < hist_size_; ++i) {
            node.hist[i].g = parent.hist[i].g - child.hist[i].g;
            node.hist[i].count = parent.hist[i].count - child.hist[i].count;
        }
    }

    void find_best_split(int node_id) {
        GrowNode& node = nodes_[node_id];
        const double lambda = config_.l2_regularization;
        const double total_g = node.g_sum;
        const double total_count = static_cast<double>(node.count);
        const double parent_score = total_g * total_g / (total_count + lambda);
        const double min_gain = min_gain_threshold(0.5 * parent_score);
        const auto msl = static_cast<std::uint32_t>(config_.min_samples_leaf);

        SplitChoice best;
        for (std::size_t f = 0; f < binned_.bin_counts.size(); ++f) {
            const int n_bins = binned_.bin_counts[f];
            if (n_bins < 2) continue; // constant feature: nothing to split on
            const HistEntry* slots = node.hist.data() + offsets_[f];
            const HistEntry& missing = slots[n_bins];
            double prefix_g = 0.0;
            std::uint32_t prefix_count = 0;
            for (int b = 0; b + 1 < n_bins; ++b) {
                prefix_g += slots[b].g;
                prefix_count += slots[b].count;
                // Missing routed left first so an exact tie keeps it left.
                for (const bool missing_left : {true, false}) {
                    const double left_g = missing_left ? prefix_g + missing.g : prefix_g;
                    const std::uint32_t left_count =
                        missing_left ? prefix_count + missing.count : prefix_count;
                    const std::uint32_t right_count = node.count - left_count;
                    if (left_count < msl || right_count < msl) continue;
                    const double right_g = total_g - left_g;
                    const double gain =
                        0.5 * (left_g * left_g / (static_cast<double>(left_count) + lambda) +
                               right_g * right_g / (static_cast<double>(right_count) + lambda) -
                               parent_score);
                    if (gain <= min_gain) continue;
                    if (!best.valid || gain > best.gain) {
                        best.valid = true;
                        best.gain = gain;
                        best.feature = static_cast<int>(f);
                        best.bin = b;
                        best.missing_left = missing_left;
                        best.left_g = left_g;
                        best.left_count = left_count;
                    }
                }
            }
        }
        node.split = best;
    }

    void apply_split(int node_id) {
        const SplitChoice split = nodes_[node_id].split;
        const std::size_t begin = nodes_[node_id].begin;
        const std::size_t end = nodes_[node_id].end;

        // Stable two-way partition of the node's sample indices.
        const std::vector<std::uint8_t>& codes =
            binned_.codes[static_cast<std::size_t>(split.feature)];
        const int missing_code = binned_.missing_code(split.feature);
        std::size_t n_left = 0;
        std::size_t right_cursor = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t row = sample_idx_[i];
            const int code = codes[row];
            const bool left =
                code == missing_code ? split.missing_left : code <= split.bin;
            if (left)
                sample_idx_[begin + n_left++] = row;
            else
                scratch_[right_cursor++] = row;
        }
        std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(right_cursor),
                  sample_idx_.begin() + static_cast<std::ptrdiff_t>(begin + n_left));

        GrowNode left_node;
        left_node.begin = begin;
        left_node.end = begin + n_left;
        left_node.g_sum = split.left_g;
        left_node.count = split.left_count;

        GrowNode right_node;
        right_node.begin = begin + n_left;
        right_node.end = end;
        right_node.g_sum = nodes_[node_id].g_sum - split.left_g;
        right_node.count = nodes_[node_id].count - split.left_count;

        const int left_id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(left_node));
        const int right_id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(right_node));
        nodes_[node_id].is_leaf = false;
        nodes_[node_id].left = left_id;
        nodes_[node_id].right = right_id;

        // Build the smaller child directly, derive the sibling by subtraction.
        const bool left_smaller = nodes_[left_id].count <= nodes_[right_id].count;
        const int small = left_smaller ? left_id : right_id;
        const int large = left_smaller ? right_id : left_id;
        build_histogram(small);
        derive_histogram(large, nodes_[node_id], nodes_[small]);
        nodes_[node_id].hist.clear();
        nodes_[node_id].hist.shrink_to_fit();

        find_best_split(left_id);
        find_best_split(right_id);
        push_candidate(left_id);
        push_candidate(right_id);
    }

    const BinnedFeatures& binned_;
    const std::vector<double>& gradients_;
    const GbtConfig& config_;
    const int threads_;

    std::vector<std::size_t> offsets_;
    std::size_t hist_size_ = 0;
    std::vector<GrowNode> nodes_;
    std::vector<std::size_t> sample_idx_;
    std::vector<std::size_t> scratch_;
    std::priority_queue<Candidate> queue_;
    std::uint64_t seq_counter_ = 0;
};

// Converts grower nodes (bin splits) into a Tree over raw feature values.
Tree materialize_tree(const std::vector<GrowNode>& grown,
                      const std::vector<std::vector<double>>& thresholds) {
    Tree tree;
    tree.nodes.resize(grown.size());
    for (std::size_t i = 0; i < grown.size(); ++i) {
        const GrowNode& g = grown[i];
        TreeNode& n = tree.nodes[i];
        if (g.is_leaf) {
            n.is_leaf = true;
            n.leaf_value = g.leaf_value;
        } else {
            n.is_leaf = false;
            n.feature = g.split.feature;
            n.threshold =
                thresholds[static_cast<std::size_t>(g.split.feature)][static_cast<std::size_t>(
                    g.split.bin)];
            n.missing_goes_left = g.split.missing_left;
            n.left = g.left;
            n.right = g.right;
        }
    }
    return tree;
}

void compute_gradients(const GbtLoss& loss, const std::vector<double>& target,
                       const std::vector<double>& predictions, std::vector<double>& gradients) {
    const std::size_t n = target.size();
    if (loss.kind == LossKind::kSquared) {
        for (std::size_t i = 0; i < n; ++i) gradients[i] = predictions[i] - target[i];
    } else {
        const double tau = loss.tau;
        for (std::size_t i = 0; i < n; ++i)
            gradients[i] = target[i] > predictions[i] ? -tau : 1.0 - tau;
    }
}

} // namespace

void GbtConfig::validate() const {
    require(learning_rate > 0.0 && learning_rate <= 1.0, "GbtConfig: learning_rate ",
            learning_rate, " outside (0, 1]");
    require(max_iterations >= 0, "GbtConfig: max_iterations must be non-negative");
    require(max_bins >= 2 && max_bins <= 255, "GbtConfig: max_bins ", max_bins,
            " outside [2, 255]");
    require(max_leaf_nodes >= 2, "GbtConfig: max_leaf_nodes must be at least 2");
    require(min_samples_leaf >= 1, "GbtConfig: min_samples_leaf must be at least 1");
    require(l2_regularization >= 0.0, "GbtConfig: l2_regularization must be non-negative");
    if (loss.kind == LossKind::kPinball)
        require(loss.tau > 0.0 && loss.tau < 1.0, "GbtConfig: pinball tau ", loss.tau,
                " outside (0, 1)");
}

std::size_t Tree::leaf_count() const {
    std::size_t n = 0;
    for (const TreeNode& node : nodes)
        if (node.is_leaf) ++n;
    return n;
}

double Tree::predict_row(const std::vector<const std::vector<double>*>& columns,
                         std::size_t row) const {
    int at = 0;
    for (;;) {
        const TreeNode& node = nodes[static_cast<std::size_t>(at)];
        if (node.is_leaf) return node.leaf_value;
        const double x = (*columns[static_cast<std::size_t>(node.feature)])[row];
        const bool left = is_missing(x) ? node.missing_goes_left : x <= node.threshold;
        at = left ? node.left : node.right;
    }
}

BinnedFeatures bin_features(const FeatureMatrix& m, int max_bins) {
    m.validate();
    require(m.rows() > 0, "bin_features: zero-row matrix");
    require(max_bins >= 2 && max_bins <= 255, "bin_features: max_bins ", max_bins,
            " outside [2, 255]");

    const std::size_t n = m.rows();
    BinnedFeatures out;
    out.n_rows = n;
    out.thresholds.resize(m.cols());
    out.codes.resize(m.cols());
    out.bin_counts.resize(m.cols());

    for (std::size_t f = 0; f < m.cols(); ++f) {
        const std::vector<double>& col = m.columns[f];
        std::vector<double> present;
        present.reserve(n);
        for (double v : col)
            if (!is_missing(v)) present.push_back(v);
        std::sort(present.begin(), present.end());

        std::vector<double> distinct(present);
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        std::vector<double>& thr = out.thresholds[f];
        if (distinct.size() > 1) {
            if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
                thr.reserve(distinct.size() - 1);
                for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
                    thr.push_back(0.5 * (distinct[i] + distinct[i + 1]));
            } else {
                for (int b = 1; b < max_bins; ++b) {
                    const double q = quantile_sorted(
                        present, static_cast<double>(b) / static_cast<double>(max_bins));
                    if (thr.empty() || q > thr.back()) thr.push_back(q);
                }
            }
        }
        const int n_bins = static_cast<int>(thr.size()) + 1;
        out.bin_counts[f] = n_bins;

        std::vector<std::uint8_t>& codes = out.codes[f];
        codes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = col[i];
            if (is_missing(v)) {
                codes[i] = static_cast<std::uint8_t>(n_bins);
            } else {
                const auto it = std::lower_bound(thr.begin(), thr.end(), v);
                codes[i] = static_cast<std::uint8_t>(it - thr.begin());
            }
        }
    }
    return out;
}

double training_loss_value(const GbtLoss& loss, const std::vector<double>& target,
                           const std::vector<double>& predictions) {
    const std::size_t n = target.size();
    require(n > 0 && n == predictions.size(), "training_loss_value: length mismatch");
    double sum = 0.0;
    if (loss.kind == LossKind::kSquared) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = target[i] - predictions[i];
            sum += d * d;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = target[i] - predictions[i];
            sum += d >= 0.0 ? loss.tau * d : (loss.tau - 1.0) * d;
        }
    }
    return sum / static_cast<double>(n);
}

GbtModel fit(const FeatureMatrix& m, const std::vector<double>& target, const GbtConfig& config,
             int threads) {
    config.validate();
    m.validate();
    const std::size_t n = m.rows();
    require(n == target.size(), "fit: ", n, " rows but ", target.size(), " targets");
    require(n >= 2 * static_cast<std::size_t>(config.min_samples_leaf),
            "fit: need at least 2 * min_samples_leaf = ", 2 * config.min_samples_leaf,
            " rows, got ", n);
    for (std::size_t i = 0; i < n; ++i)
        require(std::isfinite(target[i]), "fit: non-finite target at row ", i);

    const BinnedFeatures binned = bin_features(m, config.max_bins);

    GbtModel model;
    model.config = config;
    model.feature_names = m.column_names;
    model.bin_thresholds = binned.thresholds;
    model.baseline = config.loss.kind == LossKind::kSquared
                         ? mean_of(target)
                         : quantile(target, config.loss.tau);

    std::vector<double> predictions(n, model.baseline);
    std::vector<double> gradients(n);
    model.training_loss.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
    model.training_loss.push_back(training_loss_value(config.loss, target, predictions));

    std::vector<double> residuals;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        compute_gradients(config.loss, target, predictions, gradients);
        TreeGrower grower(binned, gradients, config, threads);
        std::vector<GrowNode> grown = grower.grow();
        if (grown.size() > 1) {
            const std::vector<std::size_t>& order = grower.sample_indices();
            if (config.loss.kind == LossKind::kPinball) {
                // Mean-negative-gradient leaves move pinball predictions by
                // at most learning_rate per round, far too slow for MW-scale
                // targets; refit each leaf to the tau-quantile of its
                // residuals instead (the usual quantile-GBT leaf update).
                for (GrowNode& node : grown) {
                    if (!node.is_leaf) continue;
                    residuals.clear();
                    residuals.reserve(node.end - node.begin);
                    for (std::size_t i = node.begin; i < node.end; ++i) {
                        const std::size_t row = order[i];
                        residuals.push_back(target[row] - predictions[row]);
                    }
                    std::sort(residuals.begin(), residuals.end());
                    node.leaf_value = quantile_sorted(residuals, config.loss.tau);
                }
            }
            // Update predictions leaf by leaf via the final sample partition.
            for (const GrowNode& node : grown) {
                if (!node.is_leaf) continue;
                const double delta = config.learning_rate * node.leaf_value;
                for (std::size_t i = node.begin; i < node.end; ++i) predictions[order[i]] += delta;
            }
            model.trees.push_back(materialize_tree(grown, binned.thresholds));
        }
        // An unsplittable root contributes nothing (no global shift), so a
        // loss-optimal baseline stays put; the loss curve still gets a point.
        model.training_loss.push_back(training_loss_value(config.loss, target, predictions));
    }
    return model;
}

std::vector<double> GbtModel::predict(const FeatureMatrix& m, int threads) const {
    m.validate();
    std::vector<const std::vector<double>*> column_ptrs;
    column_ptrs.reserve(feature_names.size());
    for (const std::string& name : feature_names) {
        const int idx = m.column_index(name);
        require(idx >= 0, "predict: input matrix lacks column '", name, "'");
        column_ptrs.push_back(&m.columns[static_cast<std::size_t>(idx)]);
    }

    const std::size_t n = m.rows();
    std::vector<double> out(n, baseline);
    constexpr std::size_t kChunk = 4096;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    parallel_for(n_chunks, n >= kChunk ? threads : 1, [&](std::size_t chunk) {
        const std::size_t lo = chunk * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        for (std::size_t row = lo; row < hi; ++row) {
            double acc = 0.0;
            for (const Tree& tree : trees) acc += tree.predict_row(column_ptrs, row);
            out[row] += config.learning_rate * acc;
        }
    });
    return out;
}

RootSplitInfo root_split(const FeatureMatrix& m, const std::vector<double>& gradients,
                         const GbtConfig& config) {
    config.validate();
    m.validate();
    require(m.rows() == gradients.size(), "root_split: ", m.rows(), " rows but ",
            gradients.size(), " gradients");
    const BinnedFeatures binned = bin_features(m, config.max_bins);
    TreeGrower grower(binned, gradients, config, 1);
    const SplitChoice choice = grower.root_choice();
    RootSplitInfo info;
    info.found = choice.valid;
    if (choice.valid) {
        info.feature = choice.feature;
        info.threshold = binned.thresholds[static_cast<std::size_t>(choice.feature)]
                                          [static_cast<std::size_t>(choice.bin)];
        info.missing_left = choice.missing_left;
        info.gain = choice.gain;
    }
    return info;
}

QuantileSuite fit_quantile_suite(const FeatureMatrix& m, const std::vector<double>& target,
                                 const GbtConfig& config, int threads) {
    GbtConfig c = config;
    QuantileSuite suite;
    c.loss = GbtLoss::squared();
    suite.mean_model = fit(m, target, c, threads);
    c.loss = GbtLoss::pinball(0.01);
    suite.q01 = fit(m, target, c, threads);
    c.loss = GbtLoss::pinball(0.5);
    suite.q50 = fit(m, target, c, threads);
    c.loss = GbtLoss::pinball(0.99);
    suite.q99 = fit(m, target, c, threads);
    return suite;
}

} // namespace imblab
