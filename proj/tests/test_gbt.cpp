#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "imblab/error.hpp"
#include "imblab/gbt.hpp"
#include "imblab/gbt_io.hpp"
#include "imblab/stats.hpp"
#include "test_helpers.hpp"

using imblab::FeatureMatrix;
using imblab::GbtConfig;
using imblab::GbtLoss;
using imblab::GbtModel;
using imblab::kMissing;

namespace {

FeatureMatrix matrix(std::vector<std::string> names, std::vector<std::vector<double>> cols) {
    FeatureMatrix m;
    m.column_names = std::move(names);
    m.columns = std::move(cols);
    m.validate();
    return m;
}

// Exhaustive first-split oracle: every midpoint between consecutive distinct
// values of every feature, gains from raw gradient sums, same tie-break
// (lowest feature, then lowest threshold). No missing values expected.
struct OracleSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

OracleSplit exact_greedy_oracle(const FeatureMatrix& m, const std::vector<double>& g,
                                const GbtConfig& cfg) {
    const std::size_t n = m.rows();
    double total_g = 0;
    for (double x : g) total_g += x;
    const double lambda = cfg.l2_regularization;
    const double parent = total_g * total_g / (static_cast<double>(n) + lambda);

    OracleSplit best;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        std::vector<double> distinct = m.columns[f];
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t d = 0; d + 1 < distinct.size(); ++d) {
            const double threshold = 0.5 * (distinct[d] + distinct[d + 1]);
            double left_g = 0;
            std::size_t left_n = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (m.columns[f][i] <= threshold) {
                    left_g += g[i];
                    ++left_n;
                }
            }
            const std::size_t right_n = n - left_n;
            if (left_n < static_cast<std::size_t>(cfg.min_samples_leaf) ||
                right_n < static_cast<std::size_t>(cfg.min_samples_leaf))
                continue;
            const double right_g = total_g - left_g;
            const double gain =
                0.5 * (left_g * left_g / (static_cast<double>(left_n) + lambda) +
                       right_g * right_g / (static_cast<double>(right_n) + lambda) - parent);
            if (gain <= 1e-10 * std::max(1.0, std::abs(0.5 * parent))) continue;
            if (!best.found || gain > best.gain) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("bin_features: small cardinality gets one bin per distinct value") {
    const auto m = matrix({"x"}, {{3.0, 1.0, 2.0, 1.0, 3.0, 2.0}});
    const auto binned = imblab::bin_features(m, 255);
    REQUIRE(binned.bin_counts[0] == 3);
    REQUIRE(binned.thresholds[0].size() == 2);
    CHECK(binned.thresholds[0][0] == 1.5);
    CHECK(binned.thresholds[0][1] == 2.5);
    CHECK(binned.codes[0] == std::vector<std::uint8_t>{2, 0, 1, 0, 2, 1});
}

TEST_CASE("bin_features: constant feature keeps a single bin") {
    const auto m = matrix({"c"}, {std::vector<double>(10, 4.0)});
    const auto binned = imblab::bin_features(m, 64);
    CHECK(binned.bin_counts[0] == 1);
    CHECK(binned.thresholds[0].empty());
}

TEST_CASE("bin_features: quantile thresholds for high-cardinality features") {
    std::mt19937_64 rng(4);
    std::vector<double> x = testutil::random_values(rng, 1000, 0.0, 1.0);
    const auto m = matrix({"u"}, {x});
    const auto binned = imblab::bin_features(m, 4);
    REQUIRE(binned.thresholds[0].size() == 3);
    // thresholds sit at the interpolated 25/50/75 percentiles of the data
    CHECK(binned.thresholds[0][0] == imblab::quantile(x, 0.25));
    CHECK(binned.thresholds[0][1] == imblab::quantile(x, 0.50));
    CHECK(binned.thresholds[0][2] == imblab::quantile(x, 0.75));
}

TEST_CASE("bin_features: missing values get the reserved bin") {
    const auto m = matrix({"x"}, {{1.0, kMissing, 2.0, kMissing}});
    const auto binned = imblab::bin_features(m, 8);
    CHECK(binned.bin_counts[0] == 2);
    CHECK(binned.codes[0][1] == binned.missing_code(0));
    CHECK(binned.codes[0][3] == binned.missing_code(0));
    CHECK_THROWS_AS(static_cast<void>(imblab::bin_features(matrix({"x"}, {{}}), 8)),
                    imblab::Error);
}

TEST_CASE("fit: constant target is reproduced exactly") {
    std::mt19937_64 rng(8);
    const auto m = matrix({"a", "b"}, {testutil::random_values(rng, 120, -5, 5),
                                       testutil::random_values(rng, 120, -5, 5)});
    const std::vector<double> y(120, 3.7);

    for (const GbtLoss loss : {GbtLoss::squared(), GbtLoss::pinball(0.01),
                               GbtLoss::pinball(0.5), GbtLoss::pinball(0.99)}) {
        GbtConfig cfg;
        cfg.loss = loss;
        cfg.max_iterations = 50;
        const GbtModel model = imblab::fit(m, y, cfg);
        for (double p : model.predict(m)) CHECK(p == 3.7);
        for (const imblab::Tree& tree : model.trees)
            for (const imblab::TreeNode& node : tree.nodes)
                if (node.is_leaf) CHECK(node.leaf_value == 0.0);
    }
}

TEST_CASE("fit: step-function target splits at the exact midpoint") {
    std::vector<double> x(80), y(80);
    for (int i = 0; i < 80; ++i) {
        x[i] = i;
        y[i] = i < 40 ? 0.0 : 10.0;
    }
    const auto m = matrix({"x"}, {x});
    GbtConfig cfg;
    cfg.learning_rate = 1.0;
    cfg.max_iterations = 1;
    cfg.max_leaf_nodes = 2;
    const GbtModel model = imblab::fit(m, y, cfg);

    REQUIRE(model.trees.size() == 1);
    const imblab::TreeNode& root = model.trees[0].nodes[0];
    CHECK_FALSE(root.is_leaf);
    CHECK(root.feature == 0);
    CHECK(root.threshold == 39.5); // between largest x<40 and smallest x>=40

    const auto oracle = exact_greedy_oracle(m, [&] {
        std::vector<double> g(y.size());
        const double baseline = imblab::mean_of(y);
        for (std::size_t i = 0; i < y.size(); ++i) g[i] = baseline - y[i];
        return g;
    }(), cfg);
    CHECK(oracle.feature == 0);
    CHECK(oracle.threshold == root.threshold);

    const auto preds = model.predict(m);
    for (int i = 0; i < 80; ++i) CHECK(preds[i] == doctest::Approx(y[i]).epsilon(1e-12));
    REQUIRE(model.training_loss.size() == 2);
    CHECK(model.training_loss[0] == doctest::Approx(25.0)); // MSE at the mean
    CHECK(model.training_loss[1] == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("fit: pinball with an uninformative feature lands on the median") {
    // skewed target, constant feature: baseline is already optimal
    std::vector<double> y;
    for (int i = 0; i < 101; ++i) y.push_back(std::pow(1.05, i));
    const auto m = matrix({"c"}, {std::vector<double>(y.size(), 1.0)});
    GbtConfig cfg;
    cfg.loss = GbtLoss::pinball(0.5);
    const GbtModel model = imblab::fit(m, y, cfg);
    const double median = imblab::quantile(y, 0.5);
    for (double p : model.predict(m)) CHECK(p == doctest::Approx(median).epsilon(1e-9));
}

TEST_CASE("fit input validation") {
    const auto m = matrix({"x"}, {{1, 2, 3}});
    GbtConfig cfg;
    CHECK_THROWS_AS(static_cast<void>(imblab::fit(m, {1, 2}, cfg)), imblab::Error);
    CHECK_THROWS_AS(static_cast<void>(imblab::fit(m, {1, 2, 3}, cfg)), imblab::Error); // < 2*msl
    GbtConfig bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(static_cast<void>(imblab::fit(m, {1, 2, 3}, bad)), imblab::Error);
    bad = cfg;
    bad.loss = GbtLoss::pinball(1.0);
    CHECK_THROWS_AS(static_cast<void>(imblab::fit(m, {1, 2, 3}, bad)), imblab::Error);

    std::vector<double> y(60, 1.0);
    y[10] = std::numeric_limits<double>::infinity();
    const auto m60 = matrix({"x"}, {std::vector<double>(60, 1.0)});
    CHECK_THROWS_WITH_AS(static_cast<void>(imblab::fit(m60, y, cfg)),
                         doctest::Contains("non-finite target"), imblab::Error);
}

TEST_CASE("predict: zero iterations gives the baseline everywhere") {
    std::mt19937_64 rng(14);
    const auto m = matrix({"x"}, {testutil::random_values(rng, 64, -5, 5)});
    const auto y = testutil::random_values(rng, 64, 10, 20);
    GbtConfig cfg;
    cfg.max_iterations = 0;
    const GbtModel model = imblab::fit(m, y, cfg);
    CHECK(model.trees.empty());
    for (double p : model.predict(m)) CHECK(p == model.baseline);
}

TEST_CASE("predict: extra and reordered columns are fine, absent columns are not") {
    std::mt19937_64 rng(15);
    const auto x = testutil::random_values(rng, 128, 0, 1);
    std::vector<double> y(128);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] > 0.5 ? 4.0 : -4.0;
    const auto m = matrix({"x"}, {x});
    GbtConfig cfg;
    cfg.max_iterations = 20;
    const GbtModel model = imblab::fit(m, y, cfg);
    const auto base_preds = model.predict(m);

    const auto extra = matrix({"noise", "x"}, {testutil::random_values(rng, 128, -9, 9), x});
    CHECK(model.predict(extra) == base_preds);

    const auto wrong = matrix({"y"}, {x});
    CHECK_THROWS_WITH_AS(static_cast<void>(model.predict(wrong)),
                         doctest::Contains("lacks column 'x'"), imblab::Error);
}

TEST_CASE("missing values route by learned direction, unseen-missing goes left") {
    // y depends on x; half the x values are missing and deliberately carry
    // high targets so the learned missing direction is informative.
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
        if (i % 2 == 0) {
            x.push_back(kMissing);
            y.push_back(50.0);
        } else {
            x.push_back(static_cast<double>(i));
            y.push_back(i < 100 ? 0.0 : 10.0);
        }
    }
    GbtConfig cfg;
    cfg.max_iterations = 30;
    const GbtModel model = imblab::fit(matrix({"x"}, {x}), y, cfg);
    const auto preds = model.predict(matrix({"x"}, {x}));
    double err = 0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(preds[i] - y[i]));
    CHECK(err < 1.0); // missing rows separated from the numeric ones

    // a model trained without missing routes unseen-missing left
    std::vector<double> x2, y2;
    for (int i = 0; i < 100; ++i) {
        x2.push_back(i);
        y2.push_back(i < 50 ? -5.0 : 5.0);
    }
    GbtConfig cfg2;
    cfg2.max_iterations = 5;
    cfg2.learning_rate = 1.0;
    const GbtModel clean = imblab::fit(matrix({"x"}, {x2}), y2, cfg2);
    const auto p = clean.predict(matrix({"x"}, {{kMissing}}));
    const auto left = clean.predict(matrix({"x"}, {{0.0}}));
    CHECK(p[0] == left[0]);
}

TEST_CASE("squared-loss training curve is non-increasing") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 5; ++round) {
        const std::size_t n = 200 + rng() % 200;
        const auto x = testutil::random_values(rng, n, -3, 3);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(x[i]) * 10;
        GbtConfig cfg;
        cfg.max_iterations = 40;
        cfg.learning_rate = 0.05 + 0.9 * (static_cast<double>(rng() % 100) / 100.0);
        cfg.max_leaf_nodes = 2 + static_cast<int>(rng() % 30);
        cfg.min_samples_leaf = 1 + static_cast<int>(rng() % 20);
        const GbtModel model = imblab::fit(matrix({"x"}, {x}), y, cfg);
        for (std::size_t i = 1; i < model.training_loss.size(); ++i)
            CHECK(model.training_loss[i] <= model.training_loss[i - 1] + 1e-9);
    }
}

TEST_CASE("pinball training loss improves on learnable data") {
    std::mt19937_64 rng(29);
    const std::size_t n = 600;
    const auto x = testutil::random_values(rng, n, 0, 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 100.0 * x[i] + (5.0 + 20.0 * x[i]) * noise(rng);
    for (const double tau : {0.01, 0.5, 0.99}) {
        GbtConfig cfg;
        cfg.loss = GbtLoss::pinball(tau);
        cfg.max_iterations = 100;
        const GbtModel model = imblab::fit(matrix({"x"}, {x}), y, cfg);
        CHECK(model.training_loss.back() < model.training_loss.front());
    }
}

TEST_CASE("histogram split equals the exact-greedy split when bins are lossless") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 10; ++round) {
        const std::size_t n = 60 + rng() % 440;
        const std::size_t n_features = 1 + rng() % 5;
        std::vector<std::vector<double>> cols(n_features);
        std::vector<std::string> names;
        for (std::size_t f = 0; f < n_features; ++f) {
            names.push_back("f" + std::to_string(f));
            cols[f].resize(n);
            for (double& v : cols[f])
                v = static_cast<double>(rng() % 200); // <= 200 distinct <= max_bins
        }
        const auto y = testutil::random_values(rng, n, -50, 50);
        const auto m = matrix(names, cols);

        GbtConfig cfg; // max_bins = 255 default
        std::vector<double> g(n);
        const double baseline = imblab::mean_of(y);
        for (std::size_t i = 0; i < n; ++i) g[i] = baseline - y[i];

        const auto got = imblab::root_split(m, g, cfg);
        const auto expected = exact_greedy_oracle(m, g, cfg);
        REQUIRE(got.found == expected.found);
        if (expected.found) {
            CHECK(got.feature == expected.feature);
            CHECK(got.threshold == expected.threshold);
        }
    }
}

TEST_CASE("histogram gain equals the raw-gradient gain for the chosen split") {
    std::mt19937_64 rng(37);
    for (int round = 0; round < 10; ++round) {
        const std::size_t n = 100 + rng() % 900;
        const auto x = testutil::random_values(rng, n, -10, 10);
        const auto g = testutil::random_values(rng, n, -1, 1); // pinball-scale gradients
        const auto m = matrix({"x"}, {x});
        GbtConfig cfg;
        const auto split = imblab::root_split(m, g, cfg);
        if (!split.found) continue;

        double left_g = 0, total_g = 0;
        std::size_t left_n = 0;
        for (std::size_t i = 0; i < n; ++i) {
            total_g += g[i];
            if (x[i] <= split.threshold) {
                left_g += g[i];
                ++left_n;
            }
        }
        const double right_g = total_g - left_g;
        const auto right_n = static_cast<double>(n - left_n);
        const double raw_gain =
            0.5 * (left_g * left_g / static_cast<double>(left_n) + right_g * right_g / right_n -
                   total_g * total_g / static_cast<double>(n));
        CHECK(split.gain == doctest::Approx(raw_gain).epsilon(1e-9));
    }
}

TEST_CASE("tie-break prefers the lowest feature index") {
    std::vector<double> x(100);
    std::vector<double> y(100);
    for (int i = 0; i < 100; ++i) {
        x[i] = i;
        y[i] = i < 50 ? 0.0 : 1.0;
    }
    // identical columns: gains tie exactly, feature 0 must win
    const auto m = matrix({"a", "b"}, {x, x});
    std::vector<double> g(100);
    for (int i = 0; i < 100; ++i) g[i] = 0.5 - y[i];
    const auto split = imblab::root_split(m, g, GbtConfig{});
    REQUIRE(split.found);
    CHECK(split.feature == 0);
    CHECK(split.missing_left); // no missing seen, defaults left
}

TEST_CASE("fit_quantile_suite on symmetric noise keeps Q50 near the mean model") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> noise(0.0, 100.0);
    const std::size_t n = 4000;
    std::vector<double> y(n);
    for (double& v : y) v = noise(rng);
    const auto m = matrix({"junk"}, {testutil::random_values(rng, n, 0, 1)});

    GbtConfig cfg;
    cfg.max_iterations = 50;
    const auto suite = imblab::fit_quantile_suite(m, y, cfg);
    const auto mean_p = suite.mean_model.predict(m);
    const auto q50_p = suite.q50.predict(m);
    double max_gap = 0;
    for (std::size_t i = 0; i < n; ++i) max_gap = std::max(max_gap, std::abs(mean_p[i] - q50_p[i]));
    CHECK(max_gap < 25.0); // within noise tolerance of sigma = 100

    // constant target: all four models reproduce it
    const std::vector<double> c(256, -12.5);
    const auto m2 = matrix({"x"}, {testutil::random_values(rng, 256, 0, 1)});
    const auto suite2 = imblab::fit_quantile_suite(m2, c, cfg);
    for (const GbtModel* model : {&suite2.mean_model, &suite2.q01, &suite2.q50, &suite2.q99})
        for (double p : model->predict(m2)) CHECK(p == -12.5);
}

TEST_CASE("quantile models rarely cross on held-out data") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto make = [&](std::size_t n) {
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 1000) / 1000.0;
            y[i] = 50.0 * std::sin(6.28 * x[i]) + (10.0 + 30.0 * x[i]) * noise(rng);
        }
        return std::pair{matrix({"x"}, {x}), y};
    };
    const auto [train_m, train_y] = make(6000);
    const auto [test_m, test_y] = make(3000);

    GbtConfig cfg;
    cfg.max_iterations = 100;
    const auto suite = imblab::fit_quantile_suite(train_m, train_y, cfg);
    const auto lo = suite.q01.predict(test_m);
    const auto hi = suite.q99.predict(test_m);
    std::size_t ordered = 0;
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] <= hi[i]) ++ordered;
    CHECK(static_cast<double>(ordered) >= 0.99 * static_cast<double>(lo.size()));
}

TEST_CASE("determinism: identical inputs give bit-identical models, any thread count") {
    std::mt19937_64 rng(47);
    const std::size_t n = 2000;
    std::vector<std::vector<double>> cols(6);
    std::vector<std::string> names;
    for (std::size_t f = 0; f < cols.size(); ++f) {
        names.push_back("f" + std::to_string(f));
        cols[f] = testutil::random_values(rng, n, -100, 100);
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = cols[0][i] * 2 + cols[3][i] + (i % 13);
    const auto m = matrix(names, cols);

    GbtConfig cfg;
    cfg.max_iterations = 25;
    const std::string one = imblab::model_to_json(imblab::fit(m, y, cfg, 1));
    const std::string four = imblab::model_to_json(imblab::fit(m, y, cfg, 4));
    const std::string again = imblab::model_to_json(imblab::fit(m, y, cfg, 4));
    CHECK(one == four);
    CHECK(four == again);
}

TEST_CASE("model JSON round trip reproduces bit-identical predictions") {
    std::mt19937_64 rng(53);
    const std::size_t n = 800;
    const auto x = testutil::random_values(rng, n, -5, 5);
    std::vector<double> x_gaps = x;
    for (std::size_t i = 0; i < n; i += 11) x_gaps[i] = kMissing;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::cos(x[i]) * 42 + (i % 7);

    GbtConfig cfg;
    cfg.loss = GbtLoss::pinball(0.99);
    cfg.max_iterations = 30;
    cfg.seed = 99;
    const auto m = matrix({"x"}, {x_gaps});
    const GbtModel model = imblab::fit(m, y, cfg);

    const std::string text = imblab::model_to_json(model);
    const GbtModel reloaded = imblab::model_from_json(text);
    CHECK(imblab::model_to_json(reloaded) == text);
    CHECK(reloaded.predict(m) == model.predict(m));
    CHECK(reloaded.config.seed == 99);
    CHECK(reloaded.config.loss.tau == 0.99);

    // suite round trip
    const auto suite = imblab::fit_quantile_suite(m, y, cfg);
    const std::string suite_text = imblab::suite_to_json(suite, {{"target", "imbalance"}});
    const auto suite2 = imblab::suite_from_json(suite_text);
    CHECK(suite2.q01.predict(m) == suite.q01.predict(m));
    CHECK(suite2.mean_model.predict(m) == suite.mean_model.predict(m));
}
