#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "imblab/error.hpp"
#include "imblab/evaluation.hpp"
#include "imblab/synthetic.hpp"
#include "test_helpers.hpp"

using imblab::FeatureSetSpec;
using imblab::TargetKind;

namespace {

imblab::SyntheticConfig small_config(int days, std::uint64_t seed = 5) {
    imblab::SyntheticConfig cfg;
    cfg.days = days;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("feature specs: defaults and combo parsing") {
    const FeatureSetSpec x2 = FeatureSetSpec::x2();
    REQUIRE(x2.recent_lags_s.size() == 12);
    CHECK(x2.recent_lags_s.front() == 300);
    CHECK(x2.recent_lags_s.back() == 3600);

    const FeatureSetSpec x3 = FeatureSetSpec::x3();
    REQUIRE(x3.day_ahead_lags_s.size() == 25);
    CHECK(x3.day_ahead_lags_s.front() == 23 * 3600);
    CHECK(x3.day_ahead_lags_s.back() == 25 * 3600);
    CHECK(x3.include_day_ahead_forecasts);

    const FeatureSetSpec all = FeatureSetSpec::from_combo("X1+X2+X3");
    CHECK(all.include_realizations);
    CHECK(all.recent_lags_s.size() == 12);
    CHECK(all.day_ahead_lags_s.size() == 25);
    CHECK(all.name == "X1+X2+X3");

    CHECK_THROWS_WITH_AS(static_cast<void>(FeatureSetSpec::from_combo("X4")),
                         doctest::Contains("unknown feature set"), imblab::Error);
    CHECK_THROWS_AS(static_cast<void>(FeatureSetSpec::from_combo("")), imblab::Error);

    FeatureSetSpec bad = x2;
    bad.recent_lags_s.push_back(301);
    CHECK_THROWS_AS(bad.validate(), imblab::Error);
}

TEST_CASE("build_features: column names and shapes per feature set") {
    const auto ds = imblab::generate(small_config(4));

    const auto x2 = imblab::build_features(ds, TargetKind::kImbalance, FeatureSetSpec::x2());
    REQUIRE(x2.matrix.cols() == 12);
    CHECK(x2.matrix.column_names.front() == "lag_5m");
    CHECK(x2.matrix.column_names.back() == "lag_60m");
    CHECK(x2.dropped_rows == 12); // one hour of warm-up

    const auto x3 = imblab::build_features(ds, TargetKind::kImbalance, FeatureSetSpec::x3());
    REQUIRE(x3.matrix.cols() == 28); // 25 lags + 3 day-ahead forecasts
    CHECK(x3.matrix.column_names[0] == "lag_1380m");
    CHECK(x3.matrix.column_names[24] == "lag_1500m");
    CHECK(x3.matrix.column_names[25] == "pv_fc_da");
    // the first 25 hours lack day-ahead lags and get dropped
    CHECK(x3.dropped_rows == 25 * 12);
    CHECK(x3.matrix.rows() == 4 * 288 - 25 * 12);

    const auto all =
        imblab::build_features(ds, TargetKind::kImbalance, FeatureSetSpec::from_combo("X1+X2+X3"));
    CHECK(all.matrix.cols() == 3 + 12 + 25 + 3);
    CHECK(all.matrix.column_names.front() == "pv_obs");
    CHECK(all.matrix.rows() == all.target.size());
}

TEST_CASE("build_features: lag columns are pure shifts of the target") {
    const auto ds = imblab::generate(small_config(3));
    const imblab::TimeSeries target = imblab::target_series(ds, TargetKind::kImbalance);

    for (const char* combo : {"X2", "X3", "X1+X2+X3"}) {
        const FeatureSetSpec spec = FeatureSetSpec::from_combo(combo);
        const auto built = imblab::build_features(ds, TargetKind::kImbalance, spec);
        std::vector<std::int64_t> lags = spec.recent_lags_s;
        lags.insert(lags.end(), spec.day_ahead_lags_s.begin(), spec.day_ahead_lags_s.end());
        for (std::size_t r = 0; r < built.matrix.rows(); r += 37) {
            const imblab::EpochSeconds t = built.matrix.row_timestamps[r];
            std::size_t c = spec.include_realizations ? 3 : 0;
            for (const std::int64_t lag : lags) {
                const auto src = static_cast<std::size_t>((t - lag - target.start()) / 300);
                CHECK(built.matrix.columns[c][r] == target[src]);
                ++c;
            }
            // target column alignment
            const auto self = static_cast<std::size_t>((t - target.start()) / 300);
            CHECK(built.target[r] == target[self]);
        }
    }
}

TEST_CASE("build_features: half-hour explanatory values are held constant") {
    const auto ds = imblab::generate(small_config(2));
    const auto built =
        imblab::build_features(ds, TargetKind::kImbalance, FeatureSetSpec::x1());
    REQUIRE(built.matrix.cols() == 3);
    // rows 0..5 share the first half-hour of observations
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = 1; r < 6; ++r)
            CHECK(built.matrix.columns[c][r] == built.matrix.columns[c][0]);
    // and the source timestamp never exceeds the row timestamp
    for (std::size_t r = 0; r < built.matrix.rows(); r += 101) {
        const imblab::EpochSeconds t = built.matrix.row_timestamps[r];
        const imblab::EpochSeconds source = ds.pv_obs.start() + ((t - ds.pv_obs.start()) / 1800) * 1800;
        CHECK(source <= t);
    }
}

TEST_CASE("build_features rejects lags beyond the available history") {
    const auto ds = imblab::generate(small_config(2));
    FeatureSetSpec spec;
    spec.name = "too-long";
    spec.recent_lags_s = {3 * 86400}; // 3-day lag on a 2-day window
    CHECK_THROWS_AS(static_cast<void>(imblab::build_features(ds, TargetKind::kImbalance, spec)),
                    imblab::Error);
}

TEST_CASE("kfold_contiguous partitions the index range") {
    const auto folds = imblab::kfold_contiguous(16, 4);
    REQUIRE(folds.size() == 4);
    CHECK(folds[0].second == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(folds[1].second == std::vector<std::size_t>{4, 5, 6, 7});
    CHECK(folds[3].second == std::vector<std::size_t>{12, 13, 14, 15});
    CHECK(folds[0].first.size() == 12);
    // final fold: test block at the end, train is everything before it
    CHECK(folds[3].first == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
    // middle fold: train wraps around the test block
    CHECK(folds[1].first.front() == 0);
    CHECK(folds[1].first.back() == 15);

    CHECK_THROWS_AS(static_cast<void>(imblab::kfold_contiguous(3, 4)), imblab::Error);

    std::mt19937_64 rng(61);
    for (int round = 0; round < 50; ++round) {
        const std::size_t n = 1 + rng() % 300;
        const std::size_t k = 1 + rng() % n;
        const auto random_folds = imblab::kfold_contiguous(n, k);
        std::set<std::size_t> seen;
        std::size_t min_size = n, max_size = 0;
        for (const auto& [train, test] : random_folds) {
            for (std::size_t i : test) CHECK(seen.insert(i).second); // disjoint
            min_size = std::min(min_size, test.size());
            max_size = std::max(max_size, test.size());
            CHECK(train.size() + test.size() == n);
        }
        CHECK(seen.size() == n); // covering
        CHECK(max_size - min_size <= 1);
    }
}

TEST_CASE("metric definitions") {
    const std::vector<double> y{1, 2, 3};
    CHECK(imblab::mae(y, y) == 0.0);
    CHECK(imblab::rmse(y, y) == 0.0);
    CHECK(imblab::pinball(y, y, 0.5) == 0.0);

    CHECK(imblab::mae({0, 0}, {3, -3}) == 3.0);
    CHECK(imblab::rmse({0, 0}, {3, -3}) == 3.0);
    CHECK(imblab::mae({0, 0}, {0, 6}) == 3.0);
    CHECK(imblab::rmse({0, 0}, {0, 6}) == doctest::Approx(4.243).epsilon(1e-3));

    CHECK(imblab::pinball({10}, {6}, 0.5) == doctest::Approx(2.0));
    CHECK(imblab::pinball({0}, {10}, 0.99) == doctest::Approx(0.1));

    CHECK_THROWS_AS(static_cast<void>(imblab::mae({1}, {1, 2})), imblab::Error);
    CHECK_THROWS_AS(static_cast<void>(imblab::mae({}, {})), imblab::Error);
    CHECK_THROWS_AS(static_cast<void>(imblab::pinball({1}, {1}, 0.0)), imblab::Error);
}

TEST_CASE("metric relations on random vectors") {
    std::mt19937_64 rng(67);
    for (int round = 0; round < 40; ++round) {
        const std::size_t n = 1 + rng() % 200;
        const auto y = testutil::random_values(rng, n, -40, 40);
        const auto y_hat = testutil::random_values(rng, n, -40, 40);
        CHECK(imblab::pinball(y, y_hat, 0.5) ==
              doctest::Approx(imblab::mae(y, y_hat) / 2.0).epsilon(1e-12));
        CHECK(imblab::rmse(y, y_hat) >= imblab::mae(y, y_hat) - 1e-12);

        // invariance under a simultaneous permutation
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> py(n), ph(n);
        for (std::size_t i = 0; i < n; ++i) {
            py[i] = y[perm[i]];
            ph[i] = y_hat[perm[i]];
        }
        CHECK(imblab::mae(py, ph) == doctest::Approx(imblab::mae(y, y_hat)).epsilon(1e-12));
        CHECK(imblab::rmse(py, ph) == doctest::Approx(imblab::rmse(y, y_hat)).epsilon(1e-12));
    }
}

TEST_CASE("cross_validate: shape, determinism and traces") {
    const auto ds = imblab::generate(small_config(4, 12));
    imblab::GbtConfig cfg;
    cfg.max_iterations = 5;
    const std::vector<FeatureSetSpec> combos{FeatureSetSpec::x2(), FeatureSetSpec::x1()};

    CHECK_THROWS_WITH_AS(static_cast<void>(imblab::cross_validate(
                             ds, TargetKind::kImbalance, combos, cfg, 1)),
                         doctest::Contains("k must be at least 2"), imblab::Error);

    const auto outcome =
        imblab::cross_validate(ds, TargetKind::kImbalance, combos, cfg, 3, 2, true);
    const auto& report = outcome.report;
    CHECK(report.combo_names == std::vector<std::string>{"X2", "X1"});
    REQUIRE(report.averaged.size() == imblab::kCvMetricCount);
    for (std::size_t mi = 0; mi < imblab::kCvMetricCount; ++mi) {
        REQUIRE(report.averaged[mi].size() == 2);
        for (std::size_t ci = 0; ci < 2; ++ci) {
            REQUIRE(report.per_fold[mi][ci].size() == 3);
            double sum = 0;
            for (double v : report.per_fold[mi][ci]) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(report.averaged[mi][ci] == doctest::Approx(sum / 3.0).epsilon(1e-12));
        }
    }
    CHECK(report.value("MAE_TS", "X2") == report.averaged[1][0]);
    CHECK_THROWS_AS(static_cast<void>(report.value("MAE_TS", "X9")), imblab::Error);

    // JSON/CSV shape: 10 metric rows, one column per combo
    const auto doc = nlohmann::json::parse(report.to_json());
    CHECK(doc["metrics"].size() == 10);
    CHECK(doc["combos"].size() == 2);
    const std::string csv = report.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    CHECK(csv.rfind("metric,X2,X1", 0) == 0);

    // traces cover every row exactly once, in time order
    REQUIRE(outcome.traces.size() == 2);
    const auto& trace = outcome.traces[0];
    CHECK(trace.timestamps.size() == trace.observed.size());
    CHECK(std::is_sorted(trace.timestamps.begin(), trace.timestamps.end()));

    const auto again = imblab::cross_validate(ds, TargetKind::kImbalance, combos, cfg, 3, 1, true);
    CHECK(again.report.to_json() == report.to_json()); // thread-count independent
}

TEST_CASE("cross_validate works for the open-loop ACE target") {
    const auto ds = imblab::generate(small_config(3, 21));
    imblab::GbtConfig cfg;
    cfg.max_iterations = 3;
    const auto outcome = imblab::cross_validate(
        ds, TargetKind::kOpenLoopAce, {FeatureSetSpec::x2()}, cfg, 2, 1, false);
    CHECK(outcome.report.target_name == "open_loop_ace");
    CHECK(outcome.traces.empty());
}
