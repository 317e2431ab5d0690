#include "imblab/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "imblab/csv.hpp"
#include "imblab/error.hpp"
#include "imblab/series_ops.hpp"
#include "imblab/stats.hpp"
#include "imblab/version.hpp"

namespace imblab {

using nlohmann::json;

std::string target_kind_name(TargetKind t) {
    return t == TargetKind::kImbalance ? "imbalance" : "open_loop_ace";
}

TargetKind target_kind_from_name(const std::string& name) {
    if (name == "imbalance") return TargetKind::kImbalance;
    if (name == "open_loop_ace") return TargetKind::kOpenLoopAce;
    fail("unknown target '", name, "' (expected imbalance or open_loop_ace)");
}

std::vector<std::int64_t> FeatureSetSpec::default_recent_lags() {
    std::vector<std::int64_t> lags;
    for (std::int64_t m = 5; m <= 60; m += 5) lags.push_back(m * 60);
    return lags;
}

std::vector<std::int64_t> FeatureSetSpec::default_day_ahead_lags() {
    std::vector<std::int64_t> lags;
    for (std::int64_t m = 23 * 60; m <= 25 * 60; m += 5) lags.push_back(m * 60);
    return lags;
}

FeatureSetSpec FeatureSetSpec::x1() {
    FeatureSetSpec s;
    s.name = "X1";
    s.include_realizations = true;
    return s;
}

FeatureSetSpec FeatureSetSpec::x2() {
    FeatureSetSpec s;
    s.name = "X2";
    s.recent_lags_s = default_recent_lags();
    return s;
}

FeatureSetSpec FeatureSetSpec::x3() {
    FeatureSetSpec s;
    s.name = "X3";
    s.day_ahead_lags_s = default_day_ahead_lags();
    s.include_day_ahead_forecasts = true;
    return s;
}

FeatureSetSpec FeatureSetSpec::from_combo(const std::string& combo) {
    FeatureSetSpec s;
    s.name = combo;
    std::size_t pos = 0;
    require(!combo.empty(), "empty feature combo");
    while (pos <= combo.size()) {
        const std::size_t plus = std::min(combo.find('+', pos), combo.size());
        const std::string token = combo.substr(pos, plus - pos);
        if (token == "X1") {
            s.include_realizations = true;
        } else if (token == "X2") {
            s.recent_lags_s = default_recent_lags();
        } else if (token == "X3") {
            s.day_ahead_lags_s = default_day_ahead_lags();
            s.include_day_ahead_forecasts = true;
        } else {
            fail("unknown feature set '", token, "' in combo '", combo,
                 "' (expected X1, X2, X3 joined with '+')");
        }
        pos = plus + 1;
    }
    return s;
}

void FeatureSetSpec::validate() const {
    for (const std::int64_t lag : recent_lags_s)
        require(lag > 0 && lag % 300 == 0, "feature spec '", name, "': recent lag ", lag,
                " s must be a positive multiple of 300 s");
    for (const std::int64_t lag : day_ahead_lags_s)
        require(lag > 0 && lag % 300 == 0, "feature spec '", name, "': day-ahead lag ", lag,
                " s must be a positive multiple of 300 s");
    require(has_any_feature(), "feature spec '", name, "' selects no features");
}

bool FeatureSetSpec::has_any_feature() const {
    return include_realizations || !recent_lags_s.empty() || !day_ahead_lags_s.empty() ||
           include_day_ahead_forecasts;
}

TimeSeries target_series(const BalancingDataset& ds, TargetKind target) {
    if (target == TargetKind::kImbalance) return derive_system_imbalance(ds);
    TimeSeries ol = derive_open_loop_ace(ds);
    if (ol.step() != 300) ol = resample(ol, 300, Agg::kMean);
    return ol.relabeled("open_loop_ace");
}

namespace {

std::string lag_column_name(std::int64_t lag_s) { return msg("lag_", lag_s / 60, "m"); }

// Value of a 30-minute series at an arbitrary 5-minute timestamp, held
// constant within each half-hour. Returns false when t is outside the
// series window.
bool half_hour_value(const TimeSeries& s, EpochSeconds t, double& out) {
    const std::int64_t offset = t - s.start();
    if (offset < 0) return false;
    const std::int64_t j = offset / s.step();
    if (j >= static_cast<std::int64_t>(s.size())) return false;
    out = s[static_cast<std::size_t>(j)];
    return true;
}

} // namespace

BuiltFeatures build_features(const BalancingDataset& ds, TargetKind target,
                             const FeatureSetSpec& spec) {
    spec.validate();
    const TimeSeries y = target_series(ds, target);
    require(y.step() == 300, "build_features: target series must be at 300 s");

    std::vector<std::int64_t> all_lags = spec.recent_lags_s;
    all_lags.insert(all_lags.end(), spec.day_ahead_lags_s.begin(), spec.day_ahead_lags_s.end());
    std::size_t warmup = 0;
    for (const std::int64_t lag : all_lags)
        warmup = std::max(warmup, static_cast<std::size_t>(lag / 300));
    require(y.size() > warmup, "build_features: series too short for the requested lags (",
            y.size(), " samples, warm-up ", warmup, ")");

    FeatureMatrix m;
    std::vector<const TimeSeries*> half_hour_sources;
    if (spec.include_realizations) {
        m.column_names.insert(m.column_names.end(), {"pv_obs", "wind_obs", "load_obs"});
        half_hour_sources.insert(half_hour_sources.end(), {&ds.pv_obs, &ds.wind_obs, &ds.load_obs});
    }
    for (const std::int64_t lag : spec.recent_lags_s) m.column_names.push_back(lag_column_name(lag));
    for (const std::int64_t lag : spec.day_ahead_lags_s)
        m.column_names.push_back(lag_column_name(lag));
    if (spec.include_day_ahead_forecasts) {
        m.column_names.insert(m.column_names.end(), {"pv_fc_da", "wind_fc_da", "load_fc_da"});
        half_hour_sources.insert(half_hour_sources.end(),
                                 {&ds.pv_fc_da, &ds.wind_fc_da, &ds.load_fc_da});
    }
    m.columns.resize(m.column_names.size());

    BuiltFeatures built;
    built.dropped_rows = warmup;
    std::vector<double> row(m.column_names.size());
    for (std::size_t i = warmup; i < y.size(); ++i) {
        if (is_missing(y[i])) {
            ++built.dropped_rows;
            continue;
        }
        const EpochSeconds t = y.timestamp(i);
        bool covered = true;
        std::size_t c = 0;
        std::size_t hh = 0;
        if (spec.include_realizations) {
            for (; c < 3; ++c, ++hh)
                if (!half_hour_value(*half_hour_sources[hh], t, row[c])) covered = false;
        }
        for (const std::int64_t lag : spec.recent_lags_s)
            row[c++] = y[i - static_cast<std::size_t>(lag / 300)];
        for (const std::int64_t lag : spec.day_ahead_lags_s)
            row[c++] = y[i - static_cast<std::size_t>(lag / 300)];
        if (spec.include_day_ahead_forecasts) {
            for (; hh < half_hour_sources.size(); ++hh, ++c)
                if (!half_hour_value(*half_hour_sources[hh], t, row[c])) covered = false;
        }
        if (!covered) {
            ++built.dropped_rows;
            continue;
        }
        for (std::size_t cc = 0; cc < row.size(); ++cc) m.columns[cc].push_back(row[cc]);
        m.row_timestamps.push_back(t);
        built.target.push_back(y[i]);
    }
    m.validate();
    require(m.rows() > 0, "build_features: every row was dropped (lag ",
            all_lags.empty() ? 0 : *std::max_element(all_lags.begin(), all_lags.end()),
            " s exceeds the available history)");
    built.matrix = std::move(m);
    return built;
}

std::vector<FoldIndices> kfold_contiguous(std::size_t n, std::size_t k) {
    require(k >= 1, "kfold_contiguous: k must be at least 1");
    require(k <= n, "kfold_contiguous: k = ", k, " exceeds the sample count ", n);
    std::vector<FoldIndices> folds;
    folds.reserve(k);
    const std::size_t base = n / k;
    const std::size_t remainder = n % k;
    std::size_t start = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t size = base + (j < remainder ? 1 : 0);
        FoldIndices fold;
        fold.second.reserve(size);
        for (std::size_t i = start; i < start + size; ++i) fold.second.push_back(i);
        fold.first.reserve(n - size);
        for (std::size_t i = 0; i < start; ++i) fold.first.push_back(i);
        for (std::size_t i = start + size; i < n; ++i) fold.first.push_back(i);
        folds.push_back(std::move(fold));
        start += size;
    }
    return folds;
}

namespace {

void check_pair(const std::vector<double>& y, const std::vector<double>& y_hat,
                const char* what) {
    require(!y.empty(), what, ": empty input");
    require(y.size() == y_hat.size(), what, ": length mismatch (", y.size(), " vs ", y_hat.size(),
            ")");
}

} // namespace

double mae(const std::vector<double>& y, const std::vector<double>& y_hat) {
    check_pair(y, y_hat, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - y_hat[i]);
    return sum / static_cast<double>(y.size());
}

double rmse(const std::vector<double>& y, const std::vector<double>& y_hat) {
    check_pair(y, y_hat, "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(y.size()));
}

double pinball(const std::vector<double>& y, const std::vector<double>& y_hat, double tau) {
    check_pair(y, y_hat, "pinball");
    require(tau > 0.0 && tau < 1.0, "pinball: tau ", tau, " outside (0, 1)");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        sum += d >= 0.0 ? tau * d : (tau - 1.0) * d;
    }
    return sum / static_cast<double>(y.size());
}

double CvReport::value(const std::string& metric, const std::string& combo) const {
    for (std::size_t mi = 0; mi < kCvMetricCount; ++mi) {
        if (metric != kCvMetricNames[mi]) continue;
        for (std::size_t ci = 0; ci < combo_names.size(); ++ci)
            if (combo_names[ci] == combo) return averaged[mi][ci];
    }
    fail("CvReport: no cell (", metric, ", ", combo, ")");
}

std::string CvReport::to_json() const {
    json metrics = json::array();
    for (std::size_t mi = 0; mi < kCvMetricCount; ++mi) {
        json avg;
        json folds;
        for (std::size_t ci = 0; ci < combo_names.size(); ++ci) {
            avg[combo_names[ci]] = averaged[mi][ci];
            folds[combo_names[ci]] = per_fold[mi][ci];
        }
        metrics.push_back(
            json{{"name", kCvMetricNames[mi]}, {"averaged", avg}, {"per_fold", folds}});
    }
    const json doc{{"schema_version", kSchemaVersion},
                   {"target", target_name},
                   {"k", k},
                   {"combos", combo_names},
                   {"metrics", metrics}};
    return doc.dump(2) + "\n";
}

std::string CvReport::to_csv() const {
    std::string out = "metric";
    for (const std::string& combo : combo_names) out += "," + combo;
    out += '\n';
    for (std::size_t mi = 0; mi < kCvMetricCount; ++mi) {
        out += kCvMetricNames[mi];
        for (std::size_t ci = 0; ci < combo_names.size(); ++ci) {
            out += ',';
            out += format_double(averaged[mi][ci]);
        }
        out += '\n';
    }
    return out;
}

std::string PredictionTrace::to_csv() const {
    std::string out = "timestamp,observed,mean,q01,q50,q99\n";
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        out += format_timestamp_utc(timestamps[i]);
        for (double v : {observed[i], mean_pred[i], q01[i], q50[i], q99[i]}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

CvOutcome cross_validate(const BalancingDataset& ds, TargetKind target,
                         const std::vector<FeatureSetSpec>& combos, const GbtConfig& config,
                         std::size_t k, int threads, bool collect_traces) {
    require(k >= 2, "cross_validate: k must be at least 2 (no train/test separation otherwise)");
    require(!combos.empty(), "cross_validate: no feature combos given");
    config.validate();

    CvOutcome outcome;
    CvReport& report = outcome.report;
    report.target_name = target_kind_name(target);
    report.k = k;
    report.per_fold.assign(kCvMetricCount, {});
    report.averaged.assign(kCvMetricCount, {});

    for (const FeatureSetSpec& spec : combos) {
        report.combo_names.push_back(spec.name);
        const BuiltFeatures built = build_features(ds, target, spec);
        const std::size_t n = built.matrix.rows();
        const std::vector<FoldIndices> folds = kfold_contiguous(n, k);

        std::vector<std::vector<double>> fold_values(kCvMetricCount);
        PredictionTrace trace;
        if (collect_traces) {
            trace.combo = spec.name;
            trace.timestamps.resize(n);
            trace.observed.resize(n);
            trace.mean_pred.resize(n);
            trace.q01.resize(n);
            trace.q50.resize(n);
            trace.q99.resize(n);
        }

        for (const auto& [train_idx, test_idx] : folds) {
            const FeatureMatrix train_m = built.matrix.select_rows(train_idx);
            const FeatureMatrix test_m = built.matrix.select_rows(test_idx);
            std::vector<double> train_y, test_y;
            train_y.reserve(train_idx.size());
            test_y.reserve(test_idx.size());
            for (std::size_t r : train_idx) train_y.push_back(built.target[r]);
            for (std::size_t r : test_idx) test_y.push_back(built.target[r]);

            const QuantileSuite suite = fit_quantile_suite(train_m, train_y, config, threads);

            const std::vector<double> mean_ls = suite.mean_model.predict(train_m, threads);
            const std::vector<double> mean_ts = suite.mean_model.predict(test_m, threads);
            const std::vector<double> q01_ls = suite.q01.predict(train_m, threads);
            const std::vector<double> q01_ts = suite.q01.predict(test_m, threads);
            const std::vector<double> q50_ls = suite.q50.predict(train_m, threads);
            const std::vector<double> q50_ts = suite.q50.predict(test_m, threads);
            const std::vector<double> q99_ls = suite.q99.predict(train_m, threads);
            const std::vector<double> q99_ts = suite.q99.predict(test_m, threads);

            fold_values[0].push_back(mae(train_y, mean_ls));
            fold_values[1].push_back(mae(test_y, mean_ts));
            fold_values[2].push_back(rmse(train_y, mean_ls));
            fold_values[3].push_back(rmse(test_y, mean_ts));
            fold_values[4].push_back(pinball(train_y, q01_ls, 0.01));
            fold_values[5].push_back(pinball(test_y, q01_ts, 0.01));
            fold_values[6].push_back(pinball(train_y, q50_ls, 0.5));
            fold_values[7].push_back(pinball(test_y, q50_ts, 0.5));
            fold_values[8].push_back(pinball(train_y, q99_ls, 0.99));
            fold_values[9].push_back(pinball(test_y, q99_ts, 0.99));

            if (collect_traces) {
                for (std::size_t j = 0; j < test_idx.size(); ++j) {
                    const std::size_t r = test_idx[j];
                    trace.timestamps[r] = built.matrix.row_timestamps[r];
                    trace.observed[r] = built.target[r];
                    trace.mean_pred[r] = mean_ts[j];
                    trace.q01[r] = q01_ts[j];
                    trace.q50[r] = q50_ts[j];
                    trace.q99[r] = q99_ts[j];
                }
            }
        }

        for (std::size_t mi = 0; mi < kCvMetricCount; ++mi) {
            report.per_fold[mi].push_back(fold_values[mi]);
            report.averaged[mi].push_back(mean_of(fold_values[mi]));
        }
        if (collect_traces) outcome.traces.push_back(std::move(trace));
    }
    return outcome;
}

} // namespace imblab
