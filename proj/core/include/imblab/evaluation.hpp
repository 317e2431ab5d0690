#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "imblab/dataset.hpp"
#include "imblab/feature_matrix.hpp"
#include "imblab/gbt.hpp"

namespace imblab {

enum class TargetKind { kImbalance, kOpenLoopAce };

std::string target_kind_name(TargetKind t);
TargetKind target_kind_from_name(const std::string& name);

/// Which explanatory variables go into the feature matrix. X1 = realized
/// PV/wind/consumption; X2 = recent target lags (default 5..60 min, 5-min
/// steps); X3 = day-ahead target lags (default 23..25 h, 5-min steps) plus
/// the day-ahead forecasts. Lags are seconds, positive, multiples of the
/// 300 s target step.
struct FeatureSetSpec {
    std::string name;
    bool include_realizations = false;
    std::vector<std::int64_t> recent_lags_s;
    std::vector<std::int64_t> day_ahead_lags_s;
    bool include_day_ahead_forecasts = false;

    static std::vector<std::int64_t> default_recent_lags();     // 12 lags
    static std::vector<std::int64_t> default_day_ahead_lags();  // 25 lags
    static FeatureSetSpec x1();
    static FeatureSetSpec x2();
    static FeatureSetSpec x3();
    /// Parses "X1+X2+X3", "X2", ... into a combined spec.
    static FeatureSetSpec from_combo(const std::string& combo);

    void validate() const;
    bool has_any_feature() const;
};

struct BuiltFeatures {
    FeatureMatrix matrix;        // row_timestamps filled
    std::vector<double> target;  // aligned with matrix rows
    std::size_t dropped_rows = 0;
};

/// Assembles the feature matrix on the target's 5-minute grid. 30-minute
/// explanatory series are held constant within each half-hour. Rows lacking
/// any requested lag (leading warm-up), lacking exogenous coverage, or with
/// a missing target are dropped and counted; in-window missing readings stay
/// as missing features for the model to route.
BuiltFeatures build_features(const BalancingDataset& ds, TargetKind target,
                             const FeatureSetSpec& spec);

/// Target series used by build_features: system imbalance or open-loop ACE,
/// at the 300 s analysis step.
TimeSeries target_series(const BalancingDataset& ds, TargetKind target);

using FoldIndices = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>; // train, test

/// k contiguous non-overlapping test blocks covering 0..n-1 (sizes differ by
/// at most 1); train is everything else, wrapping around the test block.
std::vector<FoldIndices> kfold_contiguous(std::size_t n, std::size_t k);

double mae(const std::vector<double>& y, const std::vector<double>& y_hat);
double rmse(const std::vector<double>& y, const std::vector<double>& y_hat);
/// Mean of tau*(y - y_hat) for y >= y_hat else (1-tau)*(y_hat - y).
double pinball(const std::vector<double>& y, const std::vector<double>& y_hat, double tau);

inline constexpr const char* kCvMetricNames[] = {
    "MAE_LS",    "MAE_TS",    "RMSE_LS",   "RMSE_TS",   "PL_Q1_LS",
    "PL_Q1_TS",  "PL_Q50_LS", "PL_Q50_TS", "PL_Q99_LS", "PL_Q99_TS",
};
inline constexpr std::size_t kCvMetricCount = 10;

/// Per-combo, per-fold metric table plus fold averages.
struct CvReport {
    std::string target_name;
    std::size_t k = 0;
    std::vector<std::string> combo_names;
    // per_fold[metric][combo][fold]; averaged[metric][combo]
    std::vector<std::vector<std::vector<double>>> per_fold;
    std::vector<std::vector<double>> averaged;

    double value(const std::string& metric, const std::string& combo) const;
    std::string to_json() const;
    /// Table-style CSV: one row per metric, one column per combo (averages).
    std::string to_csv() const;
};

/// Test-set predictions stitched across folds (each row predicted by the
/// fold that holds it out), for figure-style day traces and scatter data.
struct PredictionTrace {
    std::string combo;
    std::vector<EpochSeconds> timestamps;
    std::vector<double> observed;
    std::vector<double> mean_pred;
    std::vector<double> q01;
    std::vector<double> q50;
    std::vector<double> q99;

    std::string to_csv() const;
};

struct CvOutcome {
    CvReport report;
    std::vector<PredictionTrace> traces; // empty unless collect_traces
};

/// For each feature combo and fold: trains the four-model set on the train
/// block, scores MAE/RMSE (mean model) and pinball (quantile models) on the
/// learning and testing sets. Deterministic given the config seed; k must be
/// at least 2.
CvOutcome cross_validate(const BalancingDataset& ds, TargetKind target,
                         const std::vector<FeatureSetSpec>& combos, const GbtConfig& config,
                         std::size_t k = 4, int threads = 1, bool collect_traces = false);

} // namespace imblab
