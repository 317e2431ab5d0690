#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "imblab/time_series.hpp"

namespace imblab {

/// Autocorrelation estimates for lags 0..max_lag, values[0] == 1 exactly.
struct AcfResult {
    std::vector<double> values;   // one per lag, |value| <= 1
    std::int64_t step_seconds = 0;
    std::size_t n_samples = 0;

    std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
};

/// Biased autocorrelation estimator with the full-series mean:
///   rho(k) = sum_t (v_t - m)(v_{t+k} - m) / sum_t (v_t - m)^2.
/// The series must be complete (no missing values) and longer than
/// max_lag + 1; a constant series is an error. Direct O(n * max_lag)
/// computation; lags are independent work items, so thread count never
/// changes the result.
AcfResult acf(const TimeSeries& s, std::size_t max_lag, int threads = 1);

/// lag,seconds,value rows (one per lag, plus header).
void write_acf_csv(const AcfResult& r, std::ostream& out);

/// JSON summary listing the lags whose |rho| reaches the threshold,
/// mirroring the peak-enumeration style of ACF reports.
std::string acf_summary_json(const AcfResult& r, double threshold);

} // namespace imblab
