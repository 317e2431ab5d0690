#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imblab/time_series.hpp"

namespace imblab {

/// One-hour-ahead (or day-ahead) error: forecast minus observation, so a
/// positive error means the observation came in below the forecast.
TimeSeries forecast_error(const TimeSeries& forecast, const TimeSeries& observation);

/// Production divided by installed capacity. Values must land in [0, 1.2]
/// (slack for capacity-register lag); anything outside is an error, as is a
/// non-positive capacity. Missing propagates.
TimeSeries load_factor(const TimeSeries& production, double capacity_mw);

/// Min-max normalization over the whole window: (v - min) / (max - min).
/// Requires at least 2 distinct present values (constant series is an
/// error). Missing propagates.
TimeSeries normalize_minmax(const TimeSeries& s);

/// Strictly increasing bin edges in units of the explanatory variable.
struct BinSpec {
    std::vector<double> edges;

    static BinSpec uniform(double lo, double hi, std::size_t bin_count);
    /// Default PV / wind load-factor bins: width 0.1 from 0, last bin
    /// stretched to the 1.2 load-factor cap (6 bins).
    static BinSpec load_factor_bins();
    /// Default forecast-error bins: width 500 MW over [-3000, 3000] (12 bins).
    static BinSpec forecast_error_bins();
    /// Default normalized-consumption bins: width 0.25 over [0, 1] (4 bins).
    static BinSpec normalized_bins();

    void validate() const;
    std::size_t bin_count() const { return edges.size() - 1; }
    /// Bin of x with lo <= x < hi, last bin closed on the right;
    /// -1 when x falls outside [edges.front(), edges.back()].
    int bin_index(double x) const;
};

struct BinStats {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double mean = 0.0;
    double q01 = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double q99 = 0.0;
    double delta_q = 0.0;
    bool low_confidence = true; // count below the minimum-count threshold
};

/// Per-bin boxplot statistics of a target against an explanatory variable.
struct BinnedDistributionReport {
    std::string target_label;
    std::string explanatory_label;
    std::vector<BinStats> bins;
    std::size_t used_pairs = 0;            // sum of bin counts
    std::size_t dropped_missing = 0;       // pairs with either side missing
    std::size_t dropped_out_of_range = 0;  // complete pairs outside the bin edges
    std::size_t min_count_threshold = 0;

    /// JSON document, one record per bin.
    std::string to_json() const;
    /// Plot-ready CSV: bin_midpoint,count,mean,q01,q25,q50,q75,q99,delta_q.
    std::string to_csv() const;
};

inline constexpr std::size_t kDefaultMinBinCount = 20;

/// Pairs the two series on their common 30-minute grid, drops pairs with a
/// missing side, assigns the rest by explanatory value, and computes per-bin
/// statistics with the interpolated quantile. Bins below min_count are kept
/// and flagged low-confidence. Throws when no complete pair overlaps.
BinnedDistributionReport binned_boxplot(const TimeSeries& target, const TimeSeries& explanatory,
                                        const BinSpec& bins,
                                        std::size_t min_count = kDefaultMinBinCount);

} // namespace imblab
