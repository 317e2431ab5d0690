#pragma once

#include <vector>

#include "imblab/time_series.hpp"

namespace imblab {

double mean_of(const std::vector<double>& values);

/// Linear-interpolation quantile on order statistics: with sorted values
/// v[0..n-1] and h = (n-1)*p, returns v[floor(h)] + frac(h) * (v[floor(h)+1]
/// - v[floor(h)]). Throws on empty input or p outside [0, 1].
double quantile(std::vector<double> values, double p);

/// quantile() for inputs already sorted ascending (no copy, no sort).
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Q99 - Q1 distribution width. Throws on empty input.
double delta_q(std::vector<double> values);

/// Sample Pearson correlation over the complete (both present) pairs of the
/// overlap window. Throws if fewer than 2 complete pairs or either side is
/// constant over those pairs.
double pearson_corr(const TimeSeries& a, const TimeSeries& b);

/// Vector form; inputs must have equal length.
double pearson_corr(const std::vector<double>& a, const std::vector<double>& b);

} // namespace imblab
