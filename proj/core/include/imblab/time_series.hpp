#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "imblab/timestamp.hpp"

namespace imblab {

/// Marker for an absent reading. Present readings are always finite, so NaN
/// is unambiguous here.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Uniformly sampled, timestamped MW series. Immutable after construction;
/// timestamp(i) = start + i * step. The carrier for every raw and derived
/// series in the toolkit (ACE, activations, generation, consumption, ...).
class TimeSeries {
public:
    /// Throws Error if step <= 0, label is empty, or any present value is
    /// non-finite (missing readings must use kMissing, not infinities).
    TimeSeries(EpochSeconds start, std::int64_t step_seconds, std::vector<double> values,
               std::string label);

    EpochSeconds start() const { return start_; }
    std::int64_t step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<double>& values() const { return values_; }
    const std::string& label() const { return label_; }

    double operator[](std::size_t i) const { return values_[i]; }
    EpochSeconds timestamp(std::size_t i) const {
        return start_ + static_cast<std::int64_t>(i) * step_;
    }
    /// Timestamp one past the covered window.
    EpochSeconds end() const { return timestamp(size()); }

    std::size_t missing_count() const;

    /// Sub-series [first, first + count); throws on out-of-range.
    TimeSeries slice(std::size_t first, std::size_t count) const;

    /// Same data under a different label.
    TimeSeries relabeled(std::string label) const;

private:
    EpochSeconds start_;
    std::int64_t step_;
    std::vector<double> values_;
    std::string label_;
};

/// Index offset of `b`'s grid relative to `a`'s. Both series must share the
/// same step and their grids must coincide (start difference divisible by
/// step); throws otherwise.
std::int64_t grid_offset(const TimeSeries& a, const TimeSeries& b);

} // namespace imblab
