#include "imblab/time_series.hpp"

#include <utility>

#include "imblab/error.hpp"

namespace imblab {

TimeSeries::TimeSeries(EpochSeconds start, std::int64_t step_seconds,
                       std::vector<double> values, std::string label)
    : start_(start), step_(step_seconds), values_(std::move(values)), label_(std::move(label)) {
    require(step_ > 0, "time series '", label_, "': step must be positive, got ", step_);
    require(!label_.empty(), "time series label must be non-empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!is_missing(v) && !std::isfinite(v))
            fail("time series '", label_, "': non-finite value at index ", i);
    }
}

std::size_t TimeSeries::missing_count() const {
    std::size_t n = 0;
    for (double v : values_)
        if (is_missing(v)) ++n;
    return n;
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    require(first <= size() && count <= size() - first, "slice [", first, ", ", first + count,
            ") out of range for series '", label_, "' of length ", size());
    std::vector<double> vals(values_.begin() + static_cast<std::ptrdiff_t>(first),
                             values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return TimeSeries(timestamp(first), step_, std::move(vals), label_);
}

TimeSeries TimeSeries::relabeled(std::string label) const {
    return TimeSeries(start_, step_, values_, std::move(label));
}

std::int64_t grid_offset(const TimeSeries& a, const TimeSeries& b) {
    require(a.step() == b.step(), "step mismatch between '", a.label(), "' (", a.step(),
            " s) and '", b.label(), "' (", b.step(), " s)");
    const std::int64_t diff = b.start() - a.start();
    require(diff % a.step() == 0, "series '", a.label(), "' and '", b.label(),
            "' are not on the same grid (start difference ", diff, " s, step ", a.step(), " s)");
    return diff / a.step();
}

} // namespace imblab
