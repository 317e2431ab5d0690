#include "imblab/series_ops.hpp"

#include <algorithm>
#include <utility>

#include "imblab/error.hpp"

namespace imblab {

namespace detail {

Overlap overlap_window(const TimeSeries& a, const TimeSeries& b) {
    const std::int64_t offset = grid_offset(a, b); // also checks step equality
    // b's grid index of a's first sample is -offset.
    const std::int64_t a_begin = std::max<std::int64_t>(0, offset);
    const std::int64_t b_begin = std::max<std::int64_t>(0, -offset);
    const std::int64_t a_len = static_cast<std::int64_t>(a.size()) - a_begin;
    const std::int64_t b_len = static_cast<std::int64_t>(b.size()) - b_begin;
    const std::int64_t len = std::min(a_len, b_len);
    require(len > 0, "series '", a.label(), "' and '", b.label(), "' have no overlapping window");
    return Overlap{static_cast<std::size_t>(a_begin), static_cast<std::size_t>(b_begin),
                   static_cast<std::size_t>(len), a.timestamp(static_cast<std::size_t>(a_begin))};
}

} // namespace detail

TimeSeries pointwise_difference(const TimeSeries& a, const TimeSeries& b, std::string label) {
    const auto w = detail::overlap_window(a, b);
    std::vector<double> out(w.length, kMissing);
    for (std::size_t i = 0; i < w.length; ++i) {
        const double x = a[w.a_first + i];
        const double y = b[w.b_first + i];
        if (!is_missing(x) && !is_missing(y)) out[i] = x - y;
    }
    return TimeSeries(w.start, a.step(), std::move(out), std::move(label));
}

TimeSeries resample(const TimeSeries& s, std::int64_t target_step, Agg agg) {
    require(target_step > 0, "resample: target step must be positive");
    require(target_step % s.step() == 0, "resample: target step ", target_step,
            " s is not an integer multiple of the input step ", s.step(), " s");
    const std::size_t ratio = static_cast<std::size_t>(target_step / s.step());
    if (ratio == 1) return s;

    const std::size_t n_out = s.size() / ratio;
    std::vector<double> out(n_out, kMissing);
    for (std::size_t j = 0; j < n_out; ++j) {
        const std::size_t base = j * ratio;
        if (agg == Agg::kFirst) {
            out[j] = s[base];
            continue;
        }
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t k = 0; k < ratio; ++k) {
            const double v = s[base + k];
            if (!is_missing(v)) {
                sum += v;
                ++present;
            }
        }
        if (present > 0) out[j] = sum / static_cast<double>(present);
    }
    return TimeSeries(s.start(), target_step, std::move(out), s.label());
}

TimeSeries align_half_hour(const TimeSeries& s) {
    require(s.step() == 300, "align_half_hour: input must be at 300 s step, got ", s.step(), " s");
    require(s.start() % 1800 == 0, "align_half_hour: series '", s.label(),
            "' does not start on a half-hour boundary (", format_timestamp_utc(s.start()), ")");
    const std::size_t n_out = s.size() / 6;
    std::vector<double> out(n_out, kMissing);
    for (std::size_t j = 0; j < n_out; ++j) out[j] = s[j * 6];
    return TimeSeries(s.start(), 1800, std::move(out), s.label());
}

TimeSeries open_loop_ace(const TimeSeries& ace, const TimeSeries& afrr) {
    return pointwise_difference(ace, afrr, "open_loop_ace");
}

TimeSeries system_imbalance(const TimeSeries& ol_ace, const TimeSeries& bm,
                            const TimeSeries& terre) {
    TimeSeries after_bm = pointwise_difference(ol_ace, bm, "imbalance");
    return pointwise_difference(after_bm, terre, "imbalance");
}

} // namespace imblab
