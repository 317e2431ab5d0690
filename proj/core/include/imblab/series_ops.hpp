#pragma once

#include "imblab/time_series.hpp"

namespace imblab {

enum class Agg { kMean, kFirst };

/// Aggregates blocks of target_step/step consecutive readings. target_step
/// must be an integer multiple of the step; a trailing partial block is
/// dropped, so target_step == step is the identity. kMean ignores missing
/// readings within a block (an all-missing block stays missing); kFirst
/// takes the block's first reading as-is.
TimeSeries resample(const TimeSeries& s, std::int64_t target_step, Agg agg);

/// Picks the first 5-minute slot of each complete half-hour of a 300 s
/// series whose start lies on a half-hour boundary. Output length is
/// floor(input length / 6).
TimeSeries align_half_hour(const TimeSeries& s);

/// ACE minus aFRR activations, pointwise on the overlap of the two grids.
/// Missing on either side stays missing. Throws on step mismatch, grid
/// misalignment, or empty overlap.
TimeSeries open_loop_ace(const TimeSeries& ace, const TimeSeries& afrr);

/// Open-loop ACE minus balancing-mechanism and TERRE activations, pointwise
/// on the common overlap. Positive values mean production surplus.
TimeSeries system_imbalance(const TimeSeries& ol_ace, const TimeSeries& bm,
                            const TimeSeries& terre);

namespace detail {

/// Overlap window of two same-grid series: index of the first shared sample
/// in each, plus the shared length. Throws when the overlap is empty.
struct Overlap {
    std::size_t a_first;
    std::size_t b_first;
    std::size_t length;
    EpochSeconds start;
};
Overlap overlap_window(const TimeSeries& a, const TimeSeries& b);

} // namespace detail

/// Pointwise a - b over the overlap window, missing-propagating.
TimeSeries pointwise_difference(const TimeSeries& a, const TimeSeries& b, std::string label);

} // namespace imblab
