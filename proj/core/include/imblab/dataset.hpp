#pragma once

#include <string>

#include "imblab/time_series.hpp"

namespace imblab {

/// The full bundle of raw balancing series: ACE and activations at their
/// native steps, 30-minute renewable/consumption observations, and the
/// 1-hour-ahead and day-ahead forecasts, plus installed capacities.
struct BalancingDataset {
    TimeSeries ace;
    TimeSeries afrr;
    TimeSeries bm;
    TimeSeries terre;
    TimeSeries pv_obs;
    TimeSeries wind_obs;
    TimeSeries load_obs;
    TimeSeries pv_fc_1h;
    TimeSeries wind_fc_1h;
    TimeSeries load_fc_1h;
    TimeSeries pv_fc_da;
    TimeSeries wind_fc_da;
    TimeSeries load_fc_da;
    double pv_capacity_mw = 0.0;
    double wind_capacity_mw = 0.0;

    /// Positive capacities and a non-empty wall-clock window shared by all
    /// series (steps may differ).
    void validate() const;
};

/// Loads a dataset from a JSON manifest mapping role names to CSV paths
/// (relative paths resolve against the manifest's directory) plus the two
/// capacities. Every role listed in BalancingDataset is required.
BalancingDataset load_dataset(const std::string& manifest_path);

/// Writes one CSV per role into `directory` plus a manifest.json that
/// load_dataset round-trips.
void save_dataset(const BalancingDataset& ds, const std::string& directory);

/// ACE minus aFRR at the ACE step (both must share the step).
TimeSeries derive_open_loop_ace(const BalancingDataset& ds);

/// Open-loop ACE resampled to 300 s (mean) minus BM and TERRE activations.
/// BM/TERRE finer than 300 s are resampled too.
TimeSeries derive_system_imbalance(const BalancingDataset& ds);

} // namespace imblab
