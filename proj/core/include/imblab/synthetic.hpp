#pragma once

#include <cstdint>

#include "imblab/dataset.hpp"

namespace imblab {

/// Knobs for the desk-scale dataset generator. Defaults give roughly the
/// magnitudes of a large national system scaled to a testable size: a
/// strongly autocorrelated 5-minute imbalance with daily structure,
/// activations absorbing most of it, and forecasts whose day-ahead errors
/// are wider than the 1-hour-ahead ones.
struct SyntheticConfig {
    std::uint64_t seed = 1;
    int days = 450; // roughly a May-to-July-next-year span

    double pv_capacity_mw = 15000.0;
    double wind_capacity_mw = 20000.0;
    double load_min_mw = 30000.0;
    double load_max_mw = 80000.0;

    /// AR(1) coefficient of the latent imbalance at the 5-minute step.
    double ar_phi = 0.85;
    /// Stationary standard deviation of the AR component, MW.
    double ar_sigma_mw = 230.0;
    /// Daily-seasonal imbalance amplitude, MW (a half-day harmonic at 0.45x
    /// rides on top).
    double daily_amplitude_mw = 240.0;
    /// Student-t degrees of freedom for the AR innovations (heavy tails).
    double noise_tail_dof = 5.0;

    double sigma_fc_1h_mw = 150.0;
    double sigma_fc_da_mw = 500.0;

    /// Fraction of the latent imbalance absorbed by BM+TERRE activations.
    double activation_response = 0.6; // alpha
    /// Activation ramp limit per 5-minute step, MW.
    double activation_ramp_mw = 500.0;
    /// Fraction of the open-loop ACE met by aFRR.
    double afrr_gain = 0.25; // gamma
    /// Coupling of combined 1-hour forecast errors into the imbalance.
    double error_coupling = 0.1; // beta
    /// Day-ahead-forecast-driven modulation of the innovation width (makes
    /// distribution tails day-ahead predictable).
    double width_coupling = 0.5;
    /// 1-minute texture inside each 5-minute block of the ACE, MW.
    double wiggle_sigma_mw = 25.0;

    void validate() const;
};

/// Deterministic, seeded generation: every series draws from its own named
/// substream of the master seed, so adding or resizing one series never
/// perturbs the others. The assembled ACE satisfies the reconstruction
/// identity (imbalance + BM + TERRE + aFRR = ACE) by construction.
///
/// Steps: ACE and aFRR at 60 s, BM and TERRE at 300 s, observations and
/// forecasts at 1800 s. The window starts 2022-05-01T00:00:00Z.
BalancingDataset generate(const SyntheticConfig& cfg);

} // namespace imblab
