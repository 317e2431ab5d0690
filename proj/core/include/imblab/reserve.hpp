#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imblab/time_series.hpp"

namespace imblab {

/// Probability mass on a uniform MW grid: point i sits at
/// grid_origin + i * grid_step; masses sum to 1 within 1e-9.
struct DiscreteDistribution {
    double grid_origin_mw = 0.0;
    double grid_step_mw = 0.0;
    std::vector<double> probabilities;

    void validate() const;
    double grid_point(std::size_t i) const { return grid_origin_mw + static_cast<double>(i) * grid_step_mw; }
    /// Smallest grid point whose CDF reaches p (conservative, no interpolation).
    double quantile(double p) const;
    double mean() const;
    double total_mass() const;
};

/// Histogram of the samples on a grid spanning [min, max] (nearest grid
/// point, origin at the minimum), normalized to total mass 1.
DiscreteDistribution empirical_to_discrete(const std::vector<double>& samples,
                                           double grid_step_mw);

/// Exact discrete convolution; requires equal grid steps. Mass and mean are
/// preserved; the support is the sum of the supports.
DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b);

inline constexpr double kDefaultGridStepMw = 10.0;

enum class SizingMethod { kConvolution, kPredictedQuantiles };

std::string sizing_method_name(SizingMethod m);

/// Upward/downward margin in MW at a stated risk level. Sign convention:
/// negative combined error or imbalance is a deficit covered by upward
/// reserve.
struct ReserveRequirement {
    double upward_mw = 0.0;
    double downward_mw = 0.0;
    double risk_level = 0.0;
    SizingMethod method = SizingMethod::kConvolution;
    EpochSeconds window_start = 0; // zero/zero when not tied to a window
    EpochSeconds window_end = 0;
};

/// Static margins from a combined forecast-error distribution:
/// upward = max(0, -Q_risk), downward = max(0, Q_{1-risk}). risk must lie in
/// (0, 0.5).
ReserveRequirement margin_from_distribution(const DiscreteDistribution& d, double risk);

/// Per-step dynamic sizing from predicted extreme quantiles.
struct QuantileSizing {
    TimeSeries upward;
    TimeSeries downward;
    std::size_t crossings; // steps where q_low > q_high before clamping
    double risk_label;
};

/// upward = max(0, -q_low), downward = max(0, q_high) per step, after
/// clamping any crossed pair (q_low > q_high) to its midpoint. Missing on
/// either side stays missing; series must share the grid.
QuantileSizing size_from_predicted_quantiles(const TimeSeries& q_low, const TimeSeries& q_high,
                                             double risk_label);

/// FNV-1a digest over the byte representation of the inputs, hex-encoded;
/// recorded in sizing reports so result files name their inputs.
std::string samples_digest(const std::vector<std::vector<double>>& sample_sets);

/// Sizing report JSON: method, risk, margins, window, inputs digest.
std::string sizing_report_json(const ReserveRequirement& req, const std::string& inputs_digest);

/// timestamp,upward_mw,downward_mw rows.
std::string quantile_sizing_csv(const QuantileSizing& sizing);

} // namespace imblab
