#include "imblab/reserve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include <nlohmann/json.hpp>

#include "imblab/csv.hpp"
#include "imblab/error.hpp"
#include "imblab/series_ops.hpp"
#include "imblab/version.hpp"

namespace imblab {

using nlohmann::json;

void DiscreteDistribution::validate() const {
    require(grid_step_mw > 0.0, "distribution: grid step must be positive");
    require(!probabilities.empty(), "distribution: no mass points");
    double sum = 0.0;
    for (double p : probabilities) {
        require(p >= 0.0 && std::isfinite(p), "distribution: invalid probability ", p);
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "distribution: mass sums to ", sum, ", expected 1");
}

double DiscreteDistribution::quantile(double p) const {
    require(p >= 0.0 && p <= 1.0, "distribution quantile: p outside [0, 1]");
    double cdf = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        cdf += probabilities[i];
        if (cdf >= p) return grid_point(i);
    }
    return grid_point(probabilities.size() - 1); // guard against FP undershoot
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) m += probabilities[i] * grid_point(i);
    return m;
}

double DiscreteDistribution::total_mass() const {
    double sum = 0.0;
    for (double p : probabilities) sum += p;
    return sum;
}

DiscreteDistribution empirical_to_discrete(const std::vector<double>& samples,
                                           double grid_step_mw) {
    require(!samples.empty(), "empirical_to_discrete: no samples");
    require(grid_step_mw > 0.0, "empirical_to_discrete: grid step must be positive");
    double lo = samples[0], hi = samples[0];
    for (double s : samples) {
        require(std::isfinite(s), "empirical_to_discrete: non-finite sample");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const std::size_t n_points =
        static_cast<std::size_t>(std::llround((hi - lo) / grid_step_mw)) + 1;
    DiscreteDistribution d;
    d.grid_origin_mw = lo;
    d.grid_step_mw = grid_step_mw;
    d.probabilities.assign(n_points, 0.0);
    const double weight = 1.0 / static_cast<double>(samples.size());
    for (double s : samples) {
        std::size_t i = static_cast<std::size_t>(std::llround((s - lo) / grid_step_mw));
        i = std::min(i, n_points - 1);
        d.probabilities[i] += weight;
    }
    return d;
}

DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    a.validate();
    b.validate();
    require(std::abs(a.grid_step_mw - b.grid_step_mw) <=
                1e-12 * std::max(a.grid_step_mw, b.grid_step_mw),
            "convolve: grid step mismatch (", a.grid_step_mw, " vs ", b.grid_step_mw, ")");
    DiscreteDistribution out;
    out.grid_origin_mw = a.grid_origin_mw + b.grid_origin_mw;
    out.grid_step_mw = a.grid_step_mw;
    out.probabilities.assign(a.probabilities.size() + b.probabilities.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.probabilities.size(); ++i) {
        const double pa = a.probabilities[i];
        if (pa == 0.0) continue;
        for (std::size_t j = 0; j < b.probabilities.size(); ++j)
            out.probabilities[i + j] += pa * b.probabilities[j];
    }
    return out;
}

std::string sizing_method_name(SizingMethod m) {
    return m == SizingMethod::kConvolution ? "convolution" : "predicted_quantiles";
}

ReserveRequirement margin_from_distribution(const DiscreteDistribution& d, double risk) {
    d.validate();
    require(risk > 0.0 && risk < 0.5, "margin_from_distribution: risk ", risk,
            " outside (0, 0.5)");
    ReserveRequirement req;
    req.method = SizingMethod::kConvolution;
    req.risk_level = risk;
    req.upward_mw = std::max(0.0, -d.quantile(risk));
    req.downward_mw = std::max(0.0, d.quantile(1.0 - risk));
    return req;
}

QuantileSizing size_from_predicted_quantiles(const TimeSeries& q_low, const TimeSeries& q_high,
                                             double risk_label) {
    const auto w = detail::overlap_window(q_low, q_high);
    std::vector<double> up(w.length, kMissing);
    std::vector<double> down(w.length, kMissing);
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < w.length; ++i) {
        double lo = q_low[w.a_first + i];
        double hi = q_high[w.b_first + i];
        if (is_missing(lo) || is_missing(hi)) continue;
        if (lo > hi) {
            // Crossed predictions collapse to their midpoint rather than
            // swapping, so neither side inherits the other's excursion.
            const double mid = 0.5 * (lo + hi);
            lo = mid;
            hi = mid;
            ++crossings;
        }
        up[i] = std::max(0.0, -lo);
        down[i] = std::max(0.0, hi);
    }
    return QuantileSizing{TimeSeries(w.start, q_low.step(), std::move(up), "upward_mw"),
                          TimeSeries(w.start, q_low.step(), std::move(down), "downward_mw"),
                          crossings, risk_label};
}

std::string samples_digest(const std::vector<std::vector<double>>& sample_sets) {
    std::uint64_t hash = 1469598103934665603ull; // FNV-1a offset basis
    auto mix = [&hash](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ull;
        }
    };
    for (const std::vector<double>& set : sample_sets) {
        const std::uint64_t n = set.size();
        mix(&n, sizeof(n));
        for (double v : set) mix(&v, sizeof(v));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string sizing_report_json(const ReserveRequirement& req, const std::string& inputs_digest) {
    json doc{{"schema_version", kSchemaVersion},
             {"method", sizing_method_name(req.method)},
             {"risk", req.risk_level},
             {"upward_mw", req.upward_mw},
             {"downward_mw", req.downward_mw},
             {"inputs_digest", inputs_digest}};
    if (req.window_end > req.window_start) {
        doc["window"] = {{"start", format_timestamp_utc(req.window_start)},
                         {"end", format_timestamp_utc(req.window_end)}};
    } else {
        doc["window"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string quantile_sizing_csv(const QuantileSizing& sizing) {
    std::string out = "timestamp,upward_mw,downward_mw\n";
    for (std::size_t i = 0; i < sizing.upward.size(); ++i) {
        out += format_timestamp_utc(sizing.upward.timestamp(i));
        out += ',';
        if (!is_missing(sizing.upward[i])) out += format_double(sizing.upward[i]);
        out += ',';
        if (!is_missing(sizing.downward[i])) out += format_double(sizing.downward[i]);
        out += '\n';
    }
    return out;
}

} // namespace imblab
