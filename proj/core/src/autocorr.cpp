#include "imblab/autocorr.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "imblab/csv.hpp"
#include "imblab/error.hpp"
#include "imblab/parallel.hpp"
#include "imblab/version.hpp"

namespace imblab {

AcfResult acf(const TimeSeries& s, std::size_t max_lag, int threads) {
    const std::size_t n = s.size();
    require(s.missing_count() == 0, "acf: series '", s.label(),
            "' has missing values; resample or fill upstream");
    require(n > max_lag + 1, "acf: series length ", n, " must exceed max_lag + 1 = ",
            max_lag + 1);

    const std::vector<double>& v = s.values();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);

    double denom = 0.0;
    for (double x : v) {
        const double d = x - mean;
        denom += d * d;
    }
    require(denom > 0.0, "acf: series '", s.label(), "' is constant");

    AcfResult result;
    result.values.assign(max_lag + 1, 0.0);
    result.step_seconds = s.step();
    result.n_samples = n;
    result.values[0] = 1.0;

    // Each lag owns its output slot; the inner sum runs in fixed index order.
    parallel_for(max_lag, threads, [&](std::size_t item) {
        const std::size_t k = item + 1;
        double num = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) num += (v[t] - mean) * (v[t + k] - mean);
        result.values[k] = num / denom;
    });
    return result;
}

void write_acf_csv(const AcfResult& r, std::ostream& out) {
    out << "lag,seconds,value\n";
    for (std::size_t k = 0; k < r.values.size(); ++k)
        out << k << ',' << k * static_cast<std::size_t>(r.step_seconds) << ','
            << format_double(r.values[k]) << '\n';
}

std::string acf_summary_json(const AcfResult& r, double threshold) {
    nlohmann::json lags = nlohmann::json::array();
    for (std::size_t k = 1; k < r.values.size(); ++k) {
        if (std::abs(r.values[k]) >= threshold) {
            lags.push_back({{"lag", k},
                            {"seconds", k * static_cast<std::size_t>(r.step_seconds)},
                            {"value", r.values[k]}});
        }
    }
    const nlohmann::json doc{{"schema_version", kSchemaVersion},
                             {"step_seconds", r.step_seconds},
                             {"n_samples", r.n_samples},
                             {"max_lag", r.max_lag()},
                             {"threshold", threshold},
                             {"lags_above_threshold", lags}};
    return doc.dump(2) + "\n";
}

} // namespace imblab
