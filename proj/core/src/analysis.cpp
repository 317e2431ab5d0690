#include "imblab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "imblab/csv.hpp"
#include "imblab/error.hpp"
#include "imblab/series_ops.hpp"
#include "imblab/stats.hpp"
#include "imblab/version.hpp"

namespace imblab {

using nlohmann::json;

TimeSeries forecast_error(const TimeSeries& forecast, const TimeSeries& observation) {
    return pointwise_difference(forecast, observation, forecast.label() + "_err");
}

TimeSeries load_factor(const TimeSeries& production, double capacity_mw) {
    require(capacity_mw > 0.0, "load_factor: capacity must be positive, got ", capacity_mw);
    std::vector<double> out(production.size(), kMissing);
    for (std::size_t i = 0; i < production.size(); ++i) {
        const double v = production[i];
        if (is_missing(v)) continue;
        const double lf = v / capacity_mw;
        if (lf > 1.2 || lf < 0.0)
            fail("load_factor: '", production.label(), "' at ",
                 format_timestamp_utc(production.timestamp(i)), " gives load factor ", lf,
                 ", outside [0, 1.2]");
        out[i] = lf;
    }
    return TimeSeries(production.start(), production.step(), std::move(out),
                      production.label() + "_lf");
}

TimeSeries normalize_minmax(const TimeSeries& s) {
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (double v : s.values()) {
        if (is_missing(v)) continue;
        if (!seen) {
            lo = hi = v;
            seen = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    require(seen, "normalize_minmax: '", s.label(), "' has no present values");
    require(hi > lo, "normalize_minmax: '", s.label(),
            "' is constant; need at least 2 distinct values");
    const double span = hi - lo;
    std::vector<double> out(s.size(), kMissing);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!is_missing(s[i])) out[i] = (s[i] - lo) / span;
    return TimeSeries(s.start(), s.step(), std::move(out), s.label() + "_norm");
}

BinSpec BinSpec::uniform(double lo, double hi, std::size_t bin_count) {
    require(bin_count >= 1, "BinSpec::uniform: need at least 1 bin");
    require(hi > lo, "BinSpec::uniform: hi must exceed lo");
    BinSpec spec;
    spec.edges.reserve(bin_count + 1);
    for (std::size_t i = 0; i <= bin_count; ++i)
        spec.edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bin_count));
    return spec;
}

BinSpec BinSpec::load_factor_bins() {
    return BinSpec{{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 1.2}};
}

BinSpec BinSpec::forecast_error_bins() { return uniform(-3000.0, 3000.0, 12); }

BinSpec BinSpec::normalized_bins() { return uniform(0.0, 1.0, 4); }

void BinSpec::validate() const {
    require(edges.size() >= 2, "BinSpec: need at least 2 edges, got ", edges.size());
    for (std::size_t i = 1; i < edges.size(); ++i)
        require(edges[i] > edges[i - 1], "BinSpec: edges must be strictly increasing (edge ", i,
                ")");
}

int BinSpec::bin_index(double x) const {
    if (x < edges.front() || x > edges.back()) return -1;
    if (x == edges.back()) return static_cast<int>(bin_count()) - 1; // last bin closed right
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    return static_cast<int>(it - edges.begin()) - 1;
}

BinnedDistributionReport binned_boxplot(const TimeSeries& target, const TimeSeries& explanatory,
                                        const BinSpec& bins, std::size_t min_count) {
    bins.validate();
    const auto w = detail::overlap_window(target, explanatory);

    BinnedDistributionReport report;
    report.target_label = target.label();
    report.explanatory_label = explanatory.label();
    report.min_count_threshold = min_count;

    std::vector<std::vector<double>> per_bin(bins.bin_count());
    for (std::size_t i = 0; i < w.length; ++i) {
        const double y = target[w.a_first + i];
        const double x = explanatory[w.b_first + i];
        if (is_missing(y) || is_missing(x)) {
            ++report.dropped_missing;
            continue;
        }
        const int b = bins.bin_index(x);
        if (b < 0) {
            ++report.dropped_out_of_range;
            continue;
        }
        per_bin[static_cast<std::size_t>(b)].push_back(y);
    }

    report.bins.resize(bins.bin_count());
    for (std::size_t b = 0; b < bins.bin_count(); ++b) {
        BinStats& st = report.bins[b];
        st.lo = bins.edges[b];
        st.hi = bins.edges[b + 1];
        std::vector<double>& vals = per_bin[b];
        st.count = vals.size();
        st.low_confidence = st.count < min_count;
        report.used_pairs += st.count;
        if (vals.empty()) continue;
        st.mean = mean_of(vals);
        std::sort(vals.begin(), vals.end());
        st.q01 = quantile_sorted(vals, 0.01);
        st.q25 = quantile_sorted(vals, 0.25);
        st.q50 = quantile_sorted(vals, 0.50);
        st.q75 = quantile_sorted(vals, 0.75);
        st.q99 = quantile_sorted(vals, 0.99);
        st.delta_q = st.q99 - st.q01;
    }
    require(report.used_pairs > 0, "binned_boxplot: no complete sample pairs between '",
            target.label(), "' and '", explanatory.label(), "'");
    return report;
}

std::string BinnedDistributionReport::to_json() const {
    json bins_json = json::array();
    for (const BinStats& b : bins) {
        json rec{{"lo", b.lo},
                 {"hi", b.hi},
                 {"count", b.count},
                 {"low_confidence", b.low_confidence}};
        if (b.count > 0) {
            rec["mean"] = b.mean;
            rec["q01"] = b.q01;
            rec["q25"] = b.q25;
            rec["q50"] = b.q50;
            rec["q75"] = b.q75;
            rec["q99"] = b.q99;
            rec["delta_q"] = b.delta_q;
        }
        bins_json.push_back(std::move(rec));
    }
    const json doc{{"schema_version", kSchemaVersion},
                   {"target", target_label},
                   {"explanatory", explanatory_label},
                   {"used_pairs", used_pairs},
                   {"dropped_missing", dropped_missing},
                   {"dropped_out_of_range", dropped_out_of_range},
                   {"min_count_threshold", min_count_threshold},
                   {"bins", bins_json}};
    return doc.dump(2) + "\n";
}

std::string BinnedDistributionReport::to_csv() const {
    std::string out = "bin_midpoint,count,mean,q01,q25,q50,q75,q99,delta_q\n";
    for (const BinStats& b : bins) {
        out += format_double(0.5 * (b.lo + b.hi));
        out += msg(',', b.count);
        if (b.count > 0) {
            for (double v : {b.mean, b.q01, b.q25, b.q50, b.q75, b.q99, b.delta_q}) {
                out += ',';
                out += format_double(v);
            }
        } else {
            out += ",,,,,,,";
        }
        out += '\n';
    }
    return out;
}

} // namespace imblab
