#include "imblab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "imblab/error.hpp"
#include "imblab/series_ops.hpp"

namespace imblab {

double mean_of(const std::vector<double>& values) {
    require(!values.empty(), "mean of empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    require(!sorted.empty(), "quantile of empty sequence");
    require(p >= 0.0 && p <= 1.0, "quantile fraction ", p, " outside [0, 1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

double delta_q(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.99) - quantile_sorted(values, 0.01);
}

double pearson_corr(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "pearson_corr: length mismatch (", a.size(), " vs ", b.size(),
            ")");
    require(a.size() >= 2, "pearson_corr: need at least 2 pairs, got ", a.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    require(saa > 0.0, "pearson_corr: first input is constant");
    require(sbb > 0.0, "pearson_corr: second input is constant");
    return sab / std::sqrt(saa * sbb);
}

double pearson_corr(const TimeSeries& a, const TimeSeries& b) {
    const auto w = detail::overlap_window(a, b);
    std::vector<double> xs, ys;
    xs.reserve(w.length);
    ys.reserve(w.length);
    for (std::size_t i = 0; i < w.length; ++i) {
        const double x = a[w.a_first + i];
        const double y = b[w.b_first + i];
        if (!is_missing(x) && !is_missing(y)) {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    return pearson_corr(xs, ys);
}

} // namespace imblab
