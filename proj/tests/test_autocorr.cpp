#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imblab/autocorr.hpp"
#include "imblab/error.hpp"
#include "test_helpers.hpp"

using imblab::AcfResult;
using imblab::TimeSeries;
using testutil::series;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Direct O(n*k) double-loop estimator, written independently of the library.
std::vector<double> acf_oracle(const std::vector<double>& v, std::size_t max_lag) {
    const std::size_t n = v.size();
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double denom = 0;
    for (double x : v) denom += (x - mean) * (x - mean);
    std::vector<double> rho(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double num = 0;
        for (std::size_t t = 0; t + k < n; ++t) num += (v[t] - mean) * (v[t + k] - mean);
        rho[k] = num / denom;
    }
    return rho;
}

} // namespace

TEST_CASE("acf at lag zero is exactly one") {
    std::mt19937_64 rng(1);
    const auto r = imblab::acf(series(testutil::random_values(rng, 300, -5, 5), 60), 50);
    CHECK(r.values[0] == 1.0);
    CHECK(r.max_lag() == 50);
    CHECK(r.n_samples == 300);
}

TEST_CASE("acf of a sine recovers the period") {
    const std::size_t period = 1440;
    const std::size_t n = period * 20;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::sin(2.0 * kPi * static_cast<double>(i) / static_cast<double>(period));
    const auto r = imblab::acf(series(v, 60), period + 10);
    CHECK(r.values[period] >= 0.99);
    CHECK(r.values[period / 2] <= -0.9); // antiphase
}

TEST_CASE("acf of seeded iid noise stays inside the 2/sqrt(n) band") {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(10000);
    for (double& x : v) x = normal(rng);
    const auto r = imblab::acf(series(v, 60), 100);
    for (std::size_t k = 1; k <= 100; ++k) CHECK(std::abs(r.values[k]) < 0.05);
}

TEST_CASE("acf is invariant under positive affine transforms") {
    std::mt19937_64 rng(9);
    std::vector<double> v = testutil::random_values(rng, 2000, -10, 10);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = 0.8 * v[i - 1] + v[i]; // add memory
    std::vector<double> scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = 3.7 * v[i] + 42.0;

    const auto a = imblab::acf(series(v, 60), 200);
    const auto b = imblab::acf(series(scaled, 60), 200);
    for (std::size_t k = 0; k <= 200; ++k) {
        CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-9);
        CHECK(std::abs(a.values[k]) <= 1.0 + 1e-12);
    }
}

TEST_CASE("acf matches the direct double-loop oracle at n = 5000") {
    std::mt19937_64 rng(21);
    std::vector<double> v = testutil::random_values(rng, 5000, -100, 100);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = 0.9 * v[i - 1] + 0.1 * v[i];
    const auto got = imblab::acf(series(v, 60), 400, 4);
    const auto expected = acf_oracle(v, 400);
    for (std::size_t k = 0; k <= 400; ++k)
        CHECK(std::abs(got.values[k] - expected[k]) <= 1e-9);
}

TEST_CASE("acf results do not depend on the thread count") {
    std::mt19937_64 rng(33);
    std::vector<double> v = testutil::random_values(rng, 4000, -50, 50);
    const auto one = imblab::acf(series(v, 60), 300, 1);
    const auto four = imblab::acf(series(v, 60), 300, 4);
    for (std::size_t k = 0; k <= 300; ++k) CHECK(one.values[k] == four.values[k]);
}

TEST_CASE("acf contract violations") {
    CHECK_THROWS_WITH_AS(static_cast<void>(imblab::acf(
                             series({1.0, imblab::kMissing, 3.0, 4.0, 5.0}, 60), 2)),
                         doctest::Contains("missing"), imblab::Error);
    CHECK_THROWS_AS(static_cast<void>(imblab::acf(series({1, 2, 3}, 60), 2)), imblab::Error);
    CHECK_THROWS_WITH_AS(static_cast<void>(imblab::acf(series({5, 5, 5, 5, 5}, 60), 2)),
                         doctest::Contains("constant"), imblab::Error);
}

TEST_CASE("acf csv and summary outputs") {
    std::mt19937_64 rng(2);
    std::vector<double> v = testutil::random_values(rng, 500, -5, 5);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = 0.95 * v[i - 1] + 0.2 * v[i];
    const auto r = imblab::acf(series(v, 60), 100);

    std::ostringstream csv;
    imblab::write_acf_csv(r, csv);
    CHECK(std::count(csv.str().begin(), csv.str().end(), '\n') == 102); // header + 101 lags

    const auto summary = nlohmann::json::parse(imblab::acf_summary_json(r, 0.3));
    CHECK(summary["max_lag"] == 100);
    CHECK(summary["threshold"] == 0.3);
    for (const auto& entry : summary["lags_above_threshold"])
        CHECK(std::abs(entry["value"].get<double>()) >= 0.3);
}
