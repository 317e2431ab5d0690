#include "imblab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string_view>
#include <vector>

#include "imblab/error.hpp"

namespace imblab {

namespace {

constexpr double kPi = 3.14159265358979323846;
// 2022-05-01T00:00:00Z; day 120 of the year.
constexpr EpochSeconds kWindowStart = 1651363200;
constexpr int kStartDayOfYear = 120;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view name) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Named substream: one series, one engine; streams never interact.
std::mt19937_64 stream(std::uint64_t seed, std::string_view name) {
    return std::mt19937_64(splitmix64(seed ^ fnv1a(name)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// AR(1) path with standard-normal innovations scaled to a stationary sigma.
std::vector<double> ar1_path(std::mt19937_64& rng, std::size_t n, double phi,
                             double stationary_sigma) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innov = stationary_sigma * std::sqrt(1.0 - phi * phi);
    std::vector<double> x(n);
    double state = stationary_sigma * normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state;
        state = phi * state + innov * normal(rng);
    }
    return x;
}

} // namespace

void SyntheticConfig::validate() const {
    require(days >= 1, "synthetic config: days must be at least 1");
    require(pv_capacity_mw > 0.0 && wind_capacity_mw > 0.0,
            "synthetic config: capacities must be positive");
    require(load_max_mw > load_min_mw && load_min_mw > 0.0,
            "synthetic config: need 0 < load_min < load_max");
    require(ar_phi >= 0.0 && ar_phi < 1.0, "synthetic config: phi must lie in [0, 1)");
    require(ar_sigma_mw >= 0.0 && daily_amplitude_mw >= 0.0 && sigma_fc_1h_mw >= 0.0 &&
                sigma_fc_da_mw >= 0.0 && wiggle_sigma_mw >= 0.0,
            "synthetic config: sigmas and amplitudes must be non-negative");
    require(activation_response >= 0.0 && activation_response <= 1.0,
            "synthetic config: activation response must lie in [0, 1]");
    require(afrr_gain >= 0.0 && afrr_gain < 1.0, "synthetic config: afrr gain must lie in [0, 1)");
    require(activation_ramp_mw > 0.0, "synthetic config: ramp must be positive");
    require(noise_tail_dof > 2.0, "synthetic config: tail dof must exceed 2");
    require(error_coupling >= 0.0 && width_coupling >= 0.0,
            "synthetic config: couplings must be non-negative");
}

BalancingDataset generate(const SyntheticConfig& cfg) {
    cfg.validate();
    const std::size_t n30 = static_cast<std::size_t>(cfg.days) * 48;
    const std::size_t n5 = static_cast<std::size_t>(cfg.days) * 288;
    const std::size_t n1 = static_cast<std::size_t>(cfg.days) * 1440;

    // --- 30-minute observations -------------------------------------------
    const double load_mid = 0.5 * (cfg.load_min_mw + cfg.load_max_mw);
    const double load_range = cfg.load_max_mw - cfg.load_min_mw;

    auto season_summer = [](std::size_t day) {
        const int doy = static_cast<int>((kStartDayOfYear + day) % 365);
        return 0.5 * (1.0 + std::cos(2.0 * kPi * static_cast<double>(doy - 172) / 365.0));
    };

    std::vector<double> load30(n30), pv30(n30), wind30(n30);
    {
        auto rng = stream(cfg.seed, "load");
        const std::vector<double> noise = ar1_path(rng, n30, 0.9, 0.015 * load_range);
        for (std::size_t j = 0; j < n30; ++j) {
            const std::size_t day = j / 48;
            const double hour = static_cast<double>(j % 48) * 0.5;
            const int doy = static_cast<int>((kStartDayOfYear + day) % 365);
            const std::int64_t epoch_day = kWindowStart / 86400 + static_cast<std::int64_t>(day);
            const int dow = static_cast<int>((epoch_day + 3) % 7); // 0 = Monday
            double v = load_mid;
            v += 0.16 * load_range * std::cos(2.0 * kPi * static_cast<double>(doy - 15) / 365.0);
            v += 0.14 * load_range *
                 (0.75 * std::sin(2.0 * kPi * (hour - 9.0) / 24.0) +
                  0.25 * std::sin(4.0 * kPi * (hour - 7.0) / 24.0));
            if (dow >= 5) v -= 0.05 * load_range;
            v += noise[j];
            load30[j] = std::clamp(v, cfg.load_min_mw, cfg.load_max_mw);
        }
    }
    {
        auto rng = stream(cfg.seed, "pv_cloud");
        const std::vector<double> cloud = ar1_path(rng, n30, 0.92, 0.9);
        for (std::size_t j = 0; j < n30; ++j) {
            const std::size_t day = j / 48;
            const double hour = static_cast<double>(j % 48) * 0.5;
            const double season = season_summer(day);
            const double sunrise = 7.3 - 1.8 * season;
            const double sunset = 17.7 + 2.8 * season;
            double lf = 0.0;
            if (hour > sunrise && hour < sunset) {
                const double env =
                    std::pow(std::sin(kPi * (hour - sunrise) / (sunset - sunrise)), 1.15);
                const double peak = 0.72 + 0.2 * season;
                const double cloud_factor = 0.35 + 0.65 * sigmoid(cloud[j]);
                lf = env * peak * cloud_factor;
            }
            pv30[j] = cfg.pv_capacity_mw * lf;
        }
    }
    {
        auto rng = stream(cfg.seed, "wind");
        const std::vector<double> w = ar1_path(rng, n30, 0.985, 0.58);
        for (std::size_t j = 0; j < n30; ++j) {
            const double lf = 0.03 + 0.92 * sigmoid(1.4 * w[j] - 0.9);
            wind30[j] = cfg.wind_capacity_mw * lf;
        }
    }

    // --- forecasts: observation + AR(0.8) error, sigma per horizon ---------
    auto make_forecast = [&](const std::vector<double>& obs, std::string_view name, double sigma,
                             bool night_gate, double clamp_lo) {
        auto rng = stream(cfg.seed, name);
        const std::vector<double> err = ar1_path(rng, obs.size(), 0.8, sigma);
        std::vector<double> fc(obs.size());
        for (std::size_t j = 0; j < obs.size(); ++j) {
            if (night_gate && obs[j] == 0.0) {
                fc[j] = 0.0;
                continue;
            }
            fc[j] = std::max(clamp_lo, obs[j] + err[j]);
        }
        return fc;
    };
    const std::vector<double> pv_fc_1h = make_forecast(pv30, "fc_pv_1h", cfg.sigma_fc_1h_mw, true, 0.0);
    const std::vector<double> pv_fc_da = make_forecast(pv30, "fc_pv_da", cfg.sigma_fc_da_mw, true, 0.0);
    const std::vector<double> wind_fc_1h =
        make_forecast(wind30, "fc_wind_1h", cfg.sigma_fc_1h_mw, false, 0.0);
    const std::vector<double> wind_fc_da =
        make_forecast(wind30, "fc_wind_da", cfg.sigma_fc_da_mw, false, 0.0);
    const std::vector<double> load_fc_1h = make_forecast(
        load30, "fc_load_1h", cfg.sigma_fc_1h_mw, false, -1e18);
    const std::vector<double> load_fc_da = make_forecast(
        load30, "fc_load_da", cfg.sigma_fc_da_mw, false, -1e18);

    // --- latent imbalance at 5 minutes --------------------------------------
    // AR(1) with heavy-tailed innovations whose width is modulated by the
    // day-ahead renewable forecasts, plus daily and half-day harmonics, plus
    // a small coupling of the combined 1-hour forecast errors.
    std::vector<double> imbalance5(n5);
    {
        auto rng = stream(cfg.seed, "imbalance_ar");
        std::student_t_distribution<double> tdist(cfg.noise_tail_dof);
        const double unit_scale = std::sqrt((cfg.noise_tail_dof - 2.0) / cfg.noise_tail_dof);
        const double innov_sigma = cfg.ar_sigma_mw * std::sqrt(1.0 - cfg.ar_phi * cfg.ar_phi);
        const double a1 = cfg.daily_amplitude_mw;
        const double a2 = 0.45 * cfg.daily_amplitude_mw;
        double state = cfg.ar_sigma_mw * tdist(rng) * unit_scale;
        for (std::size_t i = 0; i < n5; ++i) {
            const std::size_t j = i / 6; // 30-minute index
            const double width =
                1.0 + cfg.width_coupling * (pv_fc_da[j] / cfg.pv_capacity_mw +
                                            wind_fc_da[j] / cfg.wind_capacity_mw);
            const double frac = static_cast<double>(i % 288) / 288.0;
            const double periodic = a1 * std::sin(2.0 * kPi * frac - 2.1) +
                                    a2 * std::sin(4.0 * kPi * frac + 0.7);
            const double combined_err = (load_fc_1h[j] - load30[j]) - (pv_fc_1h[j] - pv30[j]) -
                                        (wind_fc_1h[j] - wind30[j]);
            imbalance5[i] = state + periodic + cfg.error_coupling * combined_err;
            state = cfg.ar_phi * state + innov_sigma * width * tdist(rng) * unit_scale;
        }
    }

    // --- activations respond to the latent imbalance, rate-limited ----------
    std::vector<double> bm5(n5), terre5(n5);
    {
        double previous = 0.0;
        for (std::size_t i = 0; i < n5; ++i) {
            const double raw = -cfg.activation_response * imbalance5[i];
            const double act = std::clamp(raw, previous - cfg.activation_ramp_mw,
                                          previous + cfg.activation_ramp_mw);
            previous = act;
            bm5[i] = 0.75 * act;
            terre5[i] = 0.25 * act;
        }
    }

    // --- assemble ACE at 1 minute so the identities hold ---------------------
    std::vector<double> ace1(n1), afrr1(n1);
    {
        auto rng = stream(cfg.seed, "ace_wiggle");
        std::vector<double> w = ar1_path(rng, n1, 0.55, cfg.wiggle_sigma_mw);
        for (std::size_t b = 0; b < n5; ++b) { // center per 5-minute block
            double m = 0.0;
            for (std::size_t t = 0; t < 5; ++t) m += w[b * 5 + t];
            m /= 5.0;
            for (std::size_t t = 0; t < 5; ++t) w[b * 5 + t] -= m;
        }
        for (std::size_t t = 0; t < n1; ++t) {
            const std::size_t b = t / 5;
            const double ol = imbalance5[b] + (bm5[b] + terre5[b]) + w[t];
            afrr1[t] = -cfg.afrr_gain * ol;
            ace1[t] = ol + afrr1[t];
        }
    }

    auto series30 = [&](std::vector<double> v, const char* label) {
        return TimeSeries(kWindowStart, 1800, std::move(v), label);
    };
    BalancingDataset ds{
        TimeSeries(kWindowStart, 60, std::move(ace1), "ace"),
        TimeSeries(kWindowStart, 60, std::move(afrr1), "afrr"),
        TimeSeries(kWindowStart, 300, std::move(bm5), "bm"),
        TimeSeries(kWindowStart, 300, std::move(terre5), "terre"),
        series30(std::move(pv30), "pv_obs"),
        series30(std::move(wind30), "wind_obs"),
        series30(std::move(load30), "load_obs"),
        series30(pv_fc_1h, "pv_fc_1h"),
        series30(wind_fc_1h, "wind_fc_1h"),
        series30(load_fc_1h, "load_fc_1h"),
        series30(pv_fc_da, "pv_fc_da"),
        series30(wind_fc_da, "wind_fc_da"),
        series30(load_fc_da, "load_fc_da"),
        cfg.pv_capacity_mw,
        cfg.wind_capacity_mw,
    };
    ds.validate();
    return ds;
}

} // namespace imblab
