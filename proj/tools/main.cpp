// imblab command-line pipeline: synthetic data, derived balancing series,
// distribution analysis, autocorrelation, model training, cross-validated
// evaluation and reserve sizing. Reports are JSON, plot data is CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "imblab/analysis.hpp"
#include "imblab/autocorr.hpp"
#include "imblab/csv.hpp"
#include "imblab/dataset.hpp"
#include "imblab/error.hpp"
#include "imblab/evaluation.hpp"
#include "imblab/gbt_io.hpp"
#include "imblab/reserve.hpp"
#include "imblab/series_ops.hpp"
#include "imblab/stats.hpp"
#include "imblab/synthetic.hpp"
#include "imblab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("IMBLAB_LOG");
    if (env == nullptr) return LogLevel::kInfo;
    const std::string v(env);
    if (v == "quiet" || v == "0") return LogLevel::kQuiet;
    if (v == "debug" || v == "2") return LogLevel::kDebug;
    return LogLevel::kInfo;
}

void log_info(const std::string& line) {
    if (log_level() >= LogLevel::kInfo) std::cerr << "imblab: " << line << '\n';
}

void log_debug(const std::string& line) {
    if (log_level() >= LogLevel::kDebug) std::cerr << "imblab: " << line << '\n';
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    imblab::require(out.good(), "cannot open '", path.string(), "' for writing");
    out << content;
    imblab::require(out.good(), "write failed for '", path.string(), "'");
    log_info("wrote " + path.string());
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    std::string out;
    imblab::SyntheticConfig cfg;
};

int run_synth(const SynthArgs& args) {
    const imblab::BalancingDataset ds = imblab::generate(args.cfg);
    imblab::save_dataset(ds, args.out);
    log_info("wrote dataset (" + std::to_string(args.cfg.days) + " days) to " + args.out);
    return 0;
}

// --------------------------------------------------------------- derive ----

struct DeriveArgs {
    std::string manifest;
    std::string out;
};

int run_derive(const DeriveArgs& args) {
    const imblab::BalancingDataset ds = imblab::load_dataset(args.manifest);
    const imblab::TimeSeries ol = imblab::derive_open_loop_ace(ds);
    const imblab::TimeSeries imbalance = imblab::derive_system_imbalance(ds);

    const fs::path dir(args.out);
    fs::create_directories(dir);
    imblab::write_csv((dir / "open_loop_ace.csv").string(), {ol.relabeled("open_loop_ace")});
    imblab::write_csv((dir / "imbalance.csv").string(), {imbalance.relabeled("imbalance")});

    // Reconstruction check: imbalance + BM + TERRE + aFRR == ACE at 300 s.
    const imblab::TimeSeries ace5 = imblab::resample(ds.ace, 300, imblab::Agg::kMean);
    const imblab::TimeSeries afrr5 = imblab::resample(ds.afrr, 300, imblab::Agg::kMean);
    double max_rel = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < imbalance.size(); ++i) {
        const double imb = imbalance[i];
        if (imblab::is_missing(imb)) continue;
        const std::size_t bi = static_cast<std::size_t>(
            (imbalance.timestamp(i) - ds.bm.start()) / ds.bm.step());
        const std::size_t ai =
            static_cast<std::size_t>((imbalance.timestamp(i) - ace5.start()) / 300);
        if (bi >= ds.bm.size() || ai >= ace5.size()) continue;
        const double lhs = imb + ds.bm[bi] + ds.terre[bi] + afrr5[ai];
        const double rhs = ace5[ai];
        if (imblab::is_missing(lhs) || imblab::is_missing(rhs)) continue;
        max_rel = std::max(max_rel, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        ++checked;
    }
    const json summary{{"schema_version", imblab::kSchemaVersion},
                       {"open_loop_ace_rows", ol.size()},
                       {"imbalance_rows", imbalance.size()},
                       {"imbalance_missing", imbalance.missing_count()},
                       {"identity_samples_checked", checked},
                       {"identity_max_rel_error", max_rel}};
    write_text_file(dir / "derive_summary.json", summary.dump(2) + "\n");
    return 0;
}

// -------------------------------------------------------------- analyze ----

struct AnalyzeArgs {
    std::string manifest;
    std::string out;
    std::string target = "imbalance";
    std::string explanatory = "pv_lf";
    std::string bins_csv; // optional explicit edges
    std::size_t min_count = imblab::kDefaultMinBinCount;
};

imblab::TimeSeries target_at_half_hour(const imblab::BalancingDataset& ds,
                                       const std::string& target) {
    const imblab::TimeSeries five_min =
        imblab::target_series(ds, imblab::target_kind_from_name(target));
    return imblab::align_half_hour(five_min);
}

imblab::TimeSeries explanatory_series(const imblab::BalancingDataset& ds,
                                      const std::string& kind) {
    if (kind == "pv_lf") return imblab::load_factor(ds.pv_obs, ds.pv_capacity_mw);
    if (kind == "wind_lf") return imblab::load_factor(ds.wind_obs, ds.wind_capacity_mw);
    if (kind == "load_norm") return imblab::normalize_minmax(ds.load_obs);
    if (kind == "pv_err_1h") return imblab::forecast_error(ds.pv_fc_1h, ds.pv_obs);
    if (kind == "wind_err_1h") return imblab::forecast_error(ds.wind_fc_1h, ds.wind_obs);
    if (kind == "load_err_1h") return imblab::forecast_error(ds.load_fc_1h, ds.load_obs);
    if (kind == "pv_err_da") return imblab::forecast_error(ds.pv_fc_da, ds.pv_obs);
    if (kind == "wind_err_da") return imblab::forecast_error(ds.wind_fc_da, ds.wind_obs);
    if (kind == "load_err_da") return imblab::forecast_error(ds.load_fc_da, ds.load_obs);
    imblab::fail("unknown explanatory variable '", kind, "'");
}

imblab::BinSpec default_bins(const std::string& kind) {
    if (kind == "pv_lf" || kind == "wind_lf") return imblab::BinSpec::load_factor_bins();
    if (kind == "load_norm") return imblab::BinSpec::normalized_bins();
    return imblab::BinSpec::forecast_error_bins();
}

imblab::BinSpec parse_bins(const std::string& csv) {
    imblab::BinSpec spec;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = std::min(csv.find(',', pos), csv.size());
        const std::string token = csv.substr(pos, comma - pos);
        try {
            spec.edges.push_back(std::stod(token));
        } catch (const std::exception&) {
            imblab::fail("invalid bin edge '", token, "'");
        }
        pos = comma + 1;
    }
    spec.validate();
    return spec;
}

int run_analyze(const AnalyzeArgs& args) {
    const imblab::BalancingDataset ds = imblab::load_dataset(args.manifest);
    const imblab::TimeSeries target = target_at_half_hour(ds, args.target);
    const imblab::TimeSeries explanatory = explanatory_series(ds, args.explanatory);
    const imblab::BinSpec bins =
        args.bins_csv.empty() ? default_bins(args.explanatory) : parse_bins(args.bins_csv);

    const imblab::BinnedDistributionReport report =
        imblab::binned_boxplot(target.relabeled(args.target), explanatory, bins, args.min_count);

    const fs::path dir(args.out);
    const std::string stem = args.target + "_by_" + args.explanatory;
    write_text_file(dir / (stem + ".json"), report.to_json());
    write_text_file(dir / (stem + ".csv"), report.to_csv());
    return 0;
}

// ------------------------------------------------------------------ acf ----

struct AcfArgs {
    std::string manifest;
    std::string out;
    std::string series = "open_loop_ace";
    std::string step = "60s";
    std::size_t max_lag = 2880;
    double threshold = 0.1;
    int threads = 0;
};

int run_acf(const AcfArgs& args) {
    const imblab::BalancingDataset ds = imblab::load_dataset(args.manifest);
    const std::int64_t step = imblab::parse_duration_seconds(args.step);

    imblab::TimeSeries base = [&]() -> imblab::TimeSeries {
        if (args.series == "open_loop_ace") return imblab::derive_open_loop_ace(ds);
        if (args.series == "ace") return ds.ace;
        if (args.series == "imbalance") return imblab::derive_system_imbalance(ds);
        imblab::fail("unknown series '", args.series, "' (expected open_loop_ace, ace, imbalance)");
    }();
    if (base.step() != step) base = imblab::resample(base, step, imblab::Agg::kMean);

    const imblab::AcfResult result = imblab::acf(base, args.max_lag, args.threads);
    const fs::path dir(args.out);
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "acf.csv");
        imblab::require(csv.good(), "cannot write acf.csv in '", args.out, "'");
        imblab::write_acf_csv(result, csv);
    }
    log_info("wrote " + (dir / "acf.csv").string());
    write_text_file(dir / "acf_summary.json", imblab::acf_summary_json(result, args.threshold));
    return 0;
}

// -------------------------------------------------------- train/evaluate ----

struct ModelArgs {
    std::string manifest;
    std::string out;
    std::string target = "imbalance";
    std::string combo = "X1+X2+X3";   // train
    std::string combos = "X1+X2+X3,X2,X3"; // evaluate
    std::size_t k = 4;
    imblab::GbtConfig cfg;
    int threads = 0;
    bool no_traces = false;
};

void add_gbt_options(CLI::App* cmd, ModelArgs& args) {
    cmd->add_option("--learning-rate", args.cfg.learning_rate, "Boosting learning rate");
    cmd->add_option("--iterations", args.cfg.max_iterations, "Boosting iterations");
    cmd->add_option("--max-bins", args.cfg.max_bins, "Histogram bins per feature");
    cmd->add_option("--max-leaf-nodes", args.cfg.max_leaf_nodes, "Leaves per tree");
    cmd->add_option("--min-samples-leaf", args.cfg.min_samples_leaf, "Minimum samples per leaf");
    cmd->add_option("--l2", args.cfg.l2_regularization, "L2 regularization");
    cmd->add_option("--seed", args.cfg.seed, "Random seed recorded in the model");
    cmd->add_option("--threads", args.threads, "Worker threads (0 = auto)");
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        out.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

int run_train(const ModelArgs& args) {
    const imblab::BalancingDataset ds = imblab::load_dataset(args.manifest);
    const imblab::TargetKind target = imblab::target_kind_from_name(args.target);
    const imblab::FeatureSetSpec spec = imblab::FeatureSetSpec::from_combo(args.combo);
    const imblab::BuiltFeatures built = imblab::build_features(ds, target, spec);
    log_debug("feature matrix: " + std::to_string(built.matrix.rows()) + " rows, " +
              std::to_string(built.matrix.cols()) + " columns, " +
              std::to_string(built.dropped_rows) + " rows dropped");

    const imblab::QuantileSuite suite =
        imblab::fit_quantile_suite(built.matrix, built.target, args.cfg, args.threads);
    write_text_file(args.out, imblab::suite_to_json(suite, {{"target", args.target},
                                                            {"combo", args.combo}}));
    return 0;
}

int run_evaluate(const ModelArgs& args) {
    const imblab::BalancingDataset ds = imblab::load_dataset(args.manifest);
    const imblab::TargetKind target = imblab::target_kind_from_name(args.target);
    std::vector<imblab::FeatureSetSpec> combos;
    for (const std::string& combo : split_commas(args.combos))
        combos.push_back(imblab::FeatureSetSpec::from_combo(combo));

    const imblab::CvOutcome outcome = imblab::cross_validate(ds, target, combos, args.cfg,
                                                             args.k, args.threads,
                                                             !args.no_traces);
    const fs::path dir(args.out);
    write_text_file(dir / "cv_report.json", outcome.report.to_json());
    write_text_file(dir / "cv_report.csv", outcome.report.to_csv());
    for (const imblab::PredictionTrace& trace : outcome.traces)
        write_text_file(dir / ("predictions_" + trace.combo + ".csv"), trace.to_csv());
    return 0;
}

// ----------------------------------------------------------------- size ----

struct SizeArgs {
    std::string method = "convolution";
    std::string out;
    std::vector<std::string> sample_files;
    double grid_step = imblab::kDefaultGridStepMw;
    double risk = 0.01;
    std::string predictions;
    std::string low_column = "q01";
    std::string high_column = "q99";
};

int run_size(const SizeArgs& args) {
    if (args.method == "convolution") {
        imblab::require(!args.sample_files.empty(),
                        "size --method convolution needs at least one --samples file");
        std::vector<std::vector<double>> sample_sets;
        for (const std::string& path : args.sample_files)
            sample_sets.push_back(imblab::read_samples(path));

        imblab::DiscreteDistribution combined =
            imblab::empirical_to_discrete(sample_sets.front(), args.grid_step);
        for (std::size_t i = 1; i < sample_sets.size(); ++i)
            combined = imblab::convolve(
                combined, imblab::empirical_to_discrete(sample_sets[i], args.grid_step));

        const imblab::ReserveRequirement req =
            imblab::margin_from_distribution(combined, args.risk);
        write_text_file(args.out,
                        imblab::sizing_report_json(req, imblab::samples_digest(sample_sets)));
        return 0;
    }
    if (args.method == "quantiles") {
        imblab::require(!args.predictions.empty(),
                        "size --method quantiles needs --predictions CSV");
        const std::vector<imblab::TimeSeries> cols =
            imblab::parse_csv(args.predictions, {args.low_column, args.high_column});
        const imblab::QuantileSizing sizing =
            imblab::size_from_predicted_quantiles(cols[0], cols[1], args.risk);

        const fs::path dir(args.out);
        write_text_file(dir / "sizing.csv", imblab::quantile_sizing_csv(sizing));

        std::vector<double> up, down;
        for (double v : sizing.upward.values())
            if (!imblab::is_missing(v)) up.push_back(v);
        for (double v : sizing.downward.values())
            if (!imblab::is_missing(v)) down.push_back(v);
        imblab::require(!up.empty(), "sizing produced no complete steps");
        const json summary{{"schema_version", imblab::kSchemaVersion},
                           {"method", "predicted_quantiles"},
                           {"risk", sizing.risk_label},
                           {"steps", sizing.upward.size()},
                           {"crossings_clamped", sizing.crossings},
                           {"upward_mw_max", *std::max_element(up.begin(), up.end())},
                           {"upward_mw_mean", imblab::mean_of(up)},
                           {"downward_mw_max", *std::max_element(down.begin(), down.end())},
                           {"downward_mw_mean", imblab::mean_of(down)},
                           {"window",
                            {{"start", imblab::format_timestamp_utc(sizing.upward.start())},
                             {"end", imblab::format_timestamp_utc(sizing.upward.end())}}}};
        write_text_file(dir / "sizing_summary.json", summary.dump(2) + "\n");
        return 0;
    }
    imblab::fail("unknown sizing method '", args.method, "' (expected convolution or quantiles)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"imblab: system-imbalance analysis, forecasting and reserve sizing"};
    app.set_version_flag("--version", imblab::kVersionString);
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic balancing dataset");
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--days", synth_args.cfg.days, "Days to generate");
    synth->add_option("--seed", synth_args.cfg.seed, "Master seed");
    synth->add_option("--pv-capacity", synth_args.cfg.pv_capacity_mw, "PV capacity, MW");
    synth->add_option("--wind-capacity", synth_args.cfg.wind_capacity_mw, "Wind capacity, MW");
    synth->add_option("--load-min", synth_args.cfg.load_min_mw, "Minimum load, MW");
    synth->add_option("--load-max", synth_args.cfg.load_max_mw, "Maximum load, MW");
    synth->add_option("--phi", synth_args.cfg.ar_phi, "Imbalance AR(1) coefficient at 5 min");
    synth->add_option("--ar-sigma", synth_args.cfg.ar_sigma_mw, "Imbalance AR sigma, MW");
    synth->add_option("--daily-amplitude", synth_args.cfg.daily_amplitude_mw,
                      "Daily imbalance amplitude, MW");
    synth->add_option("--sigma-1h", synth_args.cfg.sigma_fc_1h_mw, "1-hour forecast error sigma");
    synth->add_option("--sigma-da", synth_args.cfg.sigma_fc_da_mw, "Day-ahead forecast error sigma");
    synth->add_option("--alpha", synth_args.cfg.activation_response,
                      "Activation response fraction");
    synth->add_option("--afrr-gain", synth_args.cfg.afrr_gain, "aFRR response fraction");
    synth->add_option("--beta", synth_args.cfg.error_coupling,
                      "Forecast-error coupling into imbalance");

    DeriveArgs derive_args;
    auto* derive = app.add_subcommand("derive", "Compute open-loop ACE and system imbalance");
    derive->add_option("--manifest", derive_args.manifest, "Dataset manifest")->required();
    derive->add_option("--out", derive_args.out, "Output directory")->required();

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "Binned boxplot statistics vs an explanatory variable");
    analyze->add_option("--manifest", analyze_args.manifest, "Dataset manifest")->required();
    analyze->add_option("--out", analyze_args.out, "Output directory")->required();
    analyze->add_option("--target", analyze_args.target, "imbalance or open_loop_ace");
    analyze->add_option("--explanatory", analyze_args.explanatory,
                        "pv_lf, wind_lf, load_norm, pv_err_1h, wind_err_1h, load_err_1h, "
                        "pv_err_da, wind_err_da, load_err_da");
    analyze->add_option("--bins", analyze_args.bins_csv, "Comma-separated bin edges");
    analyze->add_option("--min-count", analyze_args.min_count,
                        "Low-confidence threshold per bin");

    AcfArgs acf_args;
    auto* acf_cmd = app.add_subcommand("acf", "Autocorrelation of a balancing series");
    acf_cmd->add_option("--manifest", acf_args.manifest, "Dataset manifest")->required();
    acf_cmd->add_option("--out", acf_args.out, "Output directory")->required();
    acf_cmd->add_option("--series", acf_args.series, "open_loop_ace, ace or imbalance");
    acf_cmd->add_option("--step", acf_args.step, "Analysis step (e.g. 60s)");
    acf_cmd->add_option("--max-lag", acf_args.max_lag, "Number of lags");
    acf_cmd->add_option("--threshold", acf_args.threshold, "Summary |rho| threshold");
    acf_cmd->add_option("--threads", acf_args.threads, "Worker threads (0 = auto)");

    ModelArgs train_args;
    auto* train = app.add_subcommand("train", "Train the four-model quantile-regression set");
    train->add_option("--manifest", train_args.manifest, "Dataset manifest")->required();
    train->add_option("--out", train_args.out, "Output model JSON path")->required();
    train->add_option("--target", train_args.target, "imbalance or open_loop_ace");
    train->add_option("--combo", train_args.combo, "Feature sets, e.g. X1+X2+X3");
    add_gbt_options(train, train_args);

    ModelArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validated metric table");
    evaluate->add_option("--manifest", eval_args.manifest, "Dataset manifest")->required();
    evaluate->add_option("--out", eval_args.out, "Output directory")->required();
    evaluate->add_option("--target", eval_args.target, "imbalance or open_loop_ace");
    evaluate->add_option("--combos", eval_args.combos, "Comma-separated feature combos");
    evaluate->add_option("--k", eval_args.k, "Number of contiguous folds");
    evaluate->add_flag("--no-traces", eval_args.no_traces, "Skip per-row prediction traces");
    add_gbt_options(evaluate, eval_args);

    SizeArgs size_args;
    auto* size = app.add_subcommand("size", "Reserve sizing from errors or predicted quantiles");
    size->add_option("--method", size_args.method, "convolution or quantiles");
    size->add_option("--out", size_args.out, "Report path (convolution) or directory (quantiles)")
        ->required();
    size->add_option("--samples", size_args.sample_files,
                     "Forecast-error sample file (repeatable)");
    size->add_option("--grid-step", size_args.grid_step, "Convolution grid step, MW");
    size->add_option("--risk", size_args.risk, "Risk level in (0, 0.5) / quantile risk label");
    size->add_option("--predictions", size_args.predictions,
                     "CSV with predicted quantile columns");
    size->add_option("--low-column", size_args.low_column, "Lower quantile column name");
    size->add_option("--high-column", size_args.high_column, "Upper quantile column name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage error
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (derive->parsed()) return run_derive(derive_args);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (acf_cmd->parsed()) return run_acf(acf_args);
        if (train->parsed()) return run_train(train_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (size->parsed()) return run_size(size_args);
    } catch (const imblab::Error& e) {
        std::cerr << "imblab: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "imblab: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
