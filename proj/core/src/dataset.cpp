#include "imblab/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "imblab/csv.hpp"
#include "imblab/error.hpp"
#include "imblab/series_ops.hpp"
#include "imblab/version.hpp"

namespace imblab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RoleRef {
    const char* name;
    TimeSeries BalancingDataset::* member;
};

constexpr RoleRef kRoles[] = {
    {"ace", &BalancingDataset::ace},
    {"afrr", &BalancingDataset::afrr},
    {"bm", &BalancingDataset::bm},
    {"terre", &BalancingDataset::terre},
    {"pv_obs", &BalancingDataset::pv_obs},
    {"wind_obs", &BalancingDataset::wind_obs},
    {"load_obs", &BalancingDataset::load_obs},
    {"pv_fc_1h", &BalancingDataset::pv_fc_1h},
    {"wind_fc_1h", &BalancingDataset::wind_fc_1h},
    {"load_fc_1h", &BalancingDataset::load_fc_1h},
    {"pv_fc_da", &BalancingDataset::pv_fc_da},
    {"wind_fc_da", &BalancingDataset::wind_fc_da},
    {"load_fc_da", &BalancingDataset::load_fc_da},
};

} // namespace

void BalancingDataset::validate() const {
    require(pv_capacity_mw > 0.0, "dataset: pv capacity must be positive");
    require(wind_capacity_mw > 0.0, "dataset: wind capacity must be positive");
    EpochSeconds latest_start = ace.start();
    EpochSeconds earliest_end = ace.end();
    for (const RoleRef& role : kRoles) {
        const TimeSeries& s = this->*role.member;
        require(!s.empty(), "dataset: series '", role.name, "' is empty");
        latest_start = std::max(latest_start, s.start());
        earliest_end = std::min(earliest_end, s.end());
    }
    require(latest_start < earliest_end, "dataset: series do not share a common time window");
}

BalancingDataset load_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    require(in.good(), "cannot open manifest '", manifest_path, "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail("manifest '", manifest_path, "': invalid JSON: ", e.what());
    }
    require(doc.contains("series"), "manifest '", manifest_path, "': missing 'series' object");

    const fs::path base = fs::path(manifest_path).parent_path();
    auto load_role = [&](const char* role) -> TimeSeries {
        require(doc["series"].contains(role), "manifest '", manifest_path,
                "': missing series role '", role, "'");
        const std::string rel = doc["series"][role].get<std::string>();
        fs::path p(rel);
        if (p.is_relative()) p = base / p;
        std::vector<TimeSeries> cols = parse_csv(p.string(), {role});
        return std::move(cols.front());
    };

    require(doc.contains("pv_capacity_mw") && doc.contains("wind_capacity_mw"), "manifest '",
            manifest_path, "': missing pv_capacity_mw / wind_capacity_mw");
    BalancingDataset ds{
        load_role("ace"),      load_role("afrr"),       load_role("bm"),
        load_role("terre"),    load_role("pv_obs"),     load_role("wind_obs"),
        load_role("load_obs"), load_role("pv_fc_1h"),   load_role("wind_fc_1h"),
        load_role("load_fc_1h"), load_role("pv_fc_da"), load_role("wind_fc_da"),
        load_role("load_fc_da"),
        doc["pv_capacity_mw"].get<double>(),
        doc["wind_capacity_mw"].get<double>(),
    };
    ds.validate();
    return ds;
}

void save_dataset(const BalancingDataset& ds, const std::string& directory) {
    ds.validate();
    fs::create_directories(directory);
    json series;
    for (const RoleRef& role : kRoles) {
        const std::string file = std::string(role.name) + ".csv";
        const TimeSeries& s = ds.*role.member;
        write_csv((fs::path(directory) / file).string(), {s.relabeled(role.name)});
        series[role.name] = file;
    }
    const json doc{{"schema_version", kSchemaVersion},
                   {"series", series},
                   {"pv_capacity_mw", ds.pv_capacity_mw},
                   {"wind_capacity_mw", ds.wind_capacity_mw}};
    std::ofstream out(fs::path(directory) / "manifest.json");
    require(out.good(), "cannot write manifest in '", directory, "'");
    out << doc.dump(2) << '\n';
    require(out.good(), "manifest write failed in '", directory, "'");
}

TimeSeries derive_open_loop_ace(const BalancingDataset& ds) {
    return open_loop_ace(ds.ace, ds.afrr);
}

TimeSeries derive_system_imbalance(const BalancingDataset& ds) {
    TimeSeries ol = derive_open_loop_ace(ds);
    if (ol.step() != 300) ol = resample(ol, 300, Agg::kMean);
    TimeSeries bm = ds.bm.step() == 300 ? ds.bm : resample(ds.bm, 300, Agg::kMean);
    TimeSeries terre = ds.terre.step() == 300 ? ds.terre : resample(ds.terre, 300, Agg::kMean);
    return system_imbalance(ol.relabeled("open_loop_ace"), bm, terre);
}

} // namespace imblab
