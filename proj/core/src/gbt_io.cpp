#include "imblab/gbt_io.hpp"

#include <nlohmann/json.hpp>

#include "imblab/error.hpp"
#include "imblab/version.hpp"

namespace imblab {

using nlohmann::json;

namespace {

json config_to_json(const GbtConfig& c) {
    json j{{"loss", c.loss.kind == LossKind::kSquared ? "squared" : "pinball"},
           {"learning_rate", c.learning_rate},
           {"max_iterations", c.max_iterations},
           {"max_bins", c.max_bins},
           {"max_leaf_nodes", c.max_leaf_nodes},
           {"min_samples_leaf", c.min_samples_leaf},
           {"l2_regularization", c.l2_regularization},
           {"seed", c.seed}};
    if (c.loss.kind == LossKind::kPinball) j["tau"] = c.loss.tau;
    return j;
}

GbtConfig config_from_json(const json& j) {
    GbtConfig c;
    const std::string loss = j.at("loss").get<std::string>();
    if (loss == "squared") {
        c.loss = GbtLoss::squared();
    } else if (loss == "pinball") {
        c.loss = GbtLoss::pinball(j.at("tau").get<double>());
    } else {
        fail("model JSON: unknown loss kind '", loss, "'");
    }
    c.learning_rate = j.at("learning_rate").get<double>();
    c.max_iterations = j.at("max_iterations").get<int>();
    c.max_bins = j.at("max_bins").get<int>();
    c.max_leaf_nodes = j.at("max_leaf_nodes").get<int>();
    c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    c.l2_regularization = j.at("l2_regularization").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf) {
            nodes.push_back(json{{"leaf", n.leaf_value}});
        } else {
            nodes.push_back(json{{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"missing_left", n.missing_goes_left},
                                 {"left", n.left},
                                 {"right", n.right}});
        }
    }
    return json{{"nodes", nodes}};
}

Tree tree_from_json(const json& j) {
    Tree tree;
    for (const json& nj : j.at("nodes")) {
        TreeNode n;
        if (nj.contains("leaf")) {
            n.is_leaf = true;
            n.leaf_value = nj.at("leaf").get<double>();
        } else {
            n.is_leaf = false;
            n.feature = nj.at("feature").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.missing_goes_left = nj.at("missing_left").get<bool>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
        }
        tree.nodes.push_back(n);
    }
    return tree;
}

json model_to_json_value(const GbtModel& m) {
    json trees = json::array();
    for (const Tree& t : m.trees) trees.push_back(tree_to_json(t));
    return json{{"schema_version", kSchemaVersion},
                {"kind", "gbt_model"},
                {"config", config_to_json(m.config)},
                {"feature_names", m.feature_names},
                {"bin_thresholds", m.bin_thresholds},
                {"baseline", m.baseline},
                {"trees", trees},
                {"training_loss", m.training_loss}};
}

GbtModel model_from_json_value(const json& j) {
    require(j.at("schema_version").get<int>() == kSchemaVersion,
            "model JSON: unsupported schema_version");
    require(j.at("kind").get<std::string>() == "gbt_model", "model JSON: unexpected kind");
    GbtModel m;
    m.config = config_from_json(j.at("config"));
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.bin_thresholds = j.at("bin_thresholds").get<std::vector<std::vector<double>>>();
    m.baseline = j.at("baseline").get<double>();
    for (const json& tj : j.at("trees")) m.trees.push_back(tree_from_json(tj));
    m.training_loss = j.at("training_loss").get<std::vector<double>>();
    for (const Tree& t : m.trees)
        for (const TreeNode& n : t.nodes)
            if (!n.is_leaf)
                require(n.feature >= 0 &&
                            n.feature < static_cast<int>(m.feature_names.size()),
                        "model JSON: split references feature ", n.feature, " out of range");
    return m;
}

} // namespace

std::string model_to_json(const GbtModel& model) {
    return model_to_json_value(model).dump(2) + "\n";
}

GbtModel model_from_json(const std::string& text) {
    return model_from_json_value(json::parse(text));
}

std::string suite_to_json(const QuantileSuite& suite,
                          const std::map<std::string, std::string>& metadata) {
    json doc{{"schema_version", kSchemaVersion},
             {"kind", "gbt_quantile_suite"},
             {"mean", model_to_json_value(suite.mean_model)},
             {"q01", model_to_json_value(suite.q01)},
             {"q50", model_to_json_value(suite.q50)},
             {"q99", model_to_json_value(suite.q99)}};
    for (const auto& [key, value] : metadata) doc[key] = value;
    return doc.dump(2) + "\n";
}

QuantileSuite suite_from_json(const std::string& text) {
    const json doc = json::parse(text);
    require(doc.at("schema_version").get<int>() == kSchemaVersion,
            "suite JSON: unsupported schema_version");
    require(doc.at("kind").get<std::string>() == "gbt_quantile_suite",
            "suite JSON: unexpected kind");
    QuantileSuite suite;
    suite.mean_model = model_from_json_value(doc.at("mean"));
    suite.q01 = model_from_json_value(doc.at("q01"));
    suite.q50 = model_from_json_value(doc.at("q50"));
    suite.q99 = model_from_json_value(doc.at("q99"));
    return suite;
}

} // namespace imblab
