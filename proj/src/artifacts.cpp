#include "pitchvalue/artifacts.hpp"

#include "pitchvalue/error.hpp"
#include "text_util.hpp"

#include <cmath>

namespace pitchvalue {

nlohmann::json schema_to_json(const FeatureSchema& schema) {
    nlohmann::json types = nlohmann::json::array();
    for (auto e : schema.event_types) types.push_back(std::string(event_type_code(e)));
    return {{"pitch", {{"length", schema.pitch.length}, {"width", schema.pitch.width}}},
            {"half_length", schema.half_length},
            {"score_difference", schema.score_difference},
            {"event_types", types},
            {"features", schema.feature_names()},
            {"hash", schema.hash()}};
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
    try {
        FeatureSchema s;
        s.pitch.length = j.at("pitch").at("length").get<double>();
        s.pitch.width = j.at("pitch").at("width").get<double>();
        s.half_length = j.at("half_length").get<double>();
        s.score_difference = j.at("score_difference").get<bool>();
        s.event_types.clear();
        for (const auto& code : j.at("event_types")) {
            auto e = parse_event_type(code.get<std::string>());
            if (!e) throw Error("schema", "unknown event type in model schema: " + code.get<std::string>());
            s.event_types.push_back(*e);
        }
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error("schema", std::string("malformed model schema: ") + e.what());
    }
}

nlohmann::json training_meta(const FeatureSchema& schema, const FviConfig& cfg, const FviResult& result,
                             std::size_t episodes) {
    nlohmann::json j;
    j["schema"] = schema_to_json(schema);
    j["gamma"] = cfg.gamma;
    j["regressor"] = std::string(regressor_kind_name(cfg.regressor.kind));
    if (cfg.regressor.kind == RegressorKind::Forest) {
        const auto& f = cfg.regressor.forest;
        j["forest"] = {{"n_trees", f.n_trees},
                       {"max_depth", f.max_depth},
                       {"min_samples_leaf", f.min_samples_leaf},
                       {"bootstrap", f.bootstrap},
                       {"feature_fraction", f.feature_fraction}};
    }
    j["seed"] = cfg.seed;
    j["train_fraction"] = cfg.train_fraction;
    j["max_iterations"] = cfg.max_iterations;
    j["tolerance"] = cfg.tolerance;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["episodes"] = episodes;
    j["train_episodes"] = result.train_episodes.size();
    j["valid_episodes"] = result.valid_episodes.size();
    // JSON has no NaN; an empty validation split is recorded as null.
    if (std::isfinite(result.valid_rmse)) j["valid_rmse"] = result.valid_rmse;
    else j["valid_rmse"] = nullptr;
    if (!result.history.empty() && std::isfinite(result.history.back().train_rmse))
        j["train_rmse"] = result.history.back().train_rmse;
    return j;
}

ValueModel load_value_model(const std::filesystem::path& path) {
    ValueModel vm;
    vm.loaded = load_model(path);
    if (!vm.loaded.meta.contains("schema")) throw Error("schema", "model file carries no feature schema");
    const auto& js = vm.loaded.meta.at("schema");
    vm.schema = schema_from_json(js);
    const std::string recorded = js.value("hash", std::string{});
    if (recorded != vm.schema.hash()) {
        throw Error("schema", "model schema mismatch: recorded " + recorded + ", rebuilt " + vm.schema.hash());
    }
    if (vm.loaded.model->dims() != vm.schema.dims()) {
        throw Error("schema", "model expects " + std::to_string(vm.loaded.model->dims()) +
                                  " features but its schema has " + std::to_string(vm.schema.dims()));
    }
    return vm;
}

int parse_goals(std::string_view s, const char* what) {
    auto v = detail::to_int(s);
    if (!v || *v < 0 || *v > 99) throw Error("query", std::string("bad ") + what + ": '" + std::string(s) + "'");
    return static_cast<int>(*v);
}

std::pair<int, int> parse_score(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) {
        throw Error("query", "score must look like own:opp, got '" + std::string(s) + "'");
    }
    return {parse_goals(s.substr(0, colon), "own score"), parse_goals(s.substr(colon + 1), "opp score")};
}

double parse_number(std::string_view s, const char* what) {
    auto v = detail::to_double(s);
    if (!v || !std::isfinite(*v)) throw Error("query", std::string("bad ") + what + ": '" + std::string(s) + "'");
    return *v;
}

EventType require_event_type(std::string_view s) {
    auto e = parse_event_type(s);
    if (!e) throw Error("query", "unknown event type '" + std::string(s) + "'");
    return *e;
}

Side require_side(std::string_view s) {
    auto h = parse_side(s);
    if (!h) throw Error("query", "side must be home or away, got '" + std::string(s) + "'");
    return *h;
}

std::string format_value(double v) { return nlohmann::json(v).dump(); }

}  // namespace pitchvalue
