#pragma once

#include "pitchvalue/board.hpp"
#include "pitchvalue/chain.hpp"
#include "pitchvalue/fvi.hpp"
#include "pitchvalue/regressors.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pitchvalue {

nlohmann::json schema_to_json(const FeatureSchema& schema);  // includes "hash"
FeatureSchema schema_from_json(const nlohmann::json& j);

// Header metadata stored with a trained model.
nlohmann::json training_meta(const FeatureSchema& schema, const FviConfig& cfg, const FviResult& result,
                             std::size_t episodes);

// A loaded model whose stored schema has been rebuilt and checked against
// its recorded hash and the model's input size.
struct ValueModel {
    LoadedModel loaded;
    FeatureSchema schema;

    const Regressor& model() const { return *loaded.model; }
    const nlohmann::json& meta() const { return loaded.meta; }
};

ValueModel load_value_model(const std::filesystem::path& path);

// "2:1" -> {2, 1}. Scores are non-negative integers.
std::pair<int, int> parse_score(std::string_view s);
int parse_goals(std::string_view s, const char* what);
double parse_number(std::string_view s, const char* what);
EventType require_event_type(std::string_view s);
Side require_side(std::string_view s);

// Shared by the CLI and the HTTP service so both print the same digits.
std::string format_value(double v);

}  // namespace pitchvalue
