#include "mmrec/experiment.hpp"

#include <algorithm>

#include "mmrec/error.hpp"
#include "mmrec/user_model.hpp"

namespace mmrec {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Weighting keys only matter when weighting is enabled; validate their
// values against an enabled config so a space can list them independently.
KeyValues probe_for(const std::string& key, const std::string& value) {
    KeyValues kv{{key, value}};
    if (key.starts_with("weighting.")) {
        if (key != "weighting.enabled") kv["weighting.enabled"] = "true";
        if (key != "weighting.metrics") kv["weighting.metrics"] = "depth";
    }
    if (key == "features.scheme") kv["features.type"] = "both";
    if (key == "features.type") kv["features.scheme"] = value == "citations" ? "cc_only" : "tf_only";
    return kv;
}

}  // namespace

VariableSpace::VariableSpace(std::map<std::string, std::vector<std::string>> candidates)
    : candidates_(std::move(candidates)) {
    const auto& keys = config_keys();
    for (const auto& [key, values] : candidates_) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw Error(Errc::invalid_config, "unknown variable '" + key + "'");
        if (values.empty())
            throw Error(Errc::invalid_config, "variable '" + key + "' has no candidates");
        for (const auto& value : values) from_key_values(probe_for(key, value));
    }
}

VariableSpace parse_variable_space(std::string_view text) {
    std::map<std::string, std::vector<std::string>> candidates;
    for (const auto& [key, list] : parse_key_values(text)) {
        std::vector<std::string> values;
        std::string_view rest = list;
        while (true) {
            auto comma = rest.find(',');
            values.emplace_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        candidates.emplace(key, std::move(values));
    }
    return VariableSpace(std::move(candidates));
}

VariableSpace default_variable_space() {
    return VariableSpace({
        {"selection.map_limit", {"none", "1", "2", "3", "5", "10"}},
        {"selection.node_limit",
         {"none", "1", "5", "10", "20", "50", "75", "100", "250", "500", "1000"}},
        {"selection.day_window", {"none", "7", "30", "90", "180", "365"}},
        {"selection.event_kind", {"created", "edited", "moved", "any"}},
        {"selection.visibility", {"visible_only", "invisible_only", "all"}},
        {"selection.extension",
         {"none", "children", "siblings", "parents", "children+siblings",
          "children+parents", "siblings+parents", "children+siblings+parents"}},
        {"weighting.enabled", {"true", "false"}},
        {"weighting.metrics",
         {"depth:stronger", "depth:weaker", "children:stronger", "children:weaker",
          "siblings:stronger", "siblings:weaker", "term_count:stronger", "term_count:weaker",
          "depth:stronger+siblings:stronger"}},
        {"weighting.transform", {"abs", "ln", "log10", "sqrt"}},
        {"weighting.combiner", {"sum", "max", "product", "avg"}},
        {"features.type", {"terms", "citations", "both"}},
        {"features.scheme", {"tf_only", "tf_idf", "tf_iduf", "cc_only", "cc_idf"}},
        {"features.remove_stopwords", {"true", "false"}},
        {"features.model_size",
         {"1", "5", "10", "20", "35", "50", "100", "250", "500", "1000"}},
        {"features.store_weights", {"true", "false"}},
    });
}

AlgorithmConfig random_config(const VariableSpace& space, Rng& rng) {
    KeyValues drawn;
    for (const auto& key : config_keys()) {
        auto it = space.candidates().find(key);
        if (it == space.candidates().end()) continue;
        const auto& values = it->second;
        drawn[key] = values[static_cast<std::size_t>(uniform_index(rng, values.size()))];
    }
    if (auto it = drawn.find("weighting.enabled"); it != drawn.end() && it->second == "true" &&
                                                   !drawn.count("weighting.metrics"))
        drawn["weighting.metrics"] = "depth";

    const FeatureType type =
        drawn.count("features.type") ? parse_feature_type(drawn["features.type"]) : FeatureType::terms;
    const Scheme scheme =
        drawn.count("features.scheme") ? parse_scheme(drawn["features.scheme"]) : Scheme::tf_only;
    drawn["features.scheme"] = std::string(to_string(repair_scheme(type, scheme)));
    return from_key_values(drawn);
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"mindmeister_last_node", "current_map_all_terms",
                                                   "all_maps_all_terms", "stereotype",
                                                   "docear_combined"};
    return names;
}

AlgorithmConfig preset(std::string_view name) {
    AlgorithmConfig config;
    config.preset_name = std::string(name);
    config.features.feature_type = FeatureType::terms;
    config.features.scheme = Scheme::tf_only;
    config.features.remove_stopwords = false;
    config.features.model_size = kUnboundedModel;
    config.features.store_weights = true;

    if (name == "mindmeister_last_node") {
        config.selection.node_limit = 1;
        config.selection.event_kind = EventKindFilter::any;
        return config;
    }
    if (name == "current_map_all_terms") {
        config.selection.map_limit = 1;
        return config;
    }
    if (name == "all_maps_all_terms") return config;
    if (name == "stereotype") {
        config.stereotype = true;
        return config;
    }
    if (name == "docear_combined") return docear_combined_config();
    throw Error(Errc::unknown_preset, "unknown preset '" + std::string(name) + "'");
}

}  // namespace mmrec
