#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mmrec/config.hpp"
#include "mmrec/random.hpp"

namespace mmrec {

/// Candidate values per config key, spelled as in the config text format.
/// Keys missing from the space keep AlgorithmConfig's defaults.
class VariableSpace {
public:
    VariableSpace() = default;
    /// Throws Error(invalid_config) for unknown keys, empty candidate lists
    /// or values that do not parse.
    explicit VariableSpace(std::map<std::string, std::vector<std::string>> candidates);

    const std::map<std::string, std::vector<std::string>>& candidates() const { return candidates_; }

private:
    std::map<std::string, std::vector<std::string>> candidates_;
};

/// `key = a, b, c` per line.
VariableSpace parse_variable_space(std::string_view text);

/// The ranges explored by the original experiments.
VariableSpace default_variable_space();

/// Draws every key uniformly (one draw per key, canonical key order), then
/// repairs the scheme to fit the feature type.
AlgorithmConfig random_config(const VariableSpace& space, Rng& rng);

const std::vector<std::string>& preset_names();

/// mindmeister_last_node, current_map_all_terms, all_maps_all_terms,
/// stereotype, docear_combined. Throws Error(unknown_preset).
AlgorithmConfig preset(std::string_view name);

}  // namespace mmrec
