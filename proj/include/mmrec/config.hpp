#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmrec {

enum class EventKindFilter { created, edited, moved, any };
enum class Visibility { visible_only, invisible_only, all };

struct Extension {
    bool children = false;
    bool siblings = false;
    bool parents = false;

    bool empty() const { return !children && !siblings && !parents; }
    bool operator==(const Extension&) const = default;
};

struct SelectionConfig {
    std::optional<std::size_t> map_limit;
    std::optional<std::size_t> node_limit;
    std::optional<std::int64_t> day_window;
    EventKindFilter event_kind = EventKindFilter::any;
    Visibility visibility = Visibility::all;
    Extension extension;
    /// When the selection comes up short of node_limit, select again with
    /// event_kind = any under the same limits and use that instead.
    bool fallback_to_any = false;

    bool operator==(const SelectionConfig&) const = default;
};

enum class NodeMetric { depth, children, siblings, term_count };
enum class Transform { abs, ln, log10, sqrt };
enum class Direction { stronger, weaker };
enum class Combiner { sum, max, product, avg };

struct MetricWeight {
    NodeMetric metric = NodeMetric::depth;
    Direction direction = Direction::stronger;

    bool operator==(const MetricWeight&) const = default;
};

struct NodeWeightConfig {
    std::vector<MetricWeight> metrics;
    Transform transform = Transform::abs;
    Combiner combiner = Combiner::sum;

    bool operator==(const NodeWeightConfig&) const = default;
};

enum class FeatureType { terms, citations, both };

/// tf_* name the formulas for terms, cc_* the same formulas for citations.
/// With FeatureType::both any scheme applies its formula to both streams.
enum class Scheme { tf_only, tf_idf, tf_iduf, cc_only, cc_idf };

enum class SchemeFormula { frequency, idf, iduf };
SchemeFormula formula(Scheme scheme);

inline constexpr std::size_t kUnboundedModel = std::numeric_limits<std::size_t>::max();

struct FeatureConfig {
    FeatureType feature_type = FeatureType::terms;
    Scheme scheme = Scheme::tf_only;
    bool remove_stopwords = false;
    std::size_t model_size = kUnboundedModel;
    bool store_weights = true;

    bool operator==(const FeatureConfig&) const = default;
};

struct AlgorithmConfig {
    SelectionConfig selection;
    std::optional<NodeWeightConfig> node_weighting;
    FeatureConfig features;
    std::optional<std::string> preset_name;
    /// Serve stereotype recommendations instead of building a user model.
    bool stereotype = false;

    bool operator==(const AlgorithmConfig&) const = default;
};

bool scheme_consistent(FeatureType type, Scheme scheme);
/// Maps an inconsistent scheme onto the nearest valid one for the feature type.
Scheme repair_scheme(FeatureType type, Scheme scheme);

/// Throws Error(invalid_config) on zero limits/model size, an empty metric
/// list, or a scheme that does not fit the feature type.
void validate(const AlgorithmConfig& config);

// Flat `key = value` text, one entry per line; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& values);

KeyValues to_key_values(const AlgorithmConfig& config);
/// Keys not present keep their default. Unknown keys are rejected.
AlgorithmConfig from_key_values(const KeyValues& values);

std::string serialize_config(const AlgorithmConfig& config);
AlgorithmConfig parse_config(std::string_view text);

/// Short single-line identifier: the preset name or a digest of the fields.
std::string config_label(const AlgorithmConfig& config);

/// Every key understood by from_key_values(), in canonical order.
const std::vector<std::string>& config_keys();

FeatureType parse_feature_type(std::string_view text);
Scheme parse_scheme(std::string_view text);

std::string_view to_string(EventKindFilter value);
std::string_view to_string(Visibility value);
std::string_view to_string(NodeMetric value);
std::string_view to_string(Transform value);
std::string_view to_string(Direction value);
std::string_view to_string(Combiner value);
std::string_view to_string(FeatureType value);
std::string_view to_string(Scheme value);

}  // namespace mmrec
