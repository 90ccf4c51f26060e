#include "mmrec/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>
#include <utility>

#include "mmrec/error.hpp"

namespace mmrec {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<EventKindFilter, 4> kEventKinds{{{EventKindFilter::created, "created"},
                                                     {EventKindFilter::edited, "edited"},
                                                     {EventKindFilter::moved, "moved"},
                                                     {EventKindFilter::any, "any"}}};
constexpr NameTable<Visibility, 3> kVisibilities{{{Visibility::visible_only, "visible_only"},
                                                  {Visibility::invisible_only, "invisible_only"},
                                                  {Visibility::all, "all"}}};
constexpr NameTable<NodeMetric, 4> kMetrics{{{NodeMetric::depth, "depth"},
                                             {NodeMetric::children, "children"},
                                             {NodeMetric::siblings, "siblings"},
                                             {NodeMetric::term_count, "term_count"}}};
constexpr NameTable<Transform, 4> kTransforms{{{Transform::abs, "abs"},
                                               {Transform::ln, "ln"},
                                               {Transform::log10, "log10"},
                                               {Transform::sqrt, "sqrt"}}};
constexpr NameTable<Direction, 2> kDirections{
    {{Direction::stronger, "stronger"}, {Direction::weaker, "weaker"}}};
constexpr NameTable<Combiner, 4> kCombiners{{{Combiner::sum, "sum"},
                                             {Combiner::max, "max"},
                                             {Combiner::product, "product"},
                                             {Combiner::avg, "avg"}}};
constexpr NameTable<FeatureType, 3> kFeatureTypes{{{FeatureType::terms, "terms"},
                                                   {FeatureType::citations, "citations"},
                                                   {FeatureType::both, "both"}}};
constexpr NameTable<Scheme, 5> kSchemes{{{Scheme::tf_only, "tf_only"},
                                         {Scheme::tf_idf, "tf_idf"},
                                         {Scheme::tf_iduf, "tf_iduf"},
                                         {Scheme::cc_only, "cc_only"},
                                         {Scheme::cc_idf, "cc_idf"}}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
    for (const auto& [e, name] : table)
        if (e == value) return name;
    return "?";
}

template <typename Enum, std::size_t N>
Enum parse_enum(const NameTable<Enum, N>& table, std::string_view key, std::string_view text) {
    for (const auto& [e, name] : table)
        if (name == text) return e;
    throw Error(Errc::invalid_config,
                "invalid value '" + std::string(text) + "' for '" + std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw Error(Errc::invalid_config,
                "invalid boolean '" + std::string(text) + "' for '" + std::string(key) + "'");
}

std::uint64_t parse_count(std::string_view key, std::string_view text) {
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size())
        throw Error(Errc::invalid_config,
                    "invalid count '" + std::string(text) + "' for '" + std::string(key) + "'");
    return value;
}

template <typename T>
std::optional<T> parse_optional_count(std::string_view key, std::string_view text) {
    if (text == "none") return std::nullopt;
    return static_cast<T>(parse_count(key, text));
}

template <typename T>
std::string format_optional(const std::optional<T>& value) {
    return value ? std::to_string(*value) : std::string("none");
}

std::string format_extension(const Extension& ext) {
    std::string out;
    auto add = [&](bool on, std::string_view name) {
        if (!on) return;
        if (!out.empty()) out += '+';
        out += name;
    };
    add(ext.children, "children");
    add(ext.siblings, "siblings");
    add(ext.parents, "parents");
    return out.empty() ? "none" : out;
}

Extension parse_extension(std::string_view key, std::string_view text) {
    Extension ext;
    if (text == "none" || text.empty()) return ext;
    for (auto part : split(text, '+')) {
        if (part == "children") ext.children = true;
        else if (part == "siblings") ext.siblings = true;
        else if (part == "parents") ext.parents = true;
        else
            throw Error(Errc::invalid_config,
                        "invalid relation '" + std::string(part) + "' for '" + std::string(key) + "'");
    }
    return ext;
}

std::string format_metrics(const std::vector<MetricWeight>& metrics) {
    std::string out;
    for (const auto& m : metrics) {
        if (!out.empty()) out += '+';
        out += name_of(kMetrics, m.metric);
        out += ':';
        out += name_of(kDirections, m.direction);
    }
    return out;
}

std::vector<MetricWeight> parse_metrics(std::string_view key, std::string_view text) {
    std::vector<MetricWeight> metrics;
    if (text.empty() || text == "none") return metrics;
    for (auto part : split(text, '+')) {
        auto colon = part.find(':');
        MetricWeight m;
        m.metric = parse_enum(kMetrics, key, trim(part.substr(0, colon)));
        if (colon != std::string_view::npos)
            m.direction = parse_enum(kDirections, key, trim(part.substr(colon + 1)));
        metrics.push_back(m);
    }
    return metrics;
}

}  // namespace

std::string_view to_string(EventKindFilter value) { return name_of(kEventKinds, value); }
std::string_view to_string(Visibility value) { return name_of(kVisibilities, value); }
std::string_view to_string(NodeMetric value) { return name_of(kMetrics, value); }
std::string_view to_string(Transform value) { return name_of(kTransforms, value); }
std::string_view to_string(Direction value) { return name_of(kDirections, value); }
std::string_view to_string(Combiner value) { return name_of(kCombiners, value); }
std::string_view to_string(FeatureType value) { return name_of(kFeatureTypes, value); }
std::string_view to_string(Scheme value) { return name_of(kSchemes, value); }

FeatureType parse_feature_type(std::string_view text) {
    return parse_enum(kFeatureTypes, "features.type", text);
}
Scheme parse_scheme(std::string_view text) { return parse_enum(kSchemes, "features.scheme", text); }

SchemeFormula formula(Scheme scheme) {
    switch (scheme) {
        case Scheme::tf_only:
        case Scheme::cc_only: return SchemeFormula::frequency;
        case Scheme::tf_idf:
        case Scheme::cc_idf: return SchemeFormula::idf;
        case Scheme::tf_iduf: return SchemeFormula::iduf;
    }
    return SchemeFormula::frequency;
}

bool scheme_consistent(FeatureType type, Scheme scheme) {
    switch (type) {
        case FeatureType::terms:
            return scheme == Scheme::tf_only || scheme == Scheme::tf_idf || scheme == Scheme::tf_iduf;
        case FeatureType::citations: return scheme == Scheme::cc_only || scheme == Scheme::cc_idf;
        case FeatureType::both: return true;
    }
    return false;
}

Scheme repair_scheme(FeatureType type, Scheme scheme) {
    if (scheme_consistent(type, scheme)) return scheme;
    if (type == FeatureType::terms)
        return scheme == Scheme::cc_only ? Scheme::tf_only : Scheme::tf_idf;
    // citations: there is no citation variant of iduf, map it onto idf
    return scheme == Scheme::tf_only ? Scheme::cc_only : Scheme::cc_idf;
}

void validate(const AlgorithmConfig& config) {
    const auto& sel = config.selection;
    if ((sel.map_limit && *sel.map_limit == 0) || (sel.node_limit && *sel.node_limit == 0) ||
        (sel.day_window && *sel.day_window <= 0))
        throw Error(Errc::invalid_config, "selection limits must be at least 1 when set");
    if (config.node_weighting && config.node_weighting->metrics.empty())
        throw Error(Errc::invalid_config, "node weighting enabled without metrics");
    if (config.features.model_size == 0)
        throw Error(Errc::invalid_config, "model size must be at least 1");
    if (!scheme_consistent(config.features.feature_type, config.features.scheme))
        throw Error(Errc::invalid_config,
                    "scheme " + std::string(to_string(config.features.scheme)) +
                        " does not apply to feature type " +
                        std::string(to_string(config.features.feature_type)));
}

// ---------------------------------------------------------------------------

KeyValues parse_key_values(std::string_view text) {
    KeyValues values;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::invalid_config, "line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = trim(line.substr(0, eq));
        if (key.empty())
            throw Error(Errc::invalid_config, "line " + std::to_string(line_no) + ": empty key");
        if (!values.emplace(std::string(key), std::string(trim(line.substr(eq + 1)))).second)
            throw Error(Errc::invalid_config, "duplicate key '" + std::string(key) + "'");
    }
    return values;
}

std::string format_key_values(const KeyValues& values) {
    std::string out;
    for (const auto& key : config_keys()) {
        auto it = values.find(key);
        if (it != values.end()) out += key + " = " + it->second + "\n";
    }
    for (const auto& [key, value] : values) {
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            out += key + " = " + value + "\n";
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "preset",
        "stereotype",
        "selection.map_limit",
        "selection.node_limit",
        "selection.day_window",
        "selection.event_kind",
        "selection.visibility",
        "selection.extension",
        "selection.fallback_to_any",
        "weighting.enabled",
        "weighting.metrics",
        "weighting.transform",
        "weighting.combiner",
        "features.type",
        "features.scheme",
        "features.remove_stopwords",
        "features.model_size",
        "features.store_weights",
    };
    return keys;
}

KeyValues to_key_values(const AlgorithmConfig& config) {
    KeyValues kv;
    if (config.preset_name) kv["preset"] = *config.preset_name;
    kv["stereotype"] = config.stereotype ? "true" : "false";
    const auto& sel = config.selection;
    kv["selection.map_limit"] = format_optional(sel.map_limit);
    kv["selection.node_limit"] = format_optional(sel.node_limit);
    kv["selection.day_window"] = format_optional(sel.day_window);
    kv["selection.event_kind"] = to_string(sel.event_kind);
    kv["selection.visibility"] = to_string(sel.visibility);
    kv["selection.extension"] = format_extension(sel.extension);
    kv["selection.fallback_to_any"] = sel.fallback_to_any ? "true" : "false";
    kv["weighting.enabled"] = config.node_weighting ? "true" : "false";
    if (config.node_weighting) {
        kv["weighting.metrics"] = format_metrics(config.node_weighting->metrics);
        kv["weighting.transform"] = to_string(config.node_weighting->transform);
        kv["weighting.combiner"] = to_string(config.node_weighting->combiner);
    }
    const auto& f = config.features;
    kv["features.type"] = to_string(f.feature_type);
    kv["features.scheme"] = to_string(f.scheme);
    kv["features.remove_stopwords"] = f.remove_stopwords ? "true" : "false";
    kv["features.model_size"] =
        f.model_size == kUnboundedModel ? std::string("unbounded") : std::to_string(f.model_size);
    kv["features.store_weights"] = f.store_weights ? "true" : "false";
    return kv;
}

AlgorithmConfig from_key_values(const KeyValues& values) {
    for (const auto& [key, value] : values) {
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw Error(Errc::invalid_config, "unknown config key '" + key + "'");
    }
    auto get = [&](const std::string& key) -> std::optional<std::string_view> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return std::string_view(it->second);
    };

    AlgorithmConfig config;
    if (auto v = get("preset"); v && !v->empty()) config.preset_name = std::string(*v);
    if (auto v = get("stereotype")) config.stereotype = parse_bool("stereotype", *v);

    auto& sel = config.selection;
    if (auto v = get("selection.map_limit"))
        sel.map_limit = parse_optional_count<std::size_t>("selection.map_limit", *v);
    if (auto v = get("selection.node_limit"))
        sel.node_limit = parse_optional_count<std::size_t>("selection.node_limit", *v);
    if (auto v = get("selection.day_window"))
        sel.day_window = parse_optional_count<std::int64_t>("selection.day_window", *v);
    if (auto v = get("selection.event_kind"))
        sel.event_kind = parse_enum(kEventKinds, "selection.event_kind", *v);
    if (auto v = get("selection.visibility"))
        sel.visibility = parse_enum(kVisibilities, "selection.visibility", *v);
    if (auto v = get("selection.extension"))
        sel.extension = parse_extension("selection.extension", *v);
    if (auto v = get("selection.fallback_to_any"))
        sel.fallback_to_any = parse_bool("selection.fallback_to_any", *v);

    bool weighting = false;
    if (auto v = get("weighting.enabled")) weighting = parse_bool("weighting.enabled", *v);
    if (weighting) {
        NodeWeightConfig nw;
        if (auto v = get("weighting.metrics")) nw.metrics = parse_metrics("weighting.metrics", *v);
        if (auto v = get("weighting.transform"))
            nw.transform = parse_enum(kTransforms, "weighting.transform", *v);
        if (auto v = get("weighting.combiner"))
            nw.combiner = parse_enum(kCombiners, "weighting.combiner", *v);
        config.node_weighting = std::move(nw);
    }

    auto& f = config.features;
    if (auto v = get("features.type")) f.feature_type = parse_enum(kFeatureTypes, "features.type", *v);
    if (auto v = get("features.scheme")) f.scheme = parse_enum(kSchemes, "features.scheme", *v);
    if (auto v = get("features.remove_stopwords"))
        f.remove_stopwords = parse_bool("features.remove_stopwords", *v);
    if (auto v = get("features.model_size"))
        f.model_size = *v == "unbounded" ? kUnboundedModel
                                         : static_cast<std::size_t>(parse_count("features.model_size", *v));
    if (auto v = get("features.store_weights"))
        f.store_weights = parse_bool("features.store_weights", *v);

    validate(config);
    return config;
}

std::string serialize_config(const AlgorithmConfig& config) {
    return format_key_values(to_key_values(config));
}

AlgorithmConfig parse_config(std::string_view text) {
    return from_key_values(parse_key_values(text));
}

std::string config_label(const AlgorithmConfig& config) {
    if (config.preset_name) return *config.preset_name;
    const std::string text = serialize_config(config);
    std::uint32_t hash = 2166136261u;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 16777619u;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string label = "custom-";
    for (int shift = 28; shift >= 0; shift -= 4) label += kHex[(hash >> shift) & 0xF];
    return label;
}

}  // namespace mmrec
