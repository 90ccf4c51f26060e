#include "mmrec/user_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "mmrec/error.hpp"
#include "mmrec/text.hpp"

namespace mmrec {

namespace {

bool kind_matches(EventKindFilter filter, NodeEventKind kind) {
    switch (filter) {
        case EventKindFilter::created: return kind == NodeEventKind::created;
        case EventKindFilter::edited: return kind == NodeEventKind::edited;
        case EventKindFilter::moved: return kind == NodeEventKind::moved;
        case EventKindFilter::any: return true;
    }
    return false;
}

double metric_value(const NodeMeasures& m, NodeMetric metric) {
    switch (metric) {
        case NodeMetric::depth: return static_cast<double>(m.depth);
        case NodeMetric::children: return static_cast<double>(m.children_count);
        case NodeMetric::siblings: return static_cast<double>(m.sibling_count);
        case NodeMetric::term_count: return static_cast<double>(m.term_count);
    }
    return 0.0;
}

double apply_transform(Transform transform, double v) {
    switch (transform) {
        case Transform::abs: return v;
        case Transform::ln: return std::log(v);
        case Transform::log10: return std::log10(v);
        case Transform::sqrt: return std::sqrt(v);
    }
    return v;
}

// Features of one map's latest revision, as extraction would see them
// without stop-word removal.
std::unordered_set<Feature> map_features(const MindMap& map, const CitationResolver& resolve) {
    std::unordered_set<Feature> features;
    for (const auto& node : map.nodes()) {
        for (auto& token : tokenize(node.text)) features.insert(std::move(token));
        if (node.link && resolve) {
            if (auto doc = resolve(*node.link)) features.insert(citation_feature(*doc));
        }
    }
    return features;
}

}  // namespace

CitationResolver lookup_resolver(const Corpus& corpus) {
    return [&corpus](std::string_view reference) { return corpus.find_citation(reference); };
}

CitationResolver inserting_resolver(Corpus& corpus) {
    return [&corpus](std::string_view reference) -> std::optional<DocId> {
        return corpus.resolve_citation(reference);
    };
}

NodeMeasures measure_node(const MindMap& map, std::string_view node_id) {
    const auto stats = node_stats(map, node_id);
    return {node_depth(map, node_id), stats.children_count, stats.sibling_count, stats.term_count};
}

std::vector<QueryTerm> UserModel::query() const {
    std::vector<QueryTerm> terms;
    terms.reserve(features.size());
    for (const auto& entry : features) terms.push_back({entry.feature, entry.weight.value_or(1.0)});
    return terms;
}

// ---------------------------------------------------------------------------

std::vector<NodeRef> select_nodes(const MindMapCollection& collection, const SelectionConfig& cfg,
                                  Timestamp now) {
    if (collection.empty())
        throw Error(Errc::empty_collection, "user '" + collection.user_id() + "' has no mind maps");

    const Timestamp oldest = cfg.day_window ? now - *cfg.day_window * kMillisPerDay
                                            : std::numeric_limits<Timestamp>::min();
    std::vector<const NodeEvent*> qualifying;
    for (const auto& event : collection.events()) {
        if (!kind_matches(cfg.event_kind, event.kind)) continue;
        if (event.at > now || event.at < oldest) continue;
        qualifying.push_back(&event);
    }

    if (cfg.map_limit) {
        std::map<std::string_view, Timestamp> latest_per_map;
        for (const auto* e : qualifying) {
            auto [it, inserted] = latest_per_map.emplace(e->map_id, e->at);
            if (!inserted) it->second = std::max(it->second, e->at);
        }
        std::vector<std::pair<Timestamp, std::string_view>> ranked;
        for (const auto& [map_id, at] : latest_per_map) ranked.emplace_back(at, map_id);
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        if (ranked.size() > *cfg.map_limit) ranked.resize(*cfg.map_limit);
        std::set<std::string_view> keep;
        for (const auto& [at, map_id] : ranked) keep.insert(map_id);
        std::erase_if(qualifying, [&](const NodeEvent* e) { return !keep.count(e->map_id); });
    }

    std::map<NodeRef, Timestamp> latest;
    for (const auto* e : qualifying) {
        NodeRef ref{e->map_id, e->node_id};
        auto [it, inserted] = latest.emplace(std::move(ref), e->at);
        if (!inserted) it->second = std::max(it->second, e->at);
    }

    std::vector<std::pair<Timestamp, NodeRef>> candidates;
    for (auto& [ref, at] : latest) {
        const auto* node = collection.latest_node(ref);
        if (!node) continue;  // deleted in the latest revision
        if (cfg.visibility == Visibility::visible_only && !node->visible) continue;
        if (cfg.visibility == Visibility::invisible_only && node->visible) continue;
        candidates.emplace_back(at, ref);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (cfg.node_limit && candidates.size() > *cfg.node_limit) candidates.resize(*cfg.node_limit);

    std::vector<NodeRef> selection;
    selection.reserve(candidates.size());
    for (auto& [at, ref] : candidates) selection.push_back(std::move(ref));
    return selection;
}

std::vector<NodeRef> extend_selection(const MindMapCollection& collection,
                                      std::span<const NodeRef> selection, const Extension& extension) {
    std::vector<NodeRef> out;
    std::set<NodeRef> seen;
    auto add = [&](NodeRef ref) {
        if (seen.insert(ref).second) out.push_back(std::move(ref));
    };
    for (const auto& ref : selection) add(ref);
    if (extension.empty()) return out;

    for (const auto& ref : selection) {
        const auto* map = collection.latest_map(ref.map_id);
        if (!map) continue;
        auto index = map->find(ref.node_id);
        if (!index) continue;
        const auto& node = map->at(*index);
        if (extension.children) {
            for (auto child : node.children) add({ref.map_id, map->at(child).id});
        }
        if (extension.siblings && node.parent) {
            for (auto sibling : map->at(*node.parent).children) {
                if (sibling != *index) add({ref.map_id, map->at(sibling).id});
            }
        }
        if (extension.parents && node.parent) add({ref.map_id, map->at(*node.parent).id});
    }
    return out;
}

double node_weight(const NodeMeasures& measures, NodeMetric metric, Transform transform,
                   Direction direction) {
    const double value = apply_transform(transform, metric_value(measures, metric));
    if (!std::isfinite(value) || value <= 0.0) return 1.0;
    if (direction == Direction::stronger) return std::max(1.0, value);
    return std::min(1.0, 1.0 / value);
}

double combine_node_weights(std::span<const double> scores, Combiner combiner) {
    if (scores.empty()) throw Error(Errc::empty_scores, "no node weights to combine");
    switch (combiner) {
        case Combiner::sum: {
            double total = 0.0;
            for (double s : scores) total += s;
            return total;
        }
        case Combiner::max: return *std::max_element(scores.begin(), scores.end());
        case Combiner::product: {
            double total = 1.0;
            for (double s : scores) total *= s;
            return total;
        }
        case Combiner::avg: {
            double total = 0.0;
            for (double s : scores) total += s;
            return total / static_cast<double>(scores.size());
        }
    }
    return 0.0;
}

std::vector<WeightedNode> weigh_nodes(const MindMapCollection& collection,
                                      std::span<const NodeRef> nodes,
                                      const std::optional<NodeWeightConfig>& cfg) {
    std::vector<WeightedNode> out;
    out.reserve(nodes.size());
    std::vector<double> scores;
    for (const auto& ref : nodes) {
        double weight = 1.0;
        if (cfg) {
            const auto* map = collection.latest_map(ref.map_id);
            if (!map) throw Error(Errc::unknown_node, "unknown map '" + ref.map_id + "'");
            const auto measures = measure_node(*map, ref.node_id);
            scores.clear();
            for (const auto& m : cfg->metrics)
                scores.push_back(node_weight(measures, m.metric, cfg->transform, m.direction));
            weight = combine_node_weights(scores, cfg->combiner);
        }
        out.push_back({ref, weight});
    }
    return out;
}

std::vector<Occurrence> extract_features(const MindMapCollection& collection,
                                         std::span<const WeightedNode> nodes, FeatureType type,
                                         bool remove_stopwords, const CitationResolver& resolve) {
    const bool terms = type == FeatureType::terms || type == FeatureType::both;
    const bool citations = type == FeatureType::citations || type == FeatureType::both;
    std::vector<Occurrence> out;
    for (const auto& wn : nodes) {
        const auto* node = collection.latest_node(wn.ref);
        if (!node)
            throw Error(Errc::unknown_node,
                        "unknown node '" + wn.ref.map_id + "/" + wn.ref.node_id + "'");
        if (terms) {
            for (auto& token : tokenize(node->text, remove_stopwords))
                out.push_back({std::move(token), wn.weight});
        }
        if (citations && node->link && resolve) {
            if (auto doc = resolve(*node->link)) out.push_back({citation_feature(*doc), wn.weight});
        }
    }
    return out;
}

std::size_t user_document_frequency(const MindMapCollection& collection, std::string_view feature,
                                    const CitationResolver& resolve) {
    std::size_t count = 0;
    for (const auto& history : collection.maps()) {
        if (map_features(history.latest(), resolve).count(Feature(feature))) ++count;
    }
    return count;
}

std::vector<WeightedFeature> weight_features(std::span<const Occurrence> occurrences, Scheme scheme,
                                             const Corpus& corpus,
                                             const MindMapCollection& user_collection,
                                             const CitationResolver& resolve) {
    if (occurrences.empty()) throw Error(Errc::empty_occurrences, "no feature occurrences");

    std::map<Feature, double> tf;
    for (const auto& occ : occurrences) tf[occ.feature] += occ.weight;

    std::vector<WeightedFeature> out;
    out.reserve(tf.size());
    switch (formula(scheme)) {
        case SchemeFormula::frequency:
            for (const auto& [feature, total] : tf) out.push_back({feature, total});
            break;
        case SchemeFormula::idf:
            for (const auto& [feature, total] : tf) out.push_back({feature, total * corpus.idf(feature)});
            break;
        case SchemeFormula::iduf: {
            std::vector<std::unordered_set<Feature>> per_map;
            for (const auto& history : user_collection.maps())
                per_map.push_back(map_features(history.latest(), resolve));
            const double maps = static_cast<double>(per_map.size());
            for (const auto& [feature, total] : tf) {
                std::size_t udf = 0;
                for (const auto& set : per_map) udf += set.count(feature);
                const double iduf = udf == 0 ? 0.0 : std::log(maps / static_cast<double>(udf));
                out.push_back({feature, total * iduf});
            }
            break;
        }
    }
    return out;
}

UserModel build_user_model(std::span<const WeightedFeature> features, const FeatureConfig& cfg,
                           std::string user_id, Timestamp built_at) {
    std::vector<WeightedFeature> ranked;
    for (const auto& f : features) {
        if (f.weight > 0.0) ranked.push_back(f);
    }
    if (ranked.empty())
        throw Error(Errc::no_positive_features, "no feature with positive weight for user '" + user_id + "'");
    std::sort(ranked.begin(), ranked.end(), [](const WeightedFeature& a, const WeightedFeature& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.feature < b.feature;
    });
    if (ranked.size() > cfg.model_size) ranked.resize(cfg.model_size);

    UserModel model;
    model.user_id = std::move(user_id);
    model.built_at = built_at;
    model.config.features = cfg;
    model.features.reserve(ranked.size());
    for (auto& f : ranked) {
        model.features.push_back(
            {std::move(f.feature), cfg.store_weights ? std::optional<double>(f.weight) : std::nullopt});
    }
    return model;
}

UserModel build_model(const MindMapCollection& collection, const Corpus& corpus,
                      const AlgorithmConfig& config, Timestamp now, ModelTrace* trace) {
    if (config.stereotype)
        throw Error(Errc::invalid_config, "stereotype configs do not build user models");
    validate(config);

    const auto resolve = lookup_resolver(corpus);
    const auto& sel = config.selection;
    auto selected = select_nodes(collection, sel, now);
    bool used_fallback = false;
    if (sel.fallback_to_any && sel.event_kind != EventKindFilter::any && sel.node_limit &&
        selected.size() < *sel.node_limit) {
        SelectionConfig any = sel;
        any.event_kind = EventKindFilter::any;
        selected = select_nodes(collection, any, now);
        used_fallback = true;
    }
    auto extended = extend_selection(collection, selected, sel.extension);
    auto weighted = weigh_nodes(collection, extended, config.node_weighting);
    auto occurrences = extract_features(collection, weighted, config.features.feature_type,
                                        config.features.remove_stopwords, resolve);

    if (trace) {
        trace->selected = selected;
        trace->extended = extended;
        trace->weighted = weighted;
        trace->occurrences = occurrences;
        trace->used_fallback = used_fallback;
    }
    if (occurrences.empty())
        throw Error(Errc::no_positive_features,
                    "selected nodes of user '" + collection.user_id() + "' yield no features");

    auto features = weight_features(occurrences, config.features.scheme, corpus, collection, resolve);
    if (trace) trace->weighted_features = features;

    auto model = build_user_model(features, config.features, collection.user_id(), now);
    model.config = config;
    return model;
}

AlgorithmConfig docear_combined_config() {
    AlgorithmConfig config;
    config.preset_name = "docear_combined";
    config.selection.node_limit = 75;
    config.selection.day_window = 90;
    config.selection.event_kind = EventKindFilter::moved;
    config.selection.visibility = Visibility::visible_only;
    config.selection.extension = Extension{true, true, false};
    config.selection.fallback_to_any = true;
    config.node_weighting = NodeWeightConfig{
        {{NodeMetric::depth, Direction::stronger}, {NodeMetric::siblings, Direction::stronger}},
        Transform::ln,
        Combiner::sum};
    config.features.feature_type = FeatureType::terms;
    config.features.scheme = Scheme::tf_iduf;
    config.features.remove_stopwords = true;
    config.features.model_size = 35;
    config.features.store_weights = false;
    return config;
}

UserModel docear_combined_model(const MindMapCollection& collection, const Corpus& corpus,
                                Timestamp now, ModelTrace* trace) {
    return build_model(collection, corpus, docear_combined_config(), now, trace);
}

}  // namespace mmrec
