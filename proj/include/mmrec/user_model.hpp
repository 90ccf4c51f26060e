#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmrec/config.hpp"
#include "mmrec/corpus.hpp"
#include "mmrec/mindmap.hpp"

namespace mmrec {

/// Maps a node link to a document id; nullopt leaves the link unused.
using CitationResolver = std::function<std::optional<DocId>(std::string_view)>;

/// Lookup-only resolver for model building against a frozen corpus.
CitationResolver lookup_resolver(const Corpus& corpus);
/// Inserting resolver: unknown references become new corpus documents.
CitationResolver inserting_resolver(Corpus& corpus);

struct NodeMeasures {
    std::size_t depth = 0;
    std::size_t children_count = 0;
    std::size_t sibling_count = 0;
    std::size_t term_count = 0;
};

NodeMeasures measure_node(const MindMap& map, std::string_view node_id);

struct WeightedNode {
    NodeRef ref;
    double weight = 1.0;
};

struct Occurrence {
    Feature feature;
    double weight = 1.0;

    bool operator==(const Occurrence&) const = default;
};

struct WeightedFeature {
    Feature feature;
    double weight = 0.0;

    bool operator==(const WeightedFeature&) const = default;
};

struct ModelEntry {
    Feature feature;
    std::optional<double> weight;  // absent for un-weighted models

    bool operator==(const ModelEntry&) const = default;
};

struct UserModel {
    std::string user_id;
    std::vector<ModelEntry> features;  // weight-descending at build time
    AlgorithmConfig config;
    Timestamp built_at = 0;

    /// Query view; entries without a stored weight count as 1.
    std::vector<QueryTerm> query() const;
};

/// Intermediate results of build_model, for inspection and tests.
struct ModelTrace {
    std::vector<NodeRef> selected;  // after the fallback, before extension
    std::vector<NodeRef> extended;
    std::vector<WeightedNode> weighted;
    std::vector<Occurrence> occurrences;
    std::vector<WeightedFeature> weighted_features;
    bool used_fallback = false;
};

/// Throws Error(empty_collection) when the collection holds no maps.
std::vector<NodeRef> select_nodes(const MindMapCollection& collection, const SelectionConfig& cfg,
                                  Timestamp now);

std::vector<NodeRef> extend_selection(const MindMapCollection& collection,
                                      std::span<const NodeRef> selection, const Extension& extension);

double node_weight(const NodeMeasures& measures, NodeMetric metric, Transform transform,
                   Direction direction);

/// Throws Error(empty_scores).
double combine_node_weights(std::span<const double> scores, Combiner combiner);

/// Weight 1 for every node when `cfg` is absent.
std::vector<WeightedNode> weigh_nodes(const MindMapCollection& collection,
                                      std::span<const NodeRef> nodes,
                                      const std::optional<NodeWeightConfig>& cfg);

std::vector<Occurrence> extract_features(const MindMapCollection& collection,
                                         std::span<const WeightedNode> nodes, FeatureType type,
                                         bool remove_stopwords, const CitationResolver& resolve);

/// Sums occurrence weights per feature and applies the scheme's formula.
/// Output is ordered by feature. Throws Error(empty_occurrences).
std::vector<WeightedFeature> weight_features(std::span<const Occurrence> occurrences, Scheme scheme,
                                             const Corpus& corpus,
                                             const MindMapCollection& user_collection,
                                             const CitationResolver& resolve);

/// Number of the user's maps (latest revisions) containing each feature.
std::size_t user_document_frequency(const MindMapCollection& collection, std::string_view feature,
                                    const CitationResolver& resolve);

/// Sorts weight-descending (ties by feature), drops non-positive weights,
/// keeps the top model_size. Throws Error(no_positive_features).
UserModel build_user_model(std::span<const WeightedFeature> features, const FeatureConfig& cfg,
                           std::string user_id, Timestamp built_at);

/// Full pipeline: select, extend, weight nodes, extract, weight features,
/// truncate. Link resolution uses the corpus read-only.
UserModel build_model(const MindMapCollection& collection, const Corpus& corpus,
                      const AlgorithmConfig& config, Timestamp now, ModelTrace* trace = nullptr);

/// The fixed combined algorithm: 75 recently moved visible nodes from the
/// past 90 days (any modification as fallback), extended by children and
/// siblings, ln-weighted by depth and siblings, TF-IDuF terms, top 35.
AlgorithmConfig docear_combined_config();

UserModel docear_combined_model(const MindMapCollection& collection, const Corpus& corpus,
                                Timestamp now, ModelTrace* trace = nullptr);

}  // namespace mmrec
