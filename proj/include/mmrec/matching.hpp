#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmrec/config.hpp"
#include "mmrec/corpus.hpp"
#include "mmrec/mindmap.hpp"
#include "mmrec/random.hpp"
#include "mmrec/user_model.hpp"

namespace mmrec {

enum class Trigger { requested, automatic };

std::string_view to_string(Trigger trigger);
Trigger parse_trigger(std::string_view text);

inline constexpr std::string_view kStereotypeAlgorithm = "stereotype";

struct RecommendationItem {
    DocId doc{};
    std::size_t original_rank = 0;  // 1-based position in the candidate pool
    std::size_t display_rank = 0;   // 1-based position shown to the user

    bool operator==(const RecommendationItem&) const = default;
};

struct RecommendationSet {
    std::string set_id;
    std::string user_id;
    std::vector<RecommendationItem> items;  // in display order
    std::string label;
    std::string algorithm;  // config_label() of the config, or "stereotype"
    std::optional<AlgorithmConfig> config;
    Timestamp created_at = 0;
    Trigger trigger = Trigger::automatic;

    bool operator==(const RecommendationSet&) const = default;
};

/// score_query over the model, truncated to pool_size.
/// Throws Error(empty_model) for a model without features.
std::vector<ScoredDoc> retrieve_candidates(const Corpus& corpus, const UserModel& model,
                                           std::size_t pool_size = 50);

/// Draws min(k, |pool|) pool entries uniformly without replacement, then
/// shuffles them for display. Throws Error(empty_pool).
std::vector<RecommendationItem> select_and_shuffle(std::span<const DocId> pool, std::size_t k,
                                                   Rng& rng);

struct DispatchRequest {
    std::string user_id;
    const MindMapCollection* collection = nullptr;  // null: no mind maps known
    AlgorithmConfig config;
    Timestamp now = 0;
    std::size_t count = 10;
    std::size_t pool_size = 50;
    double p_stereotype = 0.01;
    std::string label;
    Trigger trigger = Trigger::automatic;
    std::string set_id;
};

/// The `n` documents cited by the most other documents, ties by id.
/// Uncited documents fill the list when too few are cited.
std::vector<DocId> most_cited(const Corpus& corpus, std::size_t n = 10);

/// Delivers one recommendation set. The generator is consumed in a fixed
/// order: stereotype coin, then sampling, then the display shuffle. Any
/// failure to produce content-based candidates falls back to the catalog.
RecommendationSet dispatch(const DispatchRequest& request, const Corpus& corpus,
                           std::span<const DocId> stereotype_catalog, Rng& rng);

}  // namespace mmrec
