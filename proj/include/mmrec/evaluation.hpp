#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmrec/config.hpp"
#include "mmrec/corpus.hpp"
#include "mmrec/mindmap.hpp"

namespace mmrec {

// ---------------------------------------------------------------------------
// Offline evaluation: hide the most recently added citation, rebuild the
// model from what the user had at that moment, and look for the hidden
// document among the ranked candidates.

inline constexpr std::size_t kOfflinePoolSize = 50;
inline constexpr std::size_t kNdcgRelevantCount = 10;

struct CitationRecord {
    NodeRef node;
    DocId doc{};
    Timestamp added_at = 0;  // the bearing node's `created` event
};

/// Citation-bearing nodes of the latest revisions whose link resolves in the
/// corpus and whose creation time is known, newest first (ties by node).
std::vector<CitationRecord> citation_history(const MindMapCollection& collection,
                                             const Corpus& corpus);

/// Copy of the collection as of `target`: the bearing node and everything
/// created after it are removed, together with their subtrees and events.
MindMapCollection prune_collection(const MindMapCollection& collection,
                                   const CitationRecord& target);

struct OfflineResult {
    std::string user_id;
    std::string algorithm;
    DocId target{};
    std::optional<std::size_t> target_rank;  // 1-based, within the pool
    int p_at_3 = 0;
    int p_at_10 = 0;
    double mrr_term = 0.0;
    double ndcg = 0.0;
    std::size_t pool_size = 0;

    bool operator==(const OfflineResult&) const = default;
};

/// Throws Error(no_citations) when the user has no usable citation. Users
/// whose pruned collection yields no model score zero on every metric.
OfflineResult offline_evaluate_user(const MindMapCollection& collection, const Corpus& corpus,
                                    const AlgorithmConfig& config);

/// Binary-gain nDCG with log2 discounts over the candidate list.
double compute_ndcg(std::span<const DocId> candidates, std::span<const DocId> relevant);

/// Every user against every config, users without citations skipped.
/// Results are ordered user-major, then by config, regardless of `threads`.
std::vector<OfflineResult> offline_evaluate_all(std::span<const MindMapCollection* const> users,
                                                const Corpus& corpus,
                                                std::span<const AlgorithmConfig> configs,
                                                std::size_t threads = 1);

struct OfflineSummary {
    std::size_t users = 0;
    double p_at_3 = 0.0;
    double p_at_10 = 0.0;
    double mrr = 0.0;
    double ndcg = 0.0;
};

/// Means per algorithm label.
std::map<std::string, OfflineSummary> summarize_offline(std::span<const OfflineResult> results);

// ---------------------------------------------------------------------------
// Online metrics

enum class RecEventKind { shown, clicked, linked, annotated, cited };

std::string_view to_string(RecEventKind kind);
RecEventKind parse_rec_event_kind(std::string_view text);

struct RecEvent {
    std::string set_id;
    DocId doc{};
    std::string user_id;
    RecEventKind kind = RecEventKind::shown;
    Timestamp at = 0;

    bool operator==(const RecEvent&) const = default;
};

struct SetRating {
    std::string set_id;
    std::string user_id;
    int stars = 0;
    Timestamp at = 0;

    bool operator==(const SetRating&) const = default;
};

struct RateMetrics {
    std::size_t shown = 0;
    std::size_t clicked = 0;
    std::size_t linked = 0;
    std::size_t annotated = 0;
    std::size_t cited = 0;
    std::size_t sets = 0;   // sets with at least one impression
    std::size_t users = 0;  // users with at least one impression
    std::size_t ratings = 0;
    double ctr = 0.0;
    double ctr_set = 0.0;
    double ctr_user = 0.0;
    double ltr = 0.0;
    double atr = 0.0;
    double citr = 0.0;
    std::optional<double> mean_rating;
};

/// Group key for a (set_id, user_id) pair; absent means one group "all".
using GroupKey = std::function<std::string(const std::string& set_id, const std::string& user_id)>;

/// Each event kind counts once per (set, document). Throws
/// Error(no_impressions) when nothing was shown.
std::map<std::string, RateMetrics> online_metrics(std::span<const RecEvent> events,
                                                  std::span<const SetRating> ratings,
                                                  const GroupKey& group = {});

/// Sample Pearson correlation. Throws Error(degenerate_series).
double pearson(std::span<const double> x, std::span<const double> y);

struct IterationRow {
    std::size_t iteration = 0;
    std::size_t shown = 0;
    std::size_t clicks = 0;
    std::size_t oblivious = 0;  // clicks on items the user clicked at an earlier showing
    double ctr = 0.0;
    double first_click_ctr = 0.0;  // (clicks - oblivious) / shown

    bool operator==(const IterationRow&) const = default;
};

/// CTR by how often the same user has already been shown the same document.
std::vector<IterationRow> reiteration_report(std::span<const RecEvent> events);

}  // namespace mmrec
