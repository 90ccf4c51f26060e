#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mmrec/error.hpp"
#include "mmrec/evaluation.hpp"
#include "mmrec/matching.hpp"
#include "mmrec/parallel.hpp"
#include "mmrec/user_model.hpp"

namespace mmrec {

namespace {

std::map<NodeRef, Timestamp> creation_times(const MindMapCollection& collection) {
    std::map<NodeRef, Timestamp> created;
    for (const auto& event : collection.events()) {
        if (event.kind != NodeEventKind::created) continue;
        NodeRef ref{event.map_id, event.node_id};
        auto [it, inserted] = created.emplace(std::move(ref), event.at);
        if (!inserted) it->second = std::min(it->second, event.at);
    }
    return created;
}

// Returns false when `node` itself is removed.
bool prune_tree(MindNode& node, const std::string& map_id, const std::set<NodeRef>& removed) {
    if (removed.count(NodeRef{map_id, node.id})) return false;
    std::vector<MindNode> kept;
    kept.reserve(node.children.size());
    for (auto& child : node.children) {
        if (prune_tree(child, map_id, removed)) kept.push_back(std::move(child));
    }
    node.children = std::move(kept);
    return true;
}

void collect_ids(const MindNode& node, std::set<std::string>& out) {
    out.insert(node.id);
    for (const auto& child : node.children) collect_ids(child, out);
}

}  // namespace

std::vector<CitationRecord> citation_history(const MindMapCollection& collection,
                                             const Corpus& corpus) {
    const auto created = creation_times(collection);
    std::vector<CitationRecord> records;
    for (const auto& history : collection.maps()) {
        const auto& map = history.latest();
        for (const auto& node : map.nodes()) {
            if (!node.link) continue;
            auto doc = corpus.find_citation(*node.link);
            if (!doc) continue;
            NodeRef ref{map.map_id(), node.id};
            auto it = created.find(ref);
            if (it == created.end()) continue;
            records.push_back({std::move(ref), *doc, it->second});
        }
    }
    std::sort(records.begin(), records.end(), [](const CitationRecord& a, const CitationRecord& b) {
        if (a.added_at != b.added_at) return a.added_at > b.added_at;
        return a.node < b.node;
    });
    return records;
}

MindMapCollection prune_collection(const MindMapCollection& collection,
                                   const CitationRecord& target) {
    const auto created = creation_times(collection);
    std::set<NodeRef> removed{target.node};
    for (const auto& [ref, at] : created) {
        if (at > target.added_at) removed.insert(ref);
    }

    std::vector<MapHistory> maps;
    std::set<NodeRef> surviving;
    for (const auto& history : collection.maps()) {
        const auto& latest = history.latest();
        MindNode root = latest.tree();
        if (!prune_tree(root, latest.map_id(), removed)) continue;
        std::set<std::string> ids;
        collect_ids(root, ids);
        for (const auto& id : ids) surviving.insert({latest.map_id(), id});
        maps.push_back(MapHistory{{MindMap::from_tree(latest.map_id(), root, latest.revision(),
                                                      latest.saved_at())}});
    }

    std::vector<NodeEvent> events;
    for (const auto& event : collection.events()) {
        if (event.at > target.added_at) continue;
        if (!surviving.count(NodeRef{event.map_id, event.node_id})) continue;
        events.push_back(event);
    }
    return MindMapCollection(collection.user_id(), std::move(maps), std::move(events));
}

double compute_ndcg(std::span<const DocId> candidates, std::span<const DocId> relevant) {
    const std::set<DocId> wanted(relevant.begin(), relevant.end());
    double dcg = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (wanted.count(candidates[i])) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
    }
    const std::size_t ideal_hits = std::min(wanted.size(), candidates.size());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal_hits; ++i) idcg += 1.0 / std::log2(static_cast<double>(i + 2));
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

OfflineResult offline_evaluate_user(const MindMapCollection& collection, const Corpus& corpus,
                                    const AlgorithmConfig& config) {
    const auto history = citation_history(collection, corpus);
    if (history.empty())
        throw Error(Errc::no_citations, "user '" + collection.user_id() + "' has no usable citations");

    const auto& target = history.front();
    OfflineResult result;
    result.user_id = collection.user_id();
    result.algorithm = config_label(config);
    result.target = target.doc;

    std::vector<DocId> relevant;
    for (const auto& record : history) {
        if (relevant.size() == kNdcgRelevantCount) break;
        if (std::find(relevant.begin(), relevant.end(), record.doc) == relevant.end())
            relevant.push_back(record.doc);
    }

    const auto pruned = prune_collection(collection, target);
    std::vector<DocId> pool;
    try {
        const auto model = build_model(pruned, corpus, config, target.added_at);
        for (const auto& scored : retrieve_candidates(corpus, model, kOfflinePoolSize))
            pool.push_back(scored.doc);
    } catch (const Error& e) {
        switch (e.code()) {
            case Errc::no_positive_features:
            case Errc::empty_collection:
            case Errc::empty_model:
            case Errc::empty_occurrences: break;
            default: throw;
        }
    }

    result.pool_size = pool.size();
    auto hit = std::find(pool.begin(), pool.end(), target.doc);
    if (hit != pool.end()) {
        const auto rank = static_cast<std::size_t>(hit - pool.begin()) + 1;
        result.target_rank = rank;
        result.p_at_3 = rank <= 3 ? 1 : 0;
        result.p_at_10 = rank <= 10 ? 1 : 0;
        result.mrr_term = 1.0 / static_cast<double>(rank);
    }
    result.ndcg = compute_ndcg(pool, relevant);
    return result;
}

std::vector<OfflineResult> offline_evaluate_all(std::span<const MindMapCollection* const> users,
                                                const Corpus& corpus,
                                                std::span<const AlgorithmConfig> configs,
                                                std::size_t threads) {
    const std::size_t jobs = users.size() * configs.size();
    std::vector<std::optional<OfflineResult>> slots(jobs);
    parallel_for(jobs, threads, [&](std::size_t i) {
        const auto& user = *users[i / configs.size()];
        try {
            slots[i] = offline_evaluate_user(user, corpus, configs[i % configs.size()]);
        } catch (const Error& e) {
            if (e.code() != Errc::no_citations) throw;
        }
    });
    std::vector<OfflineResult> results;
    for (auto& slot : slots) {
        if (slot) results.push_back(std::move(*slot));
    }
    return results;
}

std::map<std::string, OfflineSummary> summarize_offline(std::span<const OfflineResult> results) {
    std::map<std::string, OfflineSummary> summary;
    for (const auto& r : results) {
        auto& s = summary[r.algorithm];
        ++s.users;
        s.p_at_3 += r.p_at_3;
        s.p_at_10 += r.p_at_10;
        s.mrr += r.mrr_term;
        s.ndcg += r.ndcg;
    }
    for (auto& [name, s] : summary) {
        const auto n = static_cast<double>(s.users);
        s.p_at_3 /= n;
        s.p_at_10 /= n;
        s.mrr /= n;
        s.ndcg /= n;
    }
    return summary;
}

}  // namespace mmrec
