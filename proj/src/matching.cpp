#include "mmrec/matching.hpp"

#include <algorithm>
#include <numeric>

#include "mmrec/error.hpp"

namespace mmrec {

std::string_view to_string(Trigger trigger) {
    return trigger == Trigger::requested ? "requested" : "automatic";
}

Trigger parse_trigger(std::string_view text) {
    if (text == "requested") return Trigger::requested;
    if (text == "automatic") return Trigger::automatic;
    throw Error(Errc::malformed_input, "unknown trigger '" + std::string(text) + "'");
}

std::vector<ScoredDoc> retrieve_candidates(const Corpus& corpus, const UserModel& model,
                                           std::size_t pool_size) {
    if (model.features.empty())
        throw Error(Errc::empty_model, "user model of '" + model.user_id + "' is empty");
    const auto query = model.query();
    auto ranked = corpus.score_query(query);
    if (ranked.size() > pool_size) ranked.resize(pool_size);
    return ranked;
}

std::vector<RecommendationItem> select_and_shuffle(std::span<const DocId> pool, std::size_t k,
                                                   Rng& rng) {
    if (pool.empty()) throw Error(Errc::empty_pool, "candidate pool is empty");
    const std::size_t n = pool.size();
    const std::size_t m = std::min(k, n);

    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(index[i], index[j]);
    }
    index.resize(m);
    std::sort(index.begin(), index.end());

    for (std::size_t i = m; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(index[i - 1], index[j]);
    }

    std::vector<RecommendationItem> items;
    items.reserve(m);
    for (std::size_t pos = 0; pos < m; ++pos)
        items.push_back({pool[index[pos]], index[pos] + 1, pos + 1});
    return items;
}

std::vector<DocId> most_cited(const Corpus& corpus, std::size_t n) {
    std::vector<std::pair<std::size_t, DocId>> counts;
    for (const auto& doc : corpus.documents()) {
        counts.emplace_back(corpus.citation_postings(doc.id).size(), doc.id);
    }
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (counts.size() > n) counts.resize(n);
    std::vector<DocId> out;
    for (const auto& [count, doc] : counts) out.push_back(doc);
    return out;
}

RecommendationSet dispatch(const DispatchRequest& request, const Corpus& corpus,
                           std::span<const DocId> stereotype_catalog, Rng& rng) {
    RecommendationSet set;
    set.set_id = request.set_id;
    set.user_id = request.user_id;
    set.label = request.label;
    set.created_at = request.now;
    set.trigger = request.trigger;

    const bool coin = bernoulli(rng, request.p_stereotype);
    if (!coin && !request.config.stereotype && request.collection) {
        std::vector<DocId> pool;
        try {
            auto model = build_model(*request.collection, corpus, request.config, request.now);
            for (const auto& scored : retrieve_candidates(corpus, model, request.pool_size))
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
        if (!pool.empty()) {
            set.items = select_and_shuffle(pool, request.count, rng);
            set.algorithm = config_label(request.config);
            set.config = request.config;
            return set;
        }
    }

    set.items = select_and_shuffle(stereotype_catalog, request.count, rng);
    set.algorithm = std::string(kStereotypeAlgorithm);
    return set;
}

}  // namespace mmrec
