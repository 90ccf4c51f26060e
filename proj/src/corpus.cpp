#include "mmrec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "mmrec/error.hpp"
#include "mmrec/text.hpp"

namespace mmrec {

namespace {

constexpr std::string_view kCitationPrefix = "citation:";

void add_posting(std::vector<Posting>& list, DocId doc, std::uint32_t count) {
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, DocId d) { return p.doc < d; });
    if (it != list.end() && it->doc == doc) {
        it->count += count;
    } else {
        list.insert(it, Posting{doc, count});
    }
}

void remove_posting(std::vector<Posting>& list, DocId doc) {
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, DocId d) { return p.doc < d; });
    if (it != list.end() && it->doc == doc) list.erase(it);
}

// Multiset union: each term keeps the larger of its two multiplicities.
void merge_terms(std::vector<std::string>& into, const std::vector<std::string>& extra) {
    std::map<std::string_view, std::size_t> have;
    for (const auto& t : into) ++have[t];
    std::map<std::string_view, std::size_t> want;
    for (const auto& t : extra) ++want[t];
    std::vector<std::string> additions;
    for (const auto& [term, count] : want) {
        const std::size_t existing = have.count(term) ? have[term] : 0;
        for (std::size_t i = existing; i < count; ++i) additions.emplace_back(term);
    }
    into.insert(into.end(), additions.begin(), additions.end());
}

}  // namespace

std::string to_string(DocId id) { return std::to_string(raw(id)); }

DocId parse_doc_id(std::string_view text) {
    std::uint32_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size())
        throw Error(Errc::malformed_input, "invalid document id '" + std::string(text) + "'");
    return DocId{value};
}

Feature citation_feature(DocId id) { return std::string(kCitationPrefix) + to_string(id); }

std::optional<DocId> citation_target(std::string_view feature) {
    if (!feature.starts_with(kCitationPrefix)) return std::nullopt;
    feature.remove_prefix(kCitationPrefix.size());
    std::uint32_t value = 0;
    auto [end, ec] = std::from_chars(feature.data(), feature.data() + feature.size(), value);
    if (feature.empty() || ec != std::errc() || end != feature.data() + feature.size())
        return std::nullopt;
    return DocId{value};
}

std::string cleantitle(std::string_view title) {
    std::string clean;
    clean.reserve(title.size());
    for (char ch : title) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') {
            clean.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (c >= 'a' && c <= 'z') {
            clean.push_back(static_cast<char>(c));
        }
    }
    if (2 * clean.size() < utf8_length(title)) return std::string(title);
    return clean;
}

// ---------------------------------------------------------------------------

DocId Corpus::allocate_id() { return DocId{next_id_++}; }

const Document* Corpus::find(DocId id) const {
    auto it = slot_.find(raw(id));
    return it == slot_.end() ? nullptr : &documents_[it->second];
}

const Document& Corpus::document(DocId id) const {
    const auto* doc = find(id);
    if (!doc) throw Error(Errc::malformed_input, "unknown document id " + to_string(id));
    return *doc;
}

Document& Corpus::mutable_document(DocId id) { return documents_[slot_.at(raw(id))]; }

std::optional<DocId> Corpus::find_citation(std::string_view reference) const {
    auto it = cleantitle_index_.find(cleantitle(reference));
    if (it == cleantitle_index_.end()) return std::nullopt;
    return it->second;
}

DocId Corpus::resolve_citation(std::string_view reference) {
    if (auto existing = find_citation(reference)) return *existing;
    Document doc;
    doc.id = allocate_id();
    doc.title = std::string(reference);
    doc.cleantitle = cleantitle(reference);
    doc.terms = tokenize(reference);
    const DocId id = doc.id;
    restore_document(std::move(doc));
    return id;
}

DocId Corpus::ingest_document(std::string_view title, std::span<const std::string> body_terms,
                              std::span<const std::string> citations) {
    if (title.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error(Errc::empty_title, "document title is empty");

    std::vector<std::string> terms = tokenize(title);
    for (const auto& entry : body_terms) {
        auto tokens = tokenize(entry);
        terms.insert(terms.end(), tokens.begin(), tokens.end());
    }

    const DocId id = resolve_citation(title);
    std::vector<DocId> cited;
    for (const auto& reference : citations) {
        if (reference.empty()) continue;
        const DocId target = resolve_citation(reference);
        if (target != id) cited.push_back(target);
    }

    Document& doc = mutable_document(id);
    unindex_document(doc);
    merge_terms(doc.terms, terms);
    for (DocId target : cited) {
        if (std::find(doc.cited_ids.begin(), doc.cited_ids.end(), target) == doc.cited_ids.end())
            doc.cited_ids.push_back(target);
    }
    index_document(doc);
    return id;
}

void Corpus::restore_document(Document doc) {
    if (doc.title.empty()) throw Error(Errc::empty_title, "document title is empty");
    if (slot_.count(raw(doc.id)))
        throw Error(Errc::malformed_input, "duplicate document id " + to_string(doc.id));
    doc.cleantitle = cleantitle(doc.title);
    if (!cleantitle_index_.emplace(doc.cleantitle, doc.id).second)
        throw Error(Errc::malformed_input, "duplicate cleantitle for document " + to_string(doc.id));
    next_id_ = std::max(next_id_, raw(doc.id) + 1);
    slot_.emplace(raw(doc.id), documents_.size());
    documents_.push_back(std::move(doc));
    index_document(documents_.back());
}

void Corpus::validate() const {
    for (const auto& doc : documents_) {
        for (DocId cited : doc.cited_ids) {
            if (!find(cited))
                throw Error(Errc::invariant_violation, "document " + to_string(doc.id) +
                                                           " cites unknown id " + to_string(cited));
        }
    }
}

void Corpus::index_document(const Document& doc) {
    for (const auto& term : doc.terms) add_posting(term_index_[term], doc.id, 1);
    for (DocId cited : doc.cited_ids) add_posting(citation_index_[raw(cited)], doc.id, 1);
}

void Corpus::unindex_document(const Document& doc) {
    for (const auto& term : doc.terms) {
        auto it = term_index_.find(term);
        if (it == term_index_.end()) continue;
        remove_posting(it->second, doc.id);
        if (it->second.empty()) term_index_.erase(it);
    }
    for (DocId cited : doc.cited_ids) {
        auto it = citation_index_.find(raw(cited));
        if (it == citation_index_.end()) continue;
        remove_posting(it->second, doc.id);
        if (it->second.empty()) citation_index_.erase(it);
    }
}

std::span<const Posting> Corpus::term_postings(std::string_view term) const {
    auto it = term_index_.find(std::string(term));
    if (it == term_index_.end()) return {};
    return it->second;
}

std::span<const Posting> Corpus::citation_postings(DocId cited) const {
    auto it = citation_index_.find(raw(cited));
    if (it == citation_index_.end()) return {};
    return it->second;
}

std::span<const Posting> Corpus::postings(std::string_view feature) const {
    if (auto cited = citation_target(feature)) return citation_postings(*cited);
    return term_postings(feature);
}

std::size_t Corpus::document_frequency(std::string_view feature) const {
    return postings(feature).size();
}

double Corpus::idf(std::string_view feature) const {
    const auto df = document_frequency(feature);
    if (df == 0) return 0.0;
    return std::log(static_cast<double>(documents_.size()) / static_cast<double>(df));
}

std::vector<ScoredDoc> Corpus::score_query(std::span<const QueryTerm> query) const {
    if (query.empty()) throw Error(Errc::empty_query, "query has no features");

    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& q : query) {
        const auto list = postings(q.feature);
        if (list.empty()) continue;
        const double idf_value = std::log(static_cast<double>(documents_.size()) /
                                          static_cast<double>(list.size()));
        for (const auto& posting : list)
            scores[raw(posting.doc)] += q.weight * static_cast<double>(posting.count) * idf_value;
    }

    std::vector<ScoredDoc> ranked;
    ranked.reserve(scores.size());
    for (const auto& [doc, score] : scores) {
        if (score > 0.0) ranked.push_back({DocId{doc}, score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    return ranked;
}

}  // namespace mmrec
