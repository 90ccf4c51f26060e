#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mmrec {

enum class DocId : std::uint32_t {};

inline std::uint32_t raw(DocId id) { return static_cast<std::uint32_t>(id); }
std::string to_string(DocId id);
/// Throws Error(malformed_input) unless `text` is a decimal id.
DocId parse_doc_id(std::string_view text);

/// A user-model or query feature. Terms are stored verbatim (tokenizer output
/// never contains ':'); citation features are spelled "citation:<doc id>".
using Feature = std::string;

Feature citation_feature(DocId id);
std::optional<DocId> citation_target(std::string_view feature);

struct Document {
    DocId id{};
    std::string title;
    std::string cleantitle;
    std::vector<std::string> terms;  // bag, insertion order
    std::vector<DocId> cited_ids;    // distinct, insertion order
};

struct Posting {
    DocId doc{};
    std::uint32_t count = 0;

    bool operator==(const Posting&) const = default;
};

struct QueryTerm {
    Feature feature;
    double weight = 1.0;
};

struct ScoredDoc {
    DocId doc{};
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

/// Lowercase, keep only a-z; falls back to the original title when that
/// leaves fewer than half of its characters.
std::string cleantitle(std::string_view title);

/// Recommendation candidates with cleantitle deduplication and inverted
/// indexes over terms and cited document ids.
///
/// Mutation (ingest/resolve) is single-writer. Once built, a corpus is read
/// concurrently through the const interface; model building against a
/// frozen corpus uses find_citation() instead of resolve_citation().
class Corpus {
public:
    /// Existing id for the reference's cleantitle, or a new stub document.
    DocId resolve_citation(std::string_view reference);
    std::optional<DocId> find_citation(std::string_view reference) const;

    /// Inserts or merges by cleantitle. Title tokens are always indexed;
    /// `body_terms` entries are tokenized too. Throws Error(empty_title).
    DocId ingest_document(std::string_view title, std::span<const std::string> body_terms = {},
                          std::span<const std::string> citations = {});

    /// Restores a persisted document under its original id. Cited ids that
    /// are not yet present must be restored later (see validate()).
    void restore_document(Document doc);
    /// Throws Error(invariant_violation) if any cited id is unknown.
    void validate() const;

    std::size_t size() const { return documents_.size(); }
    std::span<const Document> documents() const { return documents_; }
    const Document* find(DocId id) const;
    /// Throws Error(malformed_input) for unknown ids.
    const Document& document(DocId id) const;

    std::span<const Posting> term_postings(std::string_view term) const;
    std::span<const Posting> citation_postings(DocId cited) const;
    std::span<const Posting> postings(std::string_view feature) const;

    std::size_t document_frequency(std::string_view feature) const;
    /// ln(N / df); zero when the feature is not indexed.
    double idf(std::string_view feature) const;

    /// Weighted dot product of query weights with tf * idf, score-descending,
    /// ties by doc id; zero-score documents omitted. Throws Error(empty_query).
    std::vector<ScoredDoc> score_query(std::span<const QueryTerm> query) const;

private:
    Document& mutable_document(DocId id);
    void index_document(const Document& doc);
    void unindex_document(const Document& doc);
    DocId allocate_id();

    std::vector<Document> documents_;
    std::unordered_map<std::uint32_t, std::size_t> slot_;
    std::unordered_map<std::string, DocId> cleantitle_index_;
    std::unordered_map<std::string, std::vector<Posting>> term_index_;
    std::unordered_map<std::uint32_t, std::vector<Posting>> citation_index_;
    std::uint32_t next_id_ = 1;
};

}  // namespace mmrec
