#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmrec/corpus.hpp"
#include "mmrec/evaluation.hpp"
#include "mmrec/matching.hpp"
#include "mmrec/mindmap.hpp"

namespace mmrec {

// ---------------------------------------------------------------------------
// Files and CSV

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits one CSV record; double quotes may wrap fields and escape as "".
std::vector<std::string> split_csv_line(std::string_view line);
/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

struct CsvRow {
    std::size_t line = 0;  // 1-based line number in the source
    std::vector<std::string> fields;
};

/// Checks the header exactly and every row's arity. Throws Error(malformed_row).
std::vector<CsvRow> read_csv(std::string_view text, std::span<const std::string_view> header);

// ---------------------------------------------------------------------------
// Corpus

/// One JSON object per line: {"title", "terms"?, "citations"?}. Persisted
/// lines additionally carry "doc_id" and "cited_ids" and are restored as is.
void load_corpus_jsonl(std::string_view text, Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);

std::string corpus_to_jsonl(const Corpus& corpus);
std::string corpus_id_map_csv(const Corpus& corpus);
/// Writes `path` and the id map next to it as `<path>.ids.csv`.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Mind maps

struct UserRecord {
    std::string user_id;
    bool registered = false;
    std::map<std::string, std::string> attributes;
};

std::vector<NodeEvent> parse_node_events(std::string_view csv);
std::string format_node_events(std::span<const NodeEvent> events);

std::map<std::string, UserRecord> parse_users(std::string_view csv);

struct MindMapStore {
    std::map<std::string, MindMapCollection> users;
    std::map<std::string, UserRecord> records;
};

/// Layout: `<dir>/<user_id>/*.mm`, one file per revision, plus an optional
/// `<dir>/<user_id>/events.csv` sidecar and `<dir>/users.csv`. A file's map id
/// comes from the map's ID attribute or else the file name up to the first
/// dot; its revision from REVISION or else a numeric second name component
/// (`paper.3.mm`). When `corpus` is given every link is resolved into it.
MindMapStore load_mindmap_dir(const std::filesystem::path& dir, Corpus* corpus = nullptr);

// ---------------------------------------------------------------------------
// Recommendation event logs

struct EventLog {
    std::vector<RecEvent> events;
    std::vector<SetRating> ratings;
};

/// Parses `set_id,doc_id,user_id,kind,at` (and `set_id,user_id,stars,at`),
/// sorts by time and checks that every interaction follows an impression.
/// Throws Error(malformed_row) or Error(invariant_violation) naming the line.
EventLog replay_event_log(std::string_view events_csv,
                          std::optional<std::string_view> ratings_csv = std::nullopt);

std::string format_events_csv(std::span<const RecEvent> events);

// ---------------------------------------------------------------------------
// Recommendation sets

std::string set_to_json_line(const RecommendationSet& set);
std::vector<RecommendationSet> parse_sets_jsonl(std::string_view text);

/// recommendation_sets.csv: set_id,user_id,created_at,trigger,label,algorithm,items,clicks
std::string export_sets_csv(std::span<const RecommendationSet> sets, std::span<const RecEvent> events);
/// recommendations.csv: set_id,doc_id,original_rank,display_rank,clicked
std::string export_items_csv(std::span<const RecommendationSet> sets, std::span<const RecEvent> events);

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double value);

std::string offline_results_csv(std::span<const OfflineResult> results);
std::string offline_summary_table(std::span<const OfflineResult> results);

/// Columns group,metric,value,n.
std::string metric_report_csv(const std::map<std::string, RateMetrics>& report);
std::string metric_report_table(const std::map<std::string, RateMetrics>& report);

std::string reiteration_csv(std::span<const IterationRow> rows);

}  // namespace mmrec
