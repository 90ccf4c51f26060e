#include "mmrec/storage.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmrec/error.hpp"

namespace mmrec {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::int64_t parse_int(std::string_view text, std::size_t line, std::string_view column) {
    std::int64_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size())
        throw Error(Errc::malformed_row, "line " + std::to_string(line) + ": column '" +
                                             std::string(column) + "' is not an integer: '" +
                                             std::string(text) + "'");
    return value;
}

DocId parse_doc(std::string_view text, std::size_t line) {
    const auto value = parse_int(text, line, "doc_id");
    if (value < 0 || value > static_cast<std::int64_t>(UINT32_MAX))
        throw Error(Errc::malformed_row, "line " + std::to_string(line) + ": doc_id out of range");
    return DocId{static_cast<std::uint32_t>(value)};
}

std::vector<std::string> string_list(const json& object, const char* key) {
    std::vector<std::string> out;
    if (!object.contains(key) || object[key].is_null()) return out;
    for (const auto& entry : object.at(key)) out.push_back(entry.get<std::string>());
    return out;
}

std::size_t clicks_of(const RecommendationSet& set, const std::set<std::pair<std::string, DocId>>& clicked) {
    std::size_t n = 0;
    for (const auto& item : set.items) n += clicked.count({set.set_id, item.doc});
    return n;
}

std::set<std::pair<std::string, DocId>> clicked_pairs(std::span<const RecEvent> events) {
    std::set<std::pair<std::string, DocId>> clicked;
    for (const auto& e : events) {
        if (e.kind == RecEventKind::clicked) clicked.emplace(e.set_id, e.doc);
    }
    return clicked;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<CsvRow> read_csv(std::string_view text, std::span<const std::string_view> header) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(Errc::malformed_row, "line 1: missing CSV header");
    const auto head = split_csv_line(lines.front());
    if (!std::equal(head.begin(), head.end(), header.begin(), header.end())) {
        std::string expected;
        for (auto h : header) expected += (expected.empty() ? "" : ",") + std::string(h);
        throw Error(Errc::malformed_row, "line 1: expected header '" + expected + "'");
    }
    std::vector<CsvRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            throw Error(Errc::malformed_row, "line " + std::to_string(i + 1) + ": expected " +
                                                 std::to_string(header.size()) + " fields, got " +
                                                 std::to_string(fields.size()));
        rows.push_back({i + 1, std::move(fields)});
    }
    return rows;
}

// ---------------------------------------------------------------------------

void load_corpus_jsonl(std::string_view text, Corpus& corpus) {
    struct Raw {
        std::string title;
        std::vector<std::string> terms;
        std::vector<std::string> citations;
    };
    std::vector<Raw> raw;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t") == std::string_view::npos) continue;
        const auto where = "line " + std::to_string(i + 1) + ": ";
        try {
            const auto object = json::parse(lines[i]);
            if (!object.is_object() || !object.contains("title"))
                throw Error(Errc::malformed_row, where + "expected an object with a title");
            if (object.contains("doc_id")) {
                Document doc;
                doc.id = DocId{object.at("doc_id").get<std::uint32_t>()};
                doc.title = object.at("title").get<std::string>();
                doc.terms = string_list(object, "terms");
                if (object.contains("cited_ids")) {
                    for (const auto& id : object.at("cited_ids")) doc.cited_ids.push_back(DocId{id.get<std::uint32_t>()});
                }
                corpus.restore_document(std::move(doc));
            } else {
                raw.push_back({object.at("title").get<std::string>(), string_list(object, "terms"),
                               string_list(object, "citations")});
            }
        } catch (const json::exception& e) {
            throw Error(Errc::malformed_row, where + e.what());
        }
    }
    corpus.validate();
    for (const auto& doc : raw) corpus.ingest_document(doc.title, doc.terms, doc.citations);
}

Corpus load_corpus(const fs::path& path) {
    Corpus corpus;
    load_corpus_jsonl(read_file(path), corpus);
    return corpus;
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::vector<const Document*> docs;
    for (const auto& doc : corpus.documents()) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::string out;
    for (const auto* doc : docs) {
        json cited = json::array();
        for (DocId id : doc->cited_ids) cited.push_back(raw(id));
        json object = {{"doc_id", raw(doc->id)}, {"title", doc->title}, {"terms", doc->terms},
                       {"cited_ids", cited}};
        out += object.dump() + "\n";
    }
    return out;
}

std::string corpus_id_map_csv(const Corpus& corpus) {
    std::vector<const Document*> docs;
    for (const auto& doc : corpus.documents()) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::string out = "doc_id,cleantitle\n";
    for (const auto* doc : docs) out += to_string(doc->id) + "," + csv_field(doc->cleantitle) + "\n";
    return out;
}

void save_corpus(const Corpus& corpus, const fs::path& path) {
    write_file(path, corpus_to_jsonl(corpus));
    write_file(fs::path(path.string() + ".ids.csv"), corpus_id_map_csv(corpus));
}

// ---------------------------------------------------------------------------

std::vector<NodeEvent> parse_node_events(std::string_view csv) {
    static constexpr std::string_view kHeader[] = {"map_id", "node_id", "kind", "at"};
    std::vector<NodeEvent> events;
    for (auto& row : read_csv(csv, kHeader)) {
        NodeEventKind kind;
        try {
            kind = parse_node_event_kind(row.fields[2]);
        } catch (const Error&) {
            throw Error(Errc::malformed_row, "line " + std::to_string(row.line) +
                                                 ": unknown node event kind '" + row.fields[2] + "'");
        }
        events.push_back({std::move(row.fields[0]), std::move(row.fields[1]), kind,
                          parse_int(row.fields[3], row.line, "at")});
    }
    return events;
}

std::string format_node_events(std::span<const NodeEvent> events) {
    std::string out = "map_id,node_id,kind,at\n";
    for (const auto& e : events) {
        out += csv_field(e.map_id) + "," + csv_field(e.node_id) + "," + std::string(to_string(e.kind)) +
               "," + std::to_string(e.at) + "\n";
    }
    return out;
}

std::map<std::string, UserRecord> parse_users(std::string_view csv) {
    const auto lines = lines_of(csv);
    std::map<std::string, UserRecord> users;
    if (lines.empty()) return users;
    const auto header = split_csv_line(lines.front());
    if (header.size() < 2 || header[0] != "user_id" || header[1] != "registered")
        throw Error(Errc::malformed_row, "line 1: users header must start with user_id,registered");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            throw Error(Errc::malformed_row, "line " + std::to_string(i + 1) + ": wrong field count");
        UserRecord record;
        record.user_id = fields[0];
        record.registered = fields[1] == "true" || fields[1] == "1";
        for (std::size_t c = 2; c < header.size(); ++c) record.attributes[header[c]] = fields[c];
        if (!users.emplace(record.user_id, record).second)
            throw Error(Errc::malformed_row,
                        "line " + std::to_string(i + 1) + ": duplicate user '" + fields[0] + "'");
    }
    return users;
}

MindMapStore load_mindmap_dir(const fs::path& dir, Corpus* corpus) {
    if (!fs::is_directory(dir))
        throw Error(Errc::io_error, "mind-map directory '" + dir.string() + "' does not exist");

    MindMapStore store;
    if (fs::exists(dir / "users.csv")) store.records = parse_users(read_file(dir / "users.csv"));

    std::vector<fs::path> user_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) user_dirs.push_back(entry.path());
    }
    std::sort(user_dirs.begin(), user_dirs.end());

    for (const auto& user_dir : user_dirs) {
        const std::string user_id = user_dir.filename().string();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(user_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".mm") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());

        std::map<std::string, std::vector<MindMap>> by_map;
        for (const auto& file : files) {
            const std::string name = file.filename().string();
            const auto first_dot = name.find('.');
            const std::string stem = name.substr(0, first_dot);
            std::int64_t revision_hint = 0;
            const auto rest = name.substr(first_dot + 1, name.size() - first_dot - 4);
            if (!rest.empty() && rest.find_first_not_of("0123456789") == std::string::npos)
                revision_hint = std::stoll(rest);

            MindMap map;
            try {
                map = parse_mindmap(read_file(file), stem);
            } catch (const Error& e) {
                throw Error(e.code(), file.string() + ": " + e.what());
            }
            if (map.revision() == 0 && revision_hint != 0)
                map = MindMap::from_tree(map.map_id(), map.tree(), revision_hint, map.saved_at());
            by_map[map.map_id()].push_back(std::move(map));
        }

        std::vector<MapHistory> histories;
        for (auto& [map_id, revisions] : by_map) {
            std::sort(revisions.begin(), revisions.end(),
                      [](const MindMap& a, const MindMap& b) { return a.revision() < b.revision(); });
            histories.push_back(MapHistory{std::move(revisions)});
        }

        std::optional<std::vector<NodeEvent>> sidecar;
        if (fs::exists(user_dir / "events.csv")) sidecar = parse_node_events(read_file(user_dir / "events.csv"));

        if (corpus) {
            for (const auto& history : histories)
                for (const auto& revision : history.revisions)
                    for (const auto& node : revision.nodes())
                        if (node.link) corpus->resolve_citation(*node.link);
        }
        try {
            store.users.emplace(user_id, MindMapCollection(user_id, std::move(histories), std::move(sidecar)));
        } catch (const Error& e) {
            throw Error(e.code(), "user '" + user_id + "': " + e.what());
        }
        if (!store.records.count(user_id)) store.records[user_id] = UserRecord{user_id, false, {}};
    }
    return store;
}

// ---------------------------------------------------------------------------

EventLog replay_event_log(std::string_view events_csv, std::optional<std::string_view> ratings_csv) {
    static constexpr std::string_view kEventHeader[] = {"set_id", "doc_id", "user_id", "kind", "at"};
    static constexpr std::string_view kRatingHeader[] = {"set_id", "user_id", "stars", "at"};

    struct Parsed {
        RecEvent event;
        std::size_t line;
    };
    std::vector<Parsed> parsed;
    for (auto& row : read_csv(events_csv, kEventHeader)) {
        RecEventKind kind;
        try {
            kind = parse_rec_event_kind(row.fields[3]);
        } catch (const Error& e) {
            throw Error(Errc::malformed_row, "line " + std::to_string(row.line) + ": " + e.what());
        }
        parsed.push_back({RecEvent{std::move(row.fields[0]), parse_doc(row.fields[1], row.line),
                                   std::move(row.fields[2]), kind, parse_int(row.fields[4], row.line, "at")},
                          row.line});
    }
    // Impressions sort ahead of interactions carrying the same timestamp.
    std::stable_sort(parsed.begin(), parsed.end(), [](const Parsed& a, const Parsed& b) {
        const bool a_shown = a.event.kind == RecEventKind::shown;
        const bool b_shown = b.event.kind == RecEventKind::shown;
        return std::tie(a.event.at, b_shown) < std::tie(b.event.at, a_shown);
    });

    EventLog log;
    std::map<std::pair<std::string, DocId>, std::string> shown;  // -> user
    for (auto& p : parsed) {
        auto key = std::make_pair(p.event.set_id, p.event.doc);
        if (p.event.kind == RecEventKind::shown) {
            shown.emplace(key, p.event.user_id);
        } else {
            auto it = shown.find(key);
            if (it == shown.end())
                throw Error(Errc::invariant_violation,
                            "line " + std::to_string(p.line) + ": " + std::string(to_string(p.event.kind)) +
                                " event for set '" + p.event.set_id + "' doc " + to_string(p.event.doc) +
                                " has no earlier shown event");
            if (it->second != p.event.user_id)
                throw Error(Errc::invariant_violation, "line " + std::to_string(p.line) +
                                                           ": user differs from the impression's user");
        }
        log.events.push_back(std::move(p.event));
    }

    if (ratings_csv) {
        std::vector<std::pair<SetRating, std::size_t>> ratings;
        for (auto& row : read_csv(*ratings_csv, kRatingHeader)) {
            const auto stars = parse_int(row.fields[2], row.line, "stars");
            if (stars < 1 || stars > 5)
                throw Error(Errc::invariant_violation,
                            "line " + std::to_string(row.line) + ": stars must be within 1..5");
            ratings.push_back({SetRating{std::move(row.fields[0]), std::move(row.fields[1]),
                                         static_cast<int>(stars), parse_int(row.fields[3], row.line, "at")},
                               row.line});
        }
        std::stable_sort(ratings.begin(), ratings.end(),
                         [](const auto& a, const auto& b) { return a.first.at < b.first.at; });
        for (auto& [rating, line] : ratings) log.ratings.push_back(std::move(rating));
    }
    return log;
}

std::string format_events_csv(std::span<const RecEvent> events) {
    std::string out = "set_id,doc_id,user_id,kind,at\n";
    for (const auto& e : events) {
        out += csv_field(e.set_id) + "," + to_string(e.doc) + "," + csv_field(e.user_id) + "," +
               std::string(to_string(e.kind)) + "," + std::to_string(e.at) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string set_to_json_line(const RecommendationSet& set) {
    json items = json::array();
    for (const auto& item : set.items) {
        items.push_back({{"doc_id", raw(item.doc)},
                         {"original_rank", item.original_rank},
                         {"display_rank", item.display_rank}});
    }
    json object = {{"set_id", set.set_id},
                   {"user_id", set.user_id},
                   {"created_at", set.created_at},
                   {"trigger", std::string(to_string(set.trigger))},
                   {"label", set.label},
                   {"algorithm", set.algorithm},
                   {"config", set.config ? json(serialize_config(*set.config)) : json(nullptr)},
                   {"items", items}};
    return object.dump() + "\n";
}

std::vector<RecommendationSet> parse_sets_jsonl(std::string_view text) {
    std::vector<RecommendationSet> sets;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t") == std::string_view::npos) continue;
        try {
            const auto object = json::parse(lines[i]);
            RecommendationSet set;
            set.set_id = object.at("set_id").get<std::string>();
            set.user_id = object.at("user_id").get<std::string>();
            set.created_at = object.at("created_at").get<Timestamp>();
            set.trigger = parse_trigger(object.at("trigger").get<std::string>());
            set.label = object.value("label", std::string());
            set.algorithm = object.at("algorithm").get<std::string>();
            if (object.contains("config") && !object.at("config").is_null())
                set.config = parse_config(object.at("config").get<std::string>());
            for (const auto& item : object.at("items")) {
                set.items.push_back({DocId{item.at("doc_id").get<std::uint32_t>()},
                                     item.at("original_rank").get<std::size_t>(),
                                     item.at("display_rank").get<std::size_t>()});
            }
            sets.push_back(std::move(set));
        } catch (const json::exception& e) {
            throw Error(Errc::malformed_row, "line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return sets;
}

std::string export_sets_csv(std::span<const RecommendationSet> sets, std::span<const RecEvent> events) {
    const auto clicked = clicked_pairs(events);
    std::string out = "set_id,user_id,created_at,trigger,label,algorithm,items,clicks\n";
    for (const auto& set : sets) {
        out += csv_field(set.set_id) + "," + csv_field(set.user_id) + "," + std::to_string(set.created_at) +
               "," + std::string(to_string(set.trigger)) + "," + csv_field(set.label) + "," +
               csv_field(set.algorithm) + "," + std::to_string(set.items.size()) + "," +
               std::to_string(clicks_of(set, clicked)) + "\n";
    }
    return out;
}

std::string export_items_csv(std::span<const RecommendationSet> sets, std::span<const RecEvent> events) {
    const auto clicked = clicked_pairs(events);
    std::string out = "set_id,doc_id,original_rank,display_rank,clicked\n";
    for (const auto& set : sets) {
        for (const auto& item : set.items) {
            out += csv_field(set.set_id) + "," + to_string(item.doc) + "," +
                   std::to_string(item.original_rank) + "," + std::to_string(item.display_rank) + "," +
                   (clicked.count({set.set_id, item.doc}) ? "1" : "0") + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string format_number(double value) {
    std::ostringstream out;
    out << std::setprecision(10) << value;
    return out.str();
}

std::string offline_results_csv(std::span<const OfflineResult> results) {
    std::string out = "user_id,algorithm,target_doc,target_rank,p_at_3,p_at_10,mrr,ndcg,pool_size\n";
    for (const auto& r : results) {
        out += csv_field(r.user_id) + "," + csv_field(r.algorithm) + "," + to_string(r.target) + "," +
               (r.target_rank ? std::to_string(*r.target_rank) : std::string()) + "," +
               std::to_string(r.p_at_3) + "," + std::to_string(r.p_at_10) + "," +
               format_number(r.mrr_term) + "," + format_number(r.ndcg) + "," +
               std::to_string(r.pool_size) + "\n";
    }
    return out;
}

std::string offline_summary_table(std::span<const OfflineResult> results) {
    std::ostringstream out;
    out << std::left << std::setw(28) << "algorithm" << std::right << std::setw(8) << "users"
        << std::setw(10) << "P@3" << std::setw(10) << "P@10" << std::setw(10) << "MRR" << std::setw(10)
        << "nDCG" << "\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& [name, s] : summarize_offline(results)) {
        out << std::left << std::setw(28) << name << std::right << std::setw(8) << s.users
            << std::setw(10) << s.p_at_3 << std::setw(10) << s.p_at_10 << std::setw(10) << s.mrr
            << std::setw(10) << s.ndcg << "\n";
    }
    return out.str();
}

namespace {

struct MetricLine {
    std::string name;
    std::string display;
    double value;
    std::size_t n;
};

std::vector<MetricLine> metric_lines(const RateMetrics& m) {
    std::vector<MetricLine> lines = {
        {"shown", "shown", static_cast<double>(m.shown), m.shown},
        {"clicked", "clicked", static_cast<double>(m.clicked), m.shown},
        {"ctr", "CTR", m.ctr, m.shown},
        {"ctr_set", "CTR_Set", m.ctr_set, m.sets},
        {"ctr_user", "CTR_User", m.ctr_user, m.users},
        {"ltr", "LTR", m.ltr, m.shown},
        {"atr", "ATR", m.atr, m.shown},
        {"citr", "CiTR", m.citr, m.shown},
    };
    if (m.mean_rating) lines.push_back({"mean_rating", "rating", *m.mean_rating, m.ratings});
    return lines;
}

}  // namespace

std::string metric_report_csv(const std::map<std::string, RateMetrics>& report) {
    std::string out = "group,metric,value,n\n";
    for (const auto& [group, m] : report) {
        for (const auto& line : metric_lines(m))
            out += csv_field(group) + "," + line.name + "," + format_number(line.value) + "," +
                   std::to_string(line.n) + "\n";
    }
    return out;
}

std::string metric_report_table(const std::map<std::string, RateMetrics>& report) {
    std::string out;
    for (const auto& [group, m] : report) {
        out += "[" + group + "]\n";
        for (const auto& line : metric_lines(m))
            out += "  " + line.display + "=" + format_number(line.value) + " (n=" + std::to_string(line.n) + ")\n";
    }
    return out;
}

std::string reiteration_csv(std::span<const IterationRow> rows) {
    std::string out = "iteration,shown,clicks,ctr,oblivious,first_click_ctr\n";
    for (const auto& r : rows) {
        out += std::to_string(r.iteration) + "," + std::to_string(r.shown) + "," + std::to_string(r.clicks) +
               "," + format_number(r.ctr) + "," + std::to_string(r.oblivious) + "," +
               format_number(r.first_click_ctr) + "\n";
    }
    return out;
}

}  // namespace mmrec
