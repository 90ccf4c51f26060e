#include "mmrec/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "mmrec/error.hpp"
#include "mmrec/evaluation.hpp"
#include "mmrec/experiment.hpp"
#include "mmrec/matching.hpp"
#include "mmrec/parallel.hpp"
#include "mmrec/storage.hpp"

namespace fs = std::filesystem;

namespace mmrec {

namespace {

struct Options {
    std::string corpus;
    std::string mindmaps;
    std::string out;
    std::vector<std::string> users;
    std::uint64_t seed = 0;
    std::vector<std::string> presets;
    std::vector<std::string> configs;
    std::string space;
    std::optional<Timestamp> now;
    std::size_t count = 10;
    std::size_t pool_size = 50;
    double p_stereotype = 0.01;
    std::string catalog;
    std::string label;
    std::string trigger = "automatic";
    std::size_t threads = 1;
    std::size_t random_configs = 0;
    std::string events;
    std::string ratings;
    std::string group_by;
    std::string sets;
    std::string user_file;
};

void emit(const Options& opt, const std::string& text, std::ostream& out) {
    if (opt.out.empty()) {
        out << text;
    } else {
        write_file(opt.out, text);
    }
}

std::string hex16(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

struct Loaded {
    Corpus corpus;
    MindMapStore store;
};

Loaded load_inputs(const Options& opt) {
    Loaded loaded;
    loaded.corpus = load_corpus(opt.corpus);
    loaded.store = load_mindmap_dir(opt.mindmaps, &loaded.corpus);
    loaded.corpus.validate();
    return loaded;
}

std::vector<std::string> chosen_users(const Options& opt, const MindMapStore& store) {
    if (opt.users.empty()) {
        std::vector<std::string> all;
        for (const auto& [id, record] : store.records) all.push_back(id);
        return all;
    }
    std::set<std::string> unique(opt.users.begin(), opt.users.end());
    for (const auto& id : unique) {
        if (!store.records.count(id)) throw Error(Errc::unknown_user, "unknown user '" + id + "'");
    }
    return {unique.begin(), unique.end()};
}

std::vector<DocId> read_catalog(const std::string& path) {
    std::vector<DocId> catalog;
    std::istringstream lines(read_file(path));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        catalog.push_back(parse_doc_id(line));
    }
    return catalog;
}

Timestamp latest_event(const MindMapCollection* collection) {
    Timestamp latest = 0;
    if (!collection) return latest;
    for (const auto& event : collection->events()) latest = std::max(latest, event.at);
    return latest;
}

int cmd_ingest_corpus(const Options& opt, std::ostream& out) {
    const auto corpus = load_corpus(opt.corpus);
    corpus.validate();
    if (!opt.out.empty()) save_corpus(corpus, opt.out);
    out << "documents " << corpus.size() << "\n";
    return 0;
}

int cmd_ingest_mindmaps(const Options& opt, std::ostream& out) {
    Corpus corpus;
    if (!opt.corpus.empty()) corpus = load_corpus(opt.corpus);
    const auto store = load_mindmap_dir(opt.mindmaps, &corpus);
    corpus.validate();
    for (const auto& [id, collection] : store.users) {
        std::size_t nodes = 0;
        for (const auto& history : collection.maps()) nodes += history.latest().size();
        out << id << " maps=" << collection.maps().size() << " nodes=" << nodes
            << " events=" << collection.events().size() << "\n";
    }
    if (!opt.out.empty()) save_corpus(corpus, opt.out);
    out << "documents " << corpus.size() << "\n";
    return 0;
}

int cmd_recommend(const Options& opt, std::ostream& out) {
    const auto loaded = load_inputs(opt);
    const auto users = chosen_users(opt, loaded.store);

    std::optional<AlgorithmConfig> fixed;
    std::optional<VariableSpace> space;
    if (!opt.space.empty()) {
        space = parse_variable_space(read_file(opt.space));
    } else if (!opt.configs.empty()) {
        fixed = parse_config(read_file(opt.configs.front()));
    } else {
        fixed = preset(opt.presets.empty() ? "docear_combined" : opt.presets.front());
    }
    const auto catalog = opt.catalog.empty() ? most_cited(loaded.corpus, opt.pool_size)
                                             : read_catalog(opt.catalog);
    const auto trigger = parse_trigger(opt.trigger);

    std::vector<std::string> lines(users.size());
    parallel_for(users.size(), opt.threads, [&](std::size_t i) {
        const auto& user_id = users[i];
        const auto seed = derive_seed(opt.seed, user_id);
        Rng rng(seed);
        auto it = loaded.store.users.find(user_id);
        const MindMapCollection* collection = it == loaded.store.users.end() ? nullptr : &it->second;

        DispatchRequest request;
        request.user_id = user_id;
        request.collection = collection;
        request.config = space ? random_config(*space, rng) : *fixed;
        request.now = opt.now ? *opt.now : latest_event(collection);
        request.count = opt.count;
        request.pool_size = opt.pool_size;
        request.p_stereotype = opt.p_stereotype;
        request.label = opt.label;
        request.trigger = trigger;
        request.set_id = user_id + "-" + hex16(seed);
        lines[i] = set_to_json_line(dispatch(request, loaded.corpus, catalog, rng));
    });

    std::string text;
    for (const auto& line : lines) text += line;
    emit(opt, text, out);
    return 0;
}

int cmd_offline_eval(const Options& opt, std::ostream& out) {
    const auto loaded = load_inputs(opt);
    const auto users = chosen_users(opt, loaded.store);

    std::vector<AlgorithmConfig> configs;
    for (const auto& name : opt.presets) configs.push_back(preset(name));
    for (const auto& path : opt.configs) configs.push_back(parse_config(read_file(path)));
    if (opt.random_configs > 0) {
        const auto space = opt.space.empty() ? default_variable_space()
                                             : parse_variable_space(read_file(opt.space));
        Rng rng(opt.seed);
        for (std::size_t i = 0; i < opt.random_configs; ++i) configs.push_back(random_config(space, rng));
    }
    if (configs.empty()) {
        for (const auto& name : preset_names()) {
            if (name != "stereotype") configs.push_back(preset(name));
        }
    }
    for (const auto& config : configs) {
        if (config.stereotype)
            throw Error(Errc::invalid_config, "stereotype configs cannot be evaluated offline");
    }

    std::vector<const MindMapCollection*> collections;
    for (const auto& id : users) {
        auto it = loaded.store.users.find(id);
        if (it != loaded.store.users.end()) collections.push_back(&it->second);
    }
    const auto results = offline_evaluate_all(collections, loaded.corpus, configs, opt.threads);
    emit(opt, offline_results_csv(results), out);
    if (!opt.out.empty()) out << offline_summary_table(results);
    return 0;
}

int cmd_metrics(const Options& opt, std::ostream& out) {
    const auto events_text = read_file(opt.events);
    std::optional<std::string> ratings_text;
    if (!opt.ratings.empty()) ratings_text = read_file(opt.ratings);
    const auto log = replay_event_log(events_text, ratings_text ? std::optional<std::string_view>(*ratings_text)
                                                                : std::nullopt);

    std::map<std::string, RecommendationSet> sets;
    if (!opt.sets.empty()) {
        for (auto& set : parse_sets_jsonl(read_file(opt.sets))) sets.emplace(set.set_id, std::move(set));
    }
    std::map<std::string, UserRecord> records;
    if (!opt.user_file.empty()) records = parse_users(read_file(opt.user_file));

    GroupKey group;
    const std::string key = opt.group_by;
    if (key == "algorithm" || key == "label" || key == "trigger") {
        if (sets.empty()) throw Error(Errc::invalid_config, "--group-by " + key + " needs --sets");
        group = [&sets, key](const std::string& set_id, const std::string&) -> std::string {
            auto it = sets.find(set_id);
            if (it == sets.end()) return "unknown";
            if (key == "algorithm") return it->second.algorithm;
            if (key == "label") return it->second.label;
            return std::string(to_string(it->second.trigger));
        };
    } else if (key == "user") {
        group = [](const std::string&, const std::string& user_id) { return user_id; };
    } else if (key == "registered") {
        group = [&records](const std::string&, const std::string& user_id) -> std::string {
            auto it = records.find(user_id);
            return it != records.end() && it->second.registered ? "registered" : "anonymous";
        };
    } else if (!key.empty()) {
        if (records.empty()) throw Error(Errc::invalid_config, "--group-by " + key + " needs --users");
        group = [&records, key](const std::string&, const std::string& user_id) -> std::string {
            auto it = records.find(user_id);
            if (it == records.end()) return "unknown";
            auto attr = it->second.attributes.find(key);
            return attr == it->second.attributes.end() ? "unknown" : attr->second;
        };
    }

    const auto report = online_metrics(log.events, log.ratings, group);
    if (!opt.out.empty()) write_file(opt.out, metric_report_csv(report));
    out << metric_report_table(report);
    return 0;
}

int cmd_reiterate(const Options& opt, std::ostream& out) {
    const auto log = replay_event_log(read_file(opt.events));
    emit(opt, reiteration_csv(reiteration_report(log.events)), out);
    return 0;
}

int cmd_export(const Options& opt, std::ostream& out) {
    const auto sets = parse_sets_jsonl(read_file(opt.sets));
    std::vector<RecEvent> events;
    if (!opt.events.empty()) events = replay_event_log(read_file(opt.events)).events;
    const fs::path dir = opt.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "recommendation_sets.csv", export_sets_csv(sets, events));
    write_file(dir / "recommendations.csv", export_items_csv(sets, events));
    std::size_t items = 0;
    for (const auto& set : sets) items += set.items.size();
    out << "sets " << sets.size() << " items " << items << "\n";
    return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mind-map based research paper recommender", "mmrec"};
    app.require_subcommand(1);
    Options opt;

    auto* ingest_corpus = app.add_subcommand("ingest-corpus", "Normalize a corpus and assign document ids");
    ingest_corpus->add_option("--corpus", opt.corpus, "Corpus JSONL")->required();
    ingest_corpus->add_option("--out", opt.out, "Output corpus JSONL");

    auto* ingest_maps = app.add_subcommand("ingest-mindmaps", "Load mind maps and resolve their citations");
    ingest_maps->add_option("--mindmaps", opt.mindmaps, "Mind-map directory")->required();
    ingest_maps->add_option("--corpus", opt.corpus, "Corpus JSONL");
    ingest_maps->add_option("--out", opt.out, "Output corpus JSONL including resolved citations");

    auto* recommend = app.add_subcommand("recommend", "Deliver one recommendation set per user");
    recommend->add_option("--corpus", opt.corpus, "Corpus JSONL")->required();
    recommend->add_option("--mindmaps", opt.mindmaps, "Mind-map directory")->required();
    recommend->add_option("--user", opt.users, "User id (repeatable; default all)");
    recommend->add_option("--seed", opt.seed, "Random seed")->required();
    auto* rec_preset = recommend->add_option("--preset", opt.presets, "Algorithm preset")->expected(1);
    auto* rec_config = recommend->add_option("--config", opt.configs, "Algorithm config file")->expected(1);
    auto* rec_space = recommend->add_option("--space", opt.space, "Variable space; draws a config per user");
    rec_preset->excludes(rec_config)->excludes(rec_space);
    rec_config->excludes(rec_space);
    recommend->add_option("--now", opt.now, "Clock in ms since epoch (default: user's latest event)");
    recommend->add_option("--count", opt.count, "Items per set")->check(CLI::PositiveNumber);
    recommend->add_option("--pool-size", opt.pool_size, "Candidate pool size")->check(CLI::PositiveNumber);
    recommend->add_option("--p-stereotype", opt.p_stereotype, "Stereotype probability")->check(CLI::Range(0.0, 1.0));
    recommend->add_option("--stereotype-catalog", opt.catalog, "Doc ids, one per line");
    recommend->add_option("--label", opt.label, "Label recorded with each set");
    recommend->add_option("--trigger", opt.trigger, "requested or automatic");
    recommend->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    recommend->add_option("--out", opt.out, "Output JSONL");

    auto* offline = app.add_subcommand("offline-eval", "Hide each user's newest citation and try to recover it");
    offline->add_option("--corpus", opt.corpus, "Corpus JSONL")->required();
    offline->add_option("--mindmaps", opt.mindmaps, "Mind-map directory")->required();
    offline->add_option("--user", opt.users, "User id (repeatable; default all)");
    offline->add_option("--seed", opt.seed, "Random seed")->required();
    offline->add_option("--preset", opt.presets, "Algorithm preset (repeatable)");
    offline->add_option("--config", opt.configs, "Algorithm config file (repeatable)");
    offline->add_option("--random-configs", opt.random_configs, "Number of configs drawn from --space");
    offline->add_option("--space", opt.space, "Variable space (default: built-in ranges)");
    offline->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    offline->add_option("--out", opt.out, "Output CSV");

    auto* metrics = app.add_subcommand("metrics", "Fold an event log into click-through metrics");
    metrics->add_option("--events", opt.events, "Event CSV")->required();
    metrics->add_option("--ratings", opt.ratings, "Ratings CSV");
    metrics->add_option("--group-by", opt.group_by,
                        "algorithm, label, trigger, user, registered or a user attribute");
    metrics->add_option("--sets", opt.sets, "Recommendation sets JSONL");
    metrics->add_option("--users", opt.user_file, "users.csv");
    metrics->add_option("--out", opt.out, "Output CSV");

    auto* reiterate = app.add_subcommand("reiterate", "CTR by number of times an item was shown");
    reiterate->add_option("--events", opt.events, "Event CSV")->required();
    reiterate->add_option("--out", opt.out, "Output CSV");

    auto* exporter = app.add_subcommand("export", "Write recommendation_sets.csv and recommendations.csv");
    exporter->add_option("--sets", opt.sets, "Recommendation sets JSONL")->required();
    exporter->add_option("--events", opt.events, "Event CSV");
    exporter->add_option("--out", opt.out, "Output directory")->required();

    std::vector<const char*> argv{"mmrec"};
    for (const auto& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest_corpus) return cmd_ingest_corpus(opt, out);
        if (*ingest_maps) return cmd_ingest_mindmaps(opt, out);
        if (*recommend) return cmd_recommend(opt, out);
        if (*offline) return cmd_offline_eval(opt, out);
        if (*metrics) return cmd_metrics(opt, out);
        if (*reiterate) return cmd_reiterate(opt, out);
        if (*exporter) return cmd_export(opt, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace mmrec
