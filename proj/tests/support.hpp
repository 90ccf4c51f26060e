#pragma once

// Builders and synthetic data shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "mmrec/corpus.hpp"
#include "mmrec/evaluation.hpp"
#include "mmrec/mindmap.hpp"

namespace testing {

using namespace mmrec;

inline MindNode leaf(std::string id, std::string text) {
    MindNode n;
    n.id = std::move(id);
    n.text = std::move(text);
    return n;
}

inline MindNode branch(std::string id, std::string text, std::vector<MindNode> children) {
    MindNode n = leaf(std::move(id), std::move(text));
    n.children = std::move(children);
    return n;
}

inline MindNode linked(std::string id, std::string text, std::string link) {
    MindNode n = leaf(std::move(id), std::move(text));
    n.link = std::move(link);
    return n;
}

inline MapHistory single_revision(const std::string& map_id, const MindNode& root) {
    return MapHistory{{MindMap::from_tree(map_id, root, 1, 0)}};
}

inline NodeEvent event(std::string map_id, std::string node_id, NodeEventKind kind, Timestamp at) {
    return NodeEvent{std::move(map_id), std::move(node_id), kind, at};
}

/// The example tree used for depth readings: Scopus sits two levels down.
inline MindNode search_engine_tree() {
    return branch("root", "Literature", {
        branch("ase", "Academic Search Engines", {
            leaf("scopus", "Scopus"),
            leaf("scholar", "Google Scholar"),
        }),
        leaf("rs", "Recommender Systems"),
    });
}

/// `shown` impressions in one set, the first `clicked` of them clicked.
inline void add_set(std::vector<RecEvent>& log, const std::string& set_id, const std::string& user,
                    std::size_t shown, std::size_t clicked, Timestamp at = 0) {
    for (std::size_t i = 0; i < shown; ++i) {
        const DocId doc{static_cast<std::uint32_t>(i + 1)};
        log.push_back({set_id, doc, user, RecEventKind::shown, at});
        if (i < clicked) log.push_back({set_id, doc, user, RecEventKind::clicked, at + 1});
    }
}

inline std::string events_csv(const std::vector<RecEvent>& log) {
    std::string out = "set_id,doc_id,user_id,kind,at\n";
    for (const auto& e : log) {
        out += e.set_id + "," + std::to_string(raw(e.doc)) + "," + e.user_id + "," +
               std::string(to_string(e.kind)) + "," + std::to_string(e.at) + "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("mmrec-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct SyntheticSpec {
    std::size_t users = 5;
    std::size_t docs = 200;
    std::size_t vocabulary = 2000;
    std::size_t maps_per_user = 2;
    std::size_t nodes_per_map = 20;
    std::uint64_t seed = 1;
};

inline std::string word(std::size_t i) { return "w" + std::to_string(i); }

inline std::string doc_title(std::size_t i, std::mt19937_64& rng, std::size_t vocabulary) {
    std::string title = "paper" + std::to_string(i);
    for (int w = 0; w < 4; ++w) title += " " + word(rng() % vocabulary);
    return title;
}

/// Writes `<dir>/corpus.jsonl` and `<dir>/maps/<user>/*.mm` plus an
/// events.csv sidecar per user. Node texts reuse the document vocabulary and
/// about one node in five links to a document title.
inline void write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<std::string> titles;
    std::string corpus;
    for (std::size_t d = 0; d < spec.docs; ++d) {
        titles.push_back(doc_title(d, rng, spec.vocabulary));
        corpus += "{\"title\":\"" + titles.back() + "\",\"terms\":[";
        for (int t = 0; t < 12; ++t) {
            if (t) corpus += ",";
            corpus += "\"" + word(rng() % spec.vocabulary) + "\"";
        }
        corpus += "],\"citations\":[";
        if (d > 0) {
            for (int c = 0; c < 3; ++c) {
                if (c) corpus += ",";
                corpus += "\"" + titles[rng() % d] + "\"";
            }
        }
        corpus += "]}\n";
    }
    write_text(dir / "corpus.jsonl", corpus);

    std::string users_csv = "user_id,registered,cohort\n";
    for (std::size_t u = 0; u < spec.users; ++u) {
        const std::string user = "u" + std::to_string(u);
        users_csv += user + "," + (u % 2 ? "true" : "false") + ",c" + std::to_string(u % 3) + "\n";
        std::string events = "map_id,node_id,kind,at\n";
        Timestamp clock = 1'600'000'000'000 + static_cast<Timestamp>(u) * 1000;
        for (std::size_t m = 0; m < spec.maps_per_user; ++m) {
            const std::string map_id = "m" + std::to_string(m);
            std::string xml = "<map version=\"1.0.1\">\n";
            std::vector<std::size_t> open;  // ancestors of the next node
            for (std::size_t n = 0; n < spec.nodes_per_map; ++n) {
                const std::size_t depth = n == 0 ? 0 : 1 + rng() % std::min<std::size_t>(open.size(), 3);
                while (open.size() > depth) {
                    xml += std::string(open.size(), ' ') + "</node>\n";
                    open.pop_back();
                }
                const std::string id = "n" + std::to_string(n);
                std::string text;
                const int words = 1 + static_cast<int>(rng() % 4);
                for (int w = 0; w < words; ++w) text += (w ? " " : "") + word(rng() % spec.vocabulary);
                std::string attrs = "ID=\"" + id + "\" TEXT=\"" + xml_escape(text) + "\"";
                if (n > 0 && rng() % 5 == 0) attrs += " LINK=\"" + xml_escape(titles[rng() % titles.size()]) + "\"";
                if (n > 0 && rng() % 11 == 0) attrs += " FOLDED=\"true\"";
                xml += std::string(open.size() + 1, ' ') + "<node " + attrs + ">\n";
                open.push_back(depth);
                clock += 1 + static_cast<Timestamp>(rng() % 3'600'000);
                events += map_id + "," + id + ",created," + std::to_string(clock) + "\n";
                if (rng() % 3 == 0)
                    events += map_id + "," + id + ",moved," + std::to_string(clock + 500) + "\n";
                if (rng() % 4 == 0)
                    events += map_id + "," + id + ",edited," + std::to_string(clock + 700) + "\n";
            }
            while (!open.empty()) {
                xml += std::string(open.size(), ' ') + "</node>\n";
                open.pop_back();
            }
            xml += "</map>\n";
            write_text(dir / "maps" / user / (map_id + ".mm"), xml);
        }
        write_text(dir / "maps" / user / "events.csv", events);
    }
    write_text(dir / "maps" / "users.csv", users_csv);
}

}  // namespace testing
