#include <cmath>
#include <random>

#include "doctest.h"
#include "mmrec/error.hpp"
#include "mmrec/evaluation.hpp"
#include "mmrec/experiment.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mmrec;
using namespace testing;

namespace {

std::vector<DocId> docs(std::initializer_list<std::uint32_t> values) {
    std::vector<DocId> out;
    for (auto v : values) out.push_back(DocId{v});
    return out;
}

}  // namespace

TEST_CASE("compute_ndcg") {
    std::vector<DocId> candidates;
    for (std::uint32_t i = 1; i <= 50; ++i) candidates.push_back(DocId{i});
    const auto relevant = docs({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    CHECK(compute_ndcg(candidates, relevant) == 1.0);
    CHECK(compute_ndcg(candidates, docs({99})) == 0.0);
    CHECK(compute_ndcg(docs({7, 8, 1}), docs({1})) == 0.5);

    // reordering below the last relevant item changes nothing
    auto shuffled = candidates;
    std::mt19937_64 rng(1);
    std::shuffle(shuffled.begin() + 10, shuffled.end(), rng);
    CHECK(compute_ndcg(shuffled, relevant) == 1.0);
    CHECK(compute_ndcg(docs({5, 1, 6, 2}), docs({1, 2})) ==
          doctest::Approx((1 / std::log2(3.0) + 1 / std::log2(5.0)) / (1 + 1 / std::log2(3.0))));
}

TEST_CASE("online metrics worked examples") {
    SUBCASE("overall CTR") {
        std::vector<RecEvent> log;
        for (int s = 0; s < 1000; ++s) add_set(log, "s" + std::to_string(s), "u", 10, s < 120 ? 1 : 0);
        const auto report = online_metrics(log, {});
        CHECK(report.at("all").shown == 10000);
        CHECK(report.at("all").ctr == doctest::Approx(0.012));
    }
    SUBCASE("two sets") {
        std::vector<RecEvent> log;
        add_set(log, "I", "u", 10, 8);
        add_set(log, "II", "u", 5, 2);
        const auto m = online_metrics(log, {}).at("all");
        CHECK(m.ctr == doctest::Approx(10.0 / 15));
        CHECK(m.ctr_set == doctest::Approx(0.6));
        CHECK(m.sets == 2);
    }
    SUBCASE("three users") {
        std::vector<RecEvent> log;
        add_set(log, "a", "A", 100, 7);
        add_set(log, "b", "B", 200, 16);
        add_set(log, "c", "C", 1000, 300);
        const auto m = online_metrics(log, {}).at("all");
        CHECK(m.ctr == doctest::Approx(323.0 / 1300));
        CHECK(m.ctr_user == doctest::Approx(0.15));
        CHECK(m.users == 3);
    }
}

TEST_CASE("online metrics details") {
    std::vector<RecEvent> log;
    add_set(log, "s1", "u1", 4, 2);
    log.push_back({"s1", DocId{1}, "u1", RecEventKind::clicked, 5});  // duplicate click
    log.push_back({"s1", DocId{1}, "u1", RecEventKind::linked, 6});
    log.push_back({"s1", DocId{2}, "u1", RecEventKind::annotated, 6});
    log.push_back({"s1", DocId{2}, "u1", RecEventKind::cited, 7});
    add_set(log, "s2", "u2", 4, 0);
    const std::vector<SetRating> ratings{{"s1", "u1", 4, 9}, {"s2", "u2", 1, 9}};

    const auto all = online_metrics(log, ratings).at("all");
    CHECK(all.clicked == 2);
    CHECK(all.ctr == 0.25);
    CHECK(all.ltr == 0.125);
    CHECK(all.atr == 0.125);
    CHECK(all.citr == 0.125);
    CHECK(all.mean_rating == 2.5);
    CHECK(all.ratings == 2);

    const auto by_user = online_metrics(log, ratings, [](const std::string&, const std::string& u) { return u; });
    CHECK(by_user.size() == 2);
    CHECK(by_user.at("u1").ctr == 0.5);
    CHECK(by_user.at("u2").ctr == 0.0);
    CHECK(by_user.at("u2").mean_rating == 1.0);

    CHECK_THROWS_AS(online_metrics({}, {}), Error);
}

TEST_CASE("rate metrics stay within bounds") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<RecEvent> log;
        std::vector<double> set_ctrs, user_ctrs;
        std::map<std::string, std::pair<double, double>> users;
        for (int s = 0; s < 1 + static_cast<int>(rng() % 10); ++s) {
            const std::string user = "u" + std::to_string(rng() % 3);
            const std::size_t shown = 1 + rng() % 10;
            const std::size_t clicked = rng() % (shown + 1);
            add_set(log, "s" + std::to_string(s), user, shown, clicked);
            set_ctrs.push_back(double(clicked) / double(shown));
            users[user].first += clicked;
            users[user].second += shown;
        }
        for (const auto& [u, c] : users) user_ctrs.push_back(c.first / c.second);
        const auto m = online_metrics(log, {}).at("all");
        for (double v : {m.ctr, m.ctr_set, m.ctr_user, m.ltr, m.atr, m.citr}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(m.ctr_set >= *std::min_element(set_ctrs.begin(), set_ctrs.end()) - 1e-12);
        CHECK(m.ctr_set <= *std::max_element(set_ctrs.begin(), set_ctrs.end()) + 1e-12);
        CHECK(m.ctr_user >= *std::min_element(user_ctrs.begin(), user_ctrs.end()) - 1e-12);
        CHECK(m.ctr_user <= *std::max_element(user_ctrs.begin(), user_ctrs.end()) + 1e-12);
    }
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 5, 9}, neg{-1, -2, -3, -4}, flat{1, 1, 1, 1};
    CHECK(pearson(x, x) == doctest::Approx(1.0));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0));
    // means 2.5 and 5: sxy = 11, sxx = 5, syy = 26
    CHECK(pearson(x, y) == doctest::Approx(11 / std::sqrt(130.0)).epsilon(1e-12));
    CHECK_THROWS_AS(pearson(x, flat), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}), Error);
}

TEST_CASE("reiteration report") {
    SUBCASE("single showings") {
        std::vector<RecEvent> log;
        add_set(log, "s1", "u", 3, 1);
        const auto rows = reiteration_report(log);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].oblivious == 0);
        CHECK(rows[0].shown == 3);
    }
    SUBCASE("clicked on both showings") {
        std::vector<RecEvent> log;
        add_set(log, "s1", "u", 1, 1, 0);
        add_set(log, "s2", "u", 1, 1, 10);
        const auto rows = reiteration_report(log);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].clicks == 1);
        CHECK(rows[1].oblivious == 1);
        CHECK(rows[1].first_click_ctr == 0.0);
    }
    SUBCASE("matches the naive replay") {
        std::mt19937_64 rng(30);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<RecEvent> log;
            for (int i = 0; i < 30; ++i) {
                const std::string set = "s" + std::to_string(rng() % 8);
                const std::string user = "u" + std::to_string(std::stoi(set.substr(1)) % 2);
                const DocId doc{static_cast<std::uint32_t>(1 + rng() % 4)};
                const Timestamp at = std::stoi(set.substr(1)) * 100;
                log.push_back({set, doc, user, RecEventKind::shown, at});
                if (rng() % 2) log.push_back({set, doc, user, RecEventKind::clicked, at + 1});
            }
            CHECK(reiteration_report(log) == oracle::reiterations(log));
        }
    }
}

TEST_CASE("offline evaluation fixtures") {
    Corpus corpus;
    const std::vector<std::string> target_terms{"zebrafish zebrafish"};
    const auto target = corpus.ingest_document("Target Study", target_terms);
    const auto older = corpus.ingest_document("Older Study");
    for (int i = 0; i < 5; ++i) corpus.ingest_document("filler " + std::string(1, char('a' + i)));

    // zebrafish node exists before the citation; the cited node comes last
    MindNode root = branch("r", "project", {leaf("z", "zebrafish"), linked("o", "older", "Older Study"),
                                            linked("t", "target", "Target Study")});
    std::vector<NodeEvent> events{
        event("m", "r", NodeEventKind::created, 1), event("m", "z", NodeEventKind::created, 2),
        event("m", "o", NodeEventKind::created, 3), event("m", "t", NodeEventKind::created, 4)};
    MindMapCollection c("u", {single_revision("m", root)}, events);

    const auto history = citation_history(c, corpus);
    REQUIRE(history.size() == 2);
    CHECK(history[0].doc == target);
    CHECK(history[1].doc == older);

    const auto pruned = prune_collection(c, history[0]);
    CHECK(pruned.latest_node({"m", "t"}) == nullptr);
    CHECK(pruned.latest_node({"m", "z"}) != nullptr);
    CHECK(pruned.events().size() == 3);

    AlgorithmConfig cfg = preset("all_maps_all_terms");
    const auto hit = offline_evaluate_user(c, corpus, cfg);
    CHECK(hit.target == target);
    CHECK(hit.target_rank == 1u);
    CHECK(hit.p_at_3 == 1);
    CHECK(hit.p_at_10 == 1);
    CHECK(hit.mrr_term == 1.0);
    CHECK(hit.ndcg == 1.0);
    CHECK(hit.algorithm == "all_maps_all_terms");
    CHECK(offline_evaluate_user(c, corpus, cfg) == hit);

    MindNode disjoint = branch("r", "unrelated", {linked("t", "words", "Target Study")});
    MindMapCollection miss("u", {single_revision("m", disjoint)},
                           std::vector<NodeEvent>{event("m", "r", NodeEventKind::created, 1),
                                                  event("m", "t", NodeEventKind::created, 2)});
    const auto zero = offline_evaluate_user(miss, corpus, cfg);
    CHECK_FALSE(zero.target_rank.has_value());
    CHECK(zero.p_at_3 == 0);
    CHECK(zero.p_at_10 == 0);
    CHECK(zero.mrr_term == 0.0);
    CHECK(zero.ndcg == 0.0);

    MindMapCollection none("u", {single_revision("m", leaf("r", "no links"))});
    try {
        offline_evaluate_user(none, corpus, cfg);
        FAIL("expected NoCitations");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_citations);
    }
}

TEST_CASE("offline result indicators are consistent") {
    Corpus corpus;
    std::mt19937_64 rng(2);
    std::vector<MindMapCollection> users;
    for (int u = 0; u < 12; ++u) {
        MindNode root = leaf("r", "w" + std::to_string(rng() % 120));
        std::vector<NodeEvent> events{event("m", "r", NodeEventKind::created, 0)};
        for (int n = 0; n < 10; ++n) {
            const std::string title = "Paper " + std::to_string(rng() % 40);
            const std::vector<std::string> body{"w" + std::to_string(rng() % 120), "w" + std::to_string(rng() % 120)};
            corpus.ingest_document(title, body);
            MindNode node = leaf("n" + std::to_string(n), body[0] + " " + body[1]);
            if (n % 3 == 0) node.link = title;
            root.children.push_back(node);
            events.push_back(event("m", node.id, NodeEventKind::created, 1 + n));
        }
        users.emplace_back("u" + std::to_string(u), std::vector<MapHistory>{single_revision("m", root)}, events);
    }
    for (const auto& name : {"all_maps_all_terms", "current_map_all_terms", "docear_combined"}) {
        for (const auto& user : users) {
            const auto r = offline_evaluate_user(user, corpus, preset(name));
            CHECK(r.p_at_3 <= r.p_at_10);
            CHECK(r.mrr_term >= 0.0);
            CHECK(r.mrr_term <= 1.0);
            CHECK((r.mrr_term > 0) == r.target_rank.has_value());
            if (r.mrr_term > 0.1) CHECK(r.p_at_10 == 1);
            CHECK(r.ndcg >= 0.0);
            CHECK(r.ndcg <= 1.0);
            CHECK(r.pool_size <= kOfflinePoolSize);
        }
    }
}

TEST_CASE("offline_evaluate_all ordering") {
    Corpus corpus;
    corpus.ingest_document("Cited Work", std::vector<std::string>{"topic"});
    std::vector<MindMapCollection> users;
    for (int u = 0; u < 4; ++u) {
        MindNode root = branch("r", "topic", {linked("c", "cite", "Cited Work")});
        if (u == 2) root = leaf("r", "no citation");
        std::vector<NodeEvent> events{event("m", "r", NodeEventKind::created, 1)};
        if (u != 2) events.push_back(event("m", "c", NodeEventKind::created, 2));
        users.emplace_back("u" + std::to_string(u), std::vector<MapHistory>{single_revision("m", root)}, events);
    }
    std::vector<const MindMapCollection*> ptrs;
    for (const auto& u : users) ptrs.push_back(&u);
    const std::vector<AlgorithmConfig> configs{preset("all_maps_all_terms"), preset("current_map_all_terms")};
    const auto serial = offline_evaluate_all(ptrs, corpus, configs, 1);
    REQUIRE(serial.size() == 6);
    CHECK(serial[0].user_id == "u0");
    CHECK(serial[1].algorithm == "current_map_all_terms");
    CHECK(serial[4].user_id == "u3");
    CHECK(offline_evaluate_all(ptrs, corpus, configs, 8) == serial);

    const auto summary = summarize_offline(serial);
    CHECK(summary.at("all_maps_all_terms").users == 3);
}
