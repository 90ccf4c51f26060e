#include <functional>
#include <random>

#include "doctest.h"
#include "mmrec/error.hpp"
#include "mmrec/mindmap.hpp"
#include "support.hpp"

using namespace mmrec;
using namespace testing;

namespace {

Errc error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mmrec::Error");
    return Errc::io_error;
}

MindNode random_tree(std::mt19937_64& rng, std::size_t size) {
    MindNode root = leaf("n0", "root");
    std::vector<std::vector<std::size_t>> paths{{}};
    for (std::size_t i = 1; i < size; ++i) {
        const auto parent_path = paths[rng() % paths.size()];
        MindNode* parent = &root;
        for (auto step : parent_path) parent = &parent->children[step];
        MindNode child = leaf("n" + std::to_string(i), "node " + std::to_string(rng() % 100));
        child.folded = rng() % 7 == 0;
        if (rng() % 5 == 0) child.link = "Paper \"" + std::to_string(i) + "\" & <co>";
        child.created_at = static_cast<Timestamp>(rng() % 1000);
        parent->children.push_back(child);
        auto path = parent_path;
        path.push_back(parent->children.size() - 1);
        paths.push_back(path);
    }
    return root;
}

}  // namespace

TEST_CASE("minimal document") {
    auto map = parse_mindmap(R"(<map><node TEXT="X"/></map>)");
    REQUIRE(map.size() == 1);
    CHECK(map.root().text == "X");
    CHECK(map.root().depth == 0);
    CHECK_FALSE(map.root().folded);
    CHECK(map.root().created_at == 0);
}

TEST_CASE("parse errors") {
    CHECK(error_code([] { parse_mindmap("<map></map>"); }) == Errc::no_root);
    CHECK(error_code([] { parse_mindmap(R"(<map><node TEXT="a"/><node TEXT="b"/></map>)"); }) == Errc::no_root);
    CHECK(error_code([] { parse_mindmap("<map><node TEXT="); }) == Errc::malformed_input);
    CHECK(error_code([] { parse_mindmap(R"(<map><node ID="a"><node ID="a"/></node></map>)"); }) ==
          Errc::malformed_input);
}

TEST_CASE("folded middle node keeps its subtree") {
    auto map = parse_mindmap(R"(<map>
      <node ID="r" TEXT="root">
        <node ID="m" TEXT="middle" FOLDED="true">
          <node ID="l" TEXT="leaf" LINK="Some Paper" CREATED="17" MODIFIED="19"/>
        </node>
      </node>
    </map>)");
    MindNode expected = branch("r", "root", {branch("m", "middle", {linked("l", "leaf", "Some Paper")})});
    expected.children[0].folded = true;
    expected.children[0].children[0].created_at = 17;
    expected.children[0].children[0].modified_at = 19;
    CHECK(map.tree() == expected);
    CHECK(is_visible(map, "m"));
    CHECK_FALSE(is_visible(map, "l"));
}

TEST_CASE("unknown attributes and elements are ignored") {
    auto map = parse_mindmap(R"(<map version="1.0"><node TEXT="a" COLOR="#fff"><icon BUILTIN="x"/>
      <node TEXT="b"><richcontent/></node></node></map>)");
    CHECK(map.size() == 2);
    CHECK(map.at(1).text == "b");
}

TEST_CASE("synthetic ids follow the child-index path") {
    auto a = parse_mindmap(R"(<map><node TEXT="a"><node TEXT="b"/><node TEXT="c"/></node></map>)");
    auto b = parse_mindmap(R"(<map><node TEXT="a2"><node TEXT="b2"/><node TEXT="c2"/></node></map>)");
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.at(i).id == b.at(i).id);
    const std::size_t path[] = {1};
    CHECK(a.at(2).id == synthetic_node_id(path));
    CHECK(a.at(1).id != a.at(2).id);
}

TEST_CASE("depths of the search engine example") {
    auto map = MindMap::from_tree("m", search_engine_tree());
    CHECK(node_depth(map, "root") == 0);
    CHECK(node_depth(map, "scopus") == 2);
    CHECK(node_depth(map, "ase") == 1);
    CHECK_THROWS_AS(node_depth(map, "missing"), Error);
}

TEST_CASE("node stats") {
    auto single = MindMap::from_tree("m", leaf("r", "Only node here"));
    CHECK(node_stats(single, "r") == NodeStats{0, 0, 3});

    // B has two children, each with two children
    auto map = MindMap::from_tree("m", branch("a", "A", {
        branch("b", "B", {branch("c1", "C1", {leaf("d1", "D1"), leaf("d2", "D2")}),
                          branch("c2", "C2", {leaf("d3", "D3"), leaf("d4", "D4")})}),
        leaf("x", "X"), leaf("y", "Y"), leaf("z", "Z"),
    }));
    CHECK(node_stats(map, "b").children_count == 2);
    CHECK(node_stats(map, "b").sibling_count == 3);
    CHECK(node_stats(map, "a").sibling_count == 0);
}

TEST_CASE("visibility scan over a four level tree") {
    MindNode root = branch("r", "r", {branch("a", "a", {branch("b", "b", {leaf("c", "c")})})});
    root.children[0].folded = true;
    auto map = MindMap::from_tree("m", root);
    CHECK(is_visible(map, "r"));
    CHECK(is_visible(map, "a"));
    CHECK_FALSE(is_visible(map, "b"));
    CHECK_FALSE(is_visible(map, "c"));
}

TEST_CASE("structural properties of random trees") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto root = random_tree(rng, 1 + rng() % 60);
        const auto map = MindMap::from_tree("m", root);

        std::size_t edges = 0;
        for (std::size_t i = 0; i < map.size(); ++i) {
            const auto& n = map.at(i);
            edges += n.children.size();
            if (i == 0) {
                CHECK_FALSE(n.parent.has_value());
                continue;
            }
            REQUIRE(n.parent.has_value());
            const auto& parent = map.at(*n.parent);
            CHECK(n.depth == parent.depth + 1);
            CHECK(std::count(parent.children.begin(), parent.children.end(), i) == 1);
            if (!is_visible(map, parent.id)) CHECK_FALSE(is_visible(map, n.id));
        }
        CHECK(edges == map.size() - 1);

        const auto reparsed = parse_mindmap(serialize_mindmap(map));
        CHECK(reparsed.tree() == root);
    }
}

TEST_CASE("derive_events") {
    const MindNode base = branch("r", "root", {leaf("a", "A"), leaf("b", "B")});

    SUBCASE("identical revisions") {
        std::vector<MindMap> revs{MindMap::from_tree("m", base, 1, 100), MindMap::from_tree("m", base, 2, 200)};
        auto events = derive_events(revs);
        CHECK(events.size() == 3);
        for (const auto& e : events) CHECK(e.kind == NodeEventKind::created);
    }
    SUBCASE("insertion") {
        MindNode next = base;
        next.children.push_back(leaf("c", "C"));
        std::vector<MindMap> revs{MindMap::from_tree("m", base, 1, 100), MindMap::from_tree("m", next, 2, 200)};
        auto events = derive_events(revs);
        REQUIRE(events.size() == 4);
        CHECK(events.back() == event("m", "c", NodeEventKind::created, 200));
    }
    SUBCASE("sibling swap moves both") {
        MindNode next = base;
        std::swap(next.children[0], next.children[1]);
        std::vector<MindMap> revs{MindMap::from_tree("m", base, 1, 100), MindMap::from_tree("m", next, 2, 200)};
        auto events = derive_events(revs);
        std::vector<NodeEvent> moved;
        for (const auto& e : events)
            if (e.kind == NodeEventKind::moved) moved.push_back(e);
        REQUIRE(moved.size() == 2);
        CHECK(moved[0] == event("m", "a", NodeEventKind::moved, 200));
        CHECK(moved[1] == event("m", "b", NodeEventKind::moved, 200));
    }
    SUBCASE("edit and move together") {
        MindNode next = branch("r", "root", {branch("b", "B", {leaf("a", "A changed")})});
        std::vector<MindMap> revs{MindMap::from_tree("m", base, 1, 100), MindMap::from_tree("m", next, 2, 200)};
        auto events = derive_events(revs);
        CHECK(std::count(events.begin(), events.end(), event("m", "a", NodeEventKind::edited, 200)) == 1);
        CHECK(std::count(events.begin(), events.end(), event("m", "a", NodeEventKind::moved, 200)) == 1);
        CHECK(std::is_sorted(events.begin(), events.end(), event_order));
    }
    SUBCASE("revision numbers must increase") {
        std::vector<MindMap> revs{MindMap::from_tree("m", base, 2, 100), MindMap::from_tree("m", base, 2, 200)};
        CHECK(error_code([&] { derive_events(revs); }) == Errc::inconsistent_revisions);
    }
}

TEST_CASE("every node of a revision chain gets a created event") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<MindMap> revs;
        MindNode tree = leaf("n0", "root");
        for (int r = 1; r <= 4; ++r) {
            const auto grown = random_tree(rng, 2 + rng() % 20);
            tree.children.push_back(grown.children.empty() ? leaf("x" + std::to_string(r), "x") : grown.children[0]);
            // keep ids unique across revisions by prefixing
            std::function<void(MindNode&)> rename = [&](MindNode& n) {
                if (n.id.rfind("r", 0) != 0) n.id = "r" + std::to_string(r) + n.id;
                for (auto& c : n.children) rename(c);
            };
            rename(tree.children.back());
            revs.push_back(MindMap::from_tree("m", tree, r, r * 1000));
        }
        const auto events = derive_events(revs);
        for (const auto& n : revs.back().nodes()) {
            const auto created = std::count_if(events.begin(), events.end(), [&](const NodeEvent& e) {
                return e.node_id == n.id && e.kind == NodeEventKind::created;
            });
            CHECK(created >= 1);
        }
    }
}

TEST_CASE("collection validates sidecar events") {
    std::vector<MapHistory> maps{single_revision("m", search_engine_tree())};
    CHECK(error_code([&] {
              MindMapCollection("u", maps, std::vector<NodeEvent>{event("m", "nope", NodeEventKind::created, 1)});
          }) == Errc::invariant_violation);
    CHECK(error_code([&] {
              MindMapCollection("u", maps, std::vector<NodeEvent>{event("m", "scopus", NodeEventKind::moved, 1),
                                                                  event("m", "scopus", NodeEventKind::created, 2)});
          }) == Errc::invariant_violation);

    MindMapCollection ok("u", maps, std::vector<NodeEvent>{event("m", "scopus", NodeEventKind::created, 5)});
    CHECK(ok.events().size() == 1);
    CHECK(ok.latest_node({"m", "scopus"})->text == "Scopus");
    CHECK(ok.latest_node({"m", "zzz"}) == nullptr);
}
