#include "mmrec/mindmap.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "mmrec/error.hpp"
#include "mmrec/text.hpp"

namespace mmrec {

namespace {

void flatten(const MindNode& node, std::optional<std::size_t> parent, std::size_t depth,
             std::size_t position, bool visible, std::vector<MindMap::Node>& out) {
    const std::size_t index = out.size();
    out.push_back(MindMap::Node{node.id, node.text, node.link, node.folded, node.created_at,
                                node.modified_at, parent, {}, depth, position, visible});
    const bool children_visible = visible && !node.folded;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        out[index].children.push_back(out.size());
        flatten(node.children[i], index, depth + 1, i, children_visible, out);
    }
}

MindNode rebuild(const std::vector<MindMap::Node>& nodes, std::size_t index) {
    const auto& n = nodes[index];
    MindNode out{n.id, n.text, n.link, n.folded, {}, n.created_at, n.modified_at};
    out.children.reserve(n.children.size());
    for (auto child : n.children) out.children.push_back(rebuild(nodes, child));
    return out;
}

}  // namespace

MindMap MindMap::from_tree(std::string map_id, const MindNode& root, std::int64_t revision,
                           Timestamp saved_at) {
    MindMap map;
    map.map_id_ = std::move(map_id);
    map.revision_ = revision;
    map.saved_at_ = saved_at;
    flatten(root, std::nullopt, 0, 0, true, map.nodes_);
    map.by_id_.reserve(map.nodes_.size());
    for (std::size_t i = 0; i < map.nodes_.size(); ++i) {
        if (!map.by_id_.emplace(map.nodes_[i].id, i).second)
            throw Error(Errc::malformed_input, "duplicate node id '" + map.nodes_[i].id +
                                                   "' in map '" + map.map_id_ + "'");
    }
    return map;
}

std::optional<std::size_t> MindMap::find(std::string_view node_id) const {
    auto it = by_id_.find(std::string(node_id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

const MindMap::Node& MindMap::node(std::string_view node_id) const {
    auto index = find(node_id);
    if (!index)
        throw Error(Errc::unknown_node,
                    "unknown node '" + std::string(node_id) + "' in map '" + map_id_ + "'");
    return nodes_[*index];
}

MindNode MindMap::tree() const { return rebuild(nodes_, 0); }

bool MindMap::operator==(const MindMap& other) const {
    return map_id_ == other.map_id_ && revision_ == other.revision_ &&
           saved_at_ == other.saved_at_ && tree() == other.tree();
}

std::size_t node_depth(const MindMap& map, std::string_view node_id) {
    return map.node(node_id).depth;
}

bool is_visible(const MindMap& map, std::string_view node_id) {
    return map.node(node_id).visible;
}

NodeStats node_stats(const MindMap& map, std::string_view node_id) {
    const auto& node = map.node(node_id);
    NodeStats stats;
    stats.children_count = node.children.size();
    stats.sibling_count = node.parent ? map.at(*node.parent).children.size() - 1 : 0;
    stats.term_count = tokenize(node.text).size();
    return stats;
}

// ---------------------------------------------------------------------------

std::string_view to_string(NodeEventKind kind) {
    switch (kind) {
        case NodeEventKind::created: return "created";
        case NodeEventKind::edited: return "edited";
        case NodeEventKind::moved: return "moved";
    }
    return "created";
}

NodeEventKind parse_node_event_kind(std::string_view text) {
    if (text == "created") return NodeEventKind::created;
    if (text == "edited") return NodeEventKind::edited;
    if (text == "moved") return NodeEventKind::moved;
    throw Error(Errc::malformed_input, "unknown node event kind '" + std::string(text) + "'");
}

bool event_order(const NodeEvent& a, const NodeEvent& b) {
    return std::tie(a.at, a.map_id, a.node_id, a.kind) <
           std::tie(b.at, b.map_id, b.node_id, b.kind);
}

std::vector<NodeEvent> derive_events(std::span<const MindMap> revisions) {
    std::vector<NodeEvent> events;
    if (revisions.empty()) return events;

    const auto& map_id = revisions.front().map_id();
    for (std::size_t i = 1; i < revisions.size(); ++i) {
        if (revisions[i].map_id() != map_id)
            throw Error(Errc::inconsistent_revisions,
                        "revisions of '" + map_id + "' mix in map '" + revisions[i].map_id() + "'");
        if (revisions[i].revision() <= revisions[i - 1].revision())
            throw Error(Errc::inconsistent_revisions,
                        "revision numbers of '" + map_id + "' are not strictly increasing");
    }

    const auto& first = revisions.front();
    for (const auto& node : first.nodes()) {
        const Timestamp at = node.created_at != 0 ? node.created_at : first.saved_at();
        events.push_back({map_id, node.id, NodeEventKind::created, at});
    }

    auto parent_id = [](const MindMap& map, const MindMap::Node& node) -> std::string_view {
        return node.parent ? std::string_view(map.at(*node.parent).id) : std::string_view();
    };

    for (std::size_t i = 1; i < revisions.size(); ++i) {
        const auto& before = revisions[i - 1];
        const auto& after = revisions[i];
        const Timestamp at = after.saved_at();
        for (const auto& node : after.nodes()) {
            auto old_index = before.find(node.id);
            if (!old_index) {
                events.push_back({map_id, node.id, NodeEventKind::created, at});
                continue;
            }
            const auto& old = before.at(*old_index);
            if (old.text != node.text)
                events.push_back({map_id, node.id, NodeEventKind::edited, at});
            if (parent_id(before, old) != parent_id(after, node) || old.position != node.position)
                events.push_back({map_id, node.id, NodeEventKind::moved, at});
        }
    }

    std::sort(events.begin(), events.end(), event_order);
    return events;
}

// ---------------------------------------------------------------------------

MindMapCollection::MindMapCollection(std::string user_id, std::vector<MapHistory> maps,
                                     std::optional<std::vector<NodeEvent>> events)
    : user_id_(std::move(user_id)), maps_(std::move(maps)) {
    for (const auto& history : maps_) {
        if (history.revisions.empty())
            throw Error(Errc::inconsistent_revisions, "map history without revisions");
    }
    std::sort(maps_.begin(), maps_.end(),
              [](const MapHistory& a, const MapHistory& b) { return a.map_id() < b.map_id(); });
    for (std::size_t i = 1; i < maps_.size(); ++i) {
        if (maps_[i].map_id() == maps_[i - 1].map_id())
            throw Error(Errc::malformed_input, "duplicate map id '" + maps_[i].map_id() + "'");
    }

    if (events) {
        events_ = std::move(*events);
        std::sort(events_.begin(), events_.end(), event_order);
    }
    for (const auto& history : maps_) {
        // derive_events also checks the revision chain, so run it either way.
        auto derived = derive_events(history.revisions);
        if (!events) events_.insert(events_.end(), derived.begin(), derived.end());
    }
    if (!events) std::sort(events_.begin(), events_.end(), event_order);

    std::set<NodeRef> seen;
    for (const auto& event : events_) {
        const auto* history = find_map(event.map_id);
        const bool known = history && std::any_of(history->revisions.begin(),
                                                   history->revisions.end(),
                                                   [&](const MindMap& m) {
                                                       return m.find(event.node_id).has_value();
                                                   });
        if (!known)
            throw Error(Errc::invariant_violation, "event references unknown node '" +
                                                       event.map_id + "/" + event.node_id + "'");
        NodeRef ref{event.map_id, event.node_id};
        if (seen.insert(ref).second && event.kind != NodeEventKind::created)
            throw Error(Errc::invariant_violation, "first event of node '" + event.map_id + "/" +
                                                       event.node_id + "' is not 'created'");
    }
}

const MapHistory* MindMapCollection::find_map(std::string_view map_id) const {
    auto it = std::lower_bound(maps_.begin(), maps_.end(), map_id,
                               [](const MapHistory& h, std::string_view id) {
                                   return h.map_id() < id;
                               });
    if (it == maps_.end() || it->map_id() != map_id) return nullptr;
    return &*it;
}

const MindMap* MindMapCollection::latest_map(std::string_view map_id) const {
    const auto* history = find_map(map_id);
    return history ? &history->latest() : nullptr;
}

const MindMap::Node* MindMapCollection::latest_node(const NodeRef& ref) const {
    const auto* map = latest_map(ref.map_id);
    if (!map) return nullptr;
    auto index = map->find(ref.node_id);
    return index ? &map->at(*index) : nullptr;
}

}  // namespace mmrec
