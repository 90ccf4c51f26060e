#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mmrec {

/// Milliseconds since the Unix epoch, UTC. Zero means "unknown, oldest".
using Timestamp = std::int64_t;

inline constexpr Timestamp kMillisPerDay = 86'400'000;

/// A node as it appears in a mind-map file: the recursive, editable form.
struct MindNode {
    std::string id;
    std::string text;
    std::optional<std::string> link;
    bool folded = false;
    std::vector<MindNode> children;
    Timestamp created_at = 0;
    Timestamp modified_at = 0;

    bool operator==(const MindNode&) const = default;
};

struct NodeStats {
    std::size_t children_count = 0;
    std::size_t sibling_count = 0;
    std::size_t term_count = 0;

    bool operator==(const NodeStats&) const = default;
};

/// One revision of a mind map, flattened into pre-order so structural
/// queries are index lookups. Immutable once built.
class MindMap {
public:
    struct Node {
        std::string id;
        std::string text;
        std::optional<std::string> link;
        bool folded = false;
        Timestamp created_at = 0;
        Timestamp modified_at = 0;
        std::optional<std::size_t> parent;
        std::vector<std::size_t> children;
        std::size_t depth = 0;
        std::size_t position = 0;  // index among the parent's children
        bool visible = true;
    };

    MindMap() = default;

    /// Throws Error(malformed_input) on duplicate node ids.
    static MindMap from_tree(std::string map_id, const MindNode& root,
                             std::int64_t revision = 0, Timestamp saved_at = 0);

    const std::string& map_id() const { return map_id_; }
    std::int64_t revision() const { return revision_; }
    Timestamp saved_at() const { return saved_at_; }

    std::span<const Node> nodes() const { return nodes_; }
    const Node& root() const { return nodes_.front(); }
    std::size_t size() const { return nodes_.size(); }

    std::optional<std::size_t> find(std::string_view node_id) const;
    /// Throws Error(unknown_node).
    const Node& node(std::string_view node_id) const;
    const Node& at(std::size_t index) const { return nodes_[index]; }

    /// Rebuilds the recursive form.
    MindNode tree() const;

    bool operator==(const MindMap& other) const;

private:
    std::string map_id_;
    std::int64_t revision_ = 0;
    Timestamp saved_at_ = 0;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Parses the Freemind-style dialect: a `map` element holding exactly one
/// top-level `node`. Nodes without an ID get one derived from their
/// child-index path. Optional `ID`, `REVISION` and `SAVED` attributes on
/// `map` fill the corresponding MindMap fields; `fallback_map_id` is used
/// when `ID` is absent.
MindMap parse_mindmap(std::string_view bytes, std::string fallback_map_id = {});

std::string serialize_mindmap(const MindMap& map);

/// Synthetic id for a node at the given child-index path from the root.
std::string synthetic_node_id(std::span<const std::size_t> path);

std::size_t node_depth(const MindMap& map, std::string_view node_id);
bool is_visible(const MindMap& map, std::string_view node_id);
NodeStats node_stats(const MindMap& map, std::string_view node_id);

// ---------------------------------------------------------------------------
// Events and collections

enum class NodeEventKind { created, edited, moved };

std::string_view to_string(NodeEventKind kind);
NodeEventKind parse_node_event_kind(std::string_view text);

struct NodeEvent {
    std::string map_id;
    std::string node_id;
    NodeEventKind kind = NodeEventKind::created;
    Timestamp at = 0;

    auto operator<=>(const NodeEvent&) const = default;
};

/// Canonical event order: timestamp, then map id, node id, kind.
bool event_order(const NodeEvent& a, const NodeEvent& b);

/// Reconstructs node events from consecutive revisions of one map. Nodes of
/// the first revision are `created` at their CREATED attribute, or at the
/// revision's save time when that is unknown.
std::vector<NodeEvent> derive_events(std::span<const MindMap> revisions);

struct NodeRef {
    std::string map_id;
    std::string node_id;

    auto operator<=>(const NodeRef&) const = default;
};

struct MapHistory {
    std::vector<MindMap> revisions;  // strictly increasing revision numbers

    const MindMap& latest() const { return revisions.back(); }
    const std::string& map_id() const { return revisions.front().map_id(); }
};

/// All mind maps of one user plus the node events observed on them.
class MindMapCollection {
public:
    MindMapCollection() = default;

    /// Validates histories and events. When `events` is absent they are
    /// derived from the revision chains; a sidecar log replaces derivation.
    MindMapCollection(std::string user_id, std::vector<MapHistory> maps,
                      std::optional<std::vector<NodeEvent>> events = std::nullopt);

    const std::string& user_id() const { return user_id_; }
    std::span<const MapHistory> maps() const { return maps_; }
    std::span<const NodeEvent> events() const { return events_; }
    bool empty() const { return maps_.empty(); }

    const MapHistory* find_map(std::string_view map_id) const;
    /// Latest-revision view of a node, or nullptr when deleted/unknown.
    const MindMap::Node* latest_node(const NodeRef& ref) const;
    const MindMap* latest_map(std::string_view map_id) const;

private:
    std::string user_id_;
    std::vector<MapHistory> maps_;
    std::vector<NodeEvent> events_;
};

}  // namespace mmrec
