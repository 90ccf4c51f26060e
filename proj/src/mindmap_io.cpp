#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <sstream>

#include "mmrec/error.hpp"
#include "mmrec/mindmap.hpp"

namespace mmrec {

namespace pt = boost::property_tree;

namespace {

constexpr const char* kAttr = "<xmlattr>";

std::int64_t parse_int_attr(const pt::ptree& attrs, const char* name, std::int64_t fallback) {
    auto value = attrs.get_optional<std::string>(name);
    if (!value || value->empty()) return fallback;
    std::int64_t out = 0;
    auto [end, ec] = std::from_chars(value->data(), value->data() + value->size(), out);
    if (ec != std::errc() || end != value->data() + value->size())
        throw Error(Errc::malformed_input,
                    std::string("attribute ") + name + " is not a decimal integer: '" + *value + "'");
    return out;
}

bool parse_bool_attr(const pt::ptree& attrs, const char* name) {
    auto value = attrs.get_optional<std::string>(name);
    if (!value) return false;
    if (*value == "true") return true;
    if (*value == "false" || value->empty()) return false;
    throw Error(Errc::malformed_input,
                std::string("attribute ") + name + " must be true/false, got '" + *value + "'");
}

MindNode read_node(const pt::ptree& element, std::vector<std::size_t>& path) {
    static const pt::ptree kNoAttrs;
    const auto attrs_opt = element.get_child_optional(kAttr);
    const pt::ptree& attrs = attrs_opt ? *attrs_opt : kNoAttrs;

    MindNode node;
    auto id = attrs.get_optional<std::string>("ID");
    node.id = (id && !id->empty()) ? *id : synthetic_node_id(path);
    node.text = attrs.get<std::string>("TEXT", "");
    if (auto link = attrs.get_optional<std::string>("LINK"); link && !link->empty())
        node.link = *link;
    node.folded = parse_bool_attr(attrs, "FOLDED");
    node.created_at = parse_int_attr(attrs, "CREATED", 0);
    node.modified_at = parse_int_attr(attrs, "MODIFIED", 0);

    std::size_t index = 0;
    for (const auto& [name, child] : element) {
        if (name != "node") continue;
        path.push_back(index++);
        node.children.push_back(read_node(child, path));
        path.pop_back();
    }
    return node;
}

void escape_into(std::string& out, std::string_view text) {
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
}

void write_node(std::string& out, const MindNode& node, int indent) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += "<node ID=\"";
    escape_into(out, node.id);
    out += "\" TEXT=\"";
    escape_into(out, node.text);
    out += '"';
    if (node.folded) out += " FOLDED=\"true\"";
    if (node.link) {
        out += " LINK=\"";
        escape_into(out, *node.link);
        out += '"';
    }
    if (node.created_at != 0) out += " CREATED=\"" + std::to_string(node.created_at) + '"';
    if (node.modified_at != 0) out += " MODIFIED=\"" + std::to_string(node.modified_at) + '"';
    if (node.children.empty()) {
        out += "/>\n";
        return;
    }
    out += ">\n";
    for (const auto& child : node.children) write_node(out, child, indent + 1);
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += "</node>\n";
}

}  // namespace

std::string synthetic_node_id(std::span<const std::size_t> path) {
    // FNV-1a over the dotted path, e.g. "" for the root, "0.2.1" deeper down.
    std::string key;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) key += '.';
        key += std::to_string(path[i]);
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id = "_";
    for (int shift = 60; shift >= 0; shift -= 4) id += kHex[(hash >> shift) & 0xF];
    return id;
}

MindMap parse_mindmap(std::string_view bytes, std::string fallback_map_id) {
    pt::ptree doc;
    try {
        std::istringstream in{std::string(bytes)};
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::malformed_input, std::string("unparseable mind map: ") + e.what());
    }

    const pt::ptree* map_element = nullptr;
    for (const auto& [name, child] : doc) {
        if (name == "map") {
            map_element = &child;
        } else if (name != "<xmlcomment>") {
            throw Error(Errc::malformed_input, "root element must be <map>, found <" + name + ">");
        }
    }
    if (!map_element) throw Error(Errc::malformed_input, "no <map> element");

    const pt::ptree* root = nullptr;
    std::size_t roots = 0;
    for (const auto& [name, child] : *map_element) {
        if (name == "node") {
            root = &child;
            ++roots;
        }
    }
    if (roots != 1)
        throw Error(Errc::no_root, "mind map must have exactly one top-level node, found " +
                                       std::to_string(roots));

    static const pt::ptree kNoAttrs;
    const auto attrs_opt = map_element->get_child_optional(kAttr);
    const pt::ptree& attrs = attrs_opt ? *attrs_opt : kNoAttrs;
    std::string map_id = attrs.get<std::string>("ID", "");
    if (map_id.empty()) map_id = std::move(fallback_map_id);

    std::vector<std::size_t> path;
    MindNode tree = read_node(*root, path);
    return MindMap::from_tree(std::move(map_id), tree, parse_int_attr(attrs, "REVISION", 0),
                              parse_int_attr(attrs, "SAVED", 0));
}

std::string serialize_mindmap(const MindMap& map) {
    std::string out = "<map";
    if (!map.map_id().empty()) {
        out += " ID=\"";
        escape_into(out, map.map_id());
        out += '"';
    }
    if (map.revision() != 0) out += " REVISION=\"" + std::to_string(map.revision()) + '"';
    if (map.saved_at() != 0) out += " SAVED=\"" + std::to_string(map.saved_at()) + '"';
    out += ">\n";
    write_node(out, map.tree(), 1);
    out += "</map>\n";
    return out;
}

}  // namespace mmrec
