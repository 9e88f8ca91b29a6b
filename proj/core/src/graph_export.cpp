#include "kgmdd/graph_export.hpp"

#include <algorithm>
#include <map>

namespace kgmdd {

std::string iri_escape(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                          (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' || c == '~';
        if (unreserved) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string entity_iri(const Graph& graph, EntityId e) {
    const Entity& ent = graph.entity(e);
    return "<urn:kgmdd:" + iri_escape(graph.namespace_(ent.ns).name) + "/" +
           iri_escape(ent.preferred_label) + ">";
}

std::string relation_kind_iri(std::string_view kind) {
    return "<urn:kgmdd:rel/" + iri_escape(kind) + ">";
}

std::string export_ntriples(const Graph& graph, const Subgraph& sub) {
    std::vector<std::string> lines;
    lines.reserve(sub.relations.size());
    for (RelationId r : sub.relations) {
        const Relation& rel = graph.relation(r);
        lines.push_back(entity_iri(graph, rel.source) + " " + relation_kind_iri(rel.kind) + " " +
                        entity_iri(graph, rel.target) + " .\n");
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l;
    return out;
}

std::string export_ntriples(const Graph& graph) {
    return export_ntriples(graph, graph.whole());
}

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string export_graph_dot(const Graph& graph, const Subgraph& sub) {
    std::map<NamespaceId, std::vector<EntityId>> by_ns;
    for (EntityId e : sub.entities) by_ns[graph.entity(e).ns].push_back(e);

    std::string out = "digraph kg {\n  node [shape=box];\n";
    for (const auto& [ns, members] : by_ns) {
        out += "  subgraph cluster_" + std::to_string(ns.value) + " {\n    label=" +
               dot_quote(graph.namespace_(ns).name) + ";\n";
        for (EntityId e : members) {
            out += "    e" + std::to_string(e.value) + " [label=" +
                   dot_quote(graph.entity(e).preferred_label) + "];\n";
        }
        out += "  }\n";
    }
    for (RelationId r : sub.relations) {
        const Relation& rel = graph.relation(r);
        out += "  e" + std::to_string(rel.source.value) + " -> e" + std::to_string(rel.target.value) +
               " [label=" + dot_quote(rel.kind) + (is_symmetric_kind(rel.kind) ? ", dir=none" : "") + "];\n";
    }
    out += "}\n";
    return out;
}

std::string export_graph_dot(const Graph& graph) {
    return export_graph_dot(graph, graph.whole());
}

}  // namespace kgmdd
