#include "kgmdd/context.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace kgmdd {

namespace {

template <class T>
void insert_sorted(std::vector<T>& v, T x) {
    auto pos = std::lower_bound(v.begin(), v.end(), x);
    if (pos == v.end() || *pos != x) v.insert(pos, x);
}

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

const ContextSet kEmptySet{};

}  // namespace

ContextMap ContextMap::from_graph(const Graph& graph, const ContextConfig& config) {
    ContextMap map(graph);
    std::unordered_set<std::string_view> kinds(config.context_kinds.begin(), config.context_kinds.end());
    for (const Relation& r : graph.relations()) {
        if (r.source != r.target) {
            bool same_ns = graph.entity(r.source).ns == graph.entity(r.target).ns;
            bool counts = kinds.empty() ? !same_ns : kinds.contains(r.kind);
            counts = counts || (config.intra_namespace_relations && same_ns);
            if (counts) {
                map.nodes_[r.source].entities.push_back(r.target);
                map.nodes_[r.target].entities.push_back(r.source);
            }
        }
        if (config.provenance_edge_contexts && r.provenance.source_document) {
            map.edges_[r.id].entities.push_back(*r.provenance.source_document);
            map.nodes_[*r.provenance.source_document].relations.push_back(r.id);
        }
    }
    for (auto& [_, set] : map.nodes_) {
        sort_unique(set.entities);
        sort_unique(set.relations);
    }
    for (auto& [_, set] : map.edges_) sort_unique(set.entities);
    return map;
}

void ContextMap::check(EntityId e) const {
    if (!graph_->has_entity(e)) {
        throw Error(ErrorCode::UnknownElement, "unknown entity id " + std::to_string(e.value), "entity");
    }
}

void ContextMap::check(RelationId r) const {
    if (!graph_->has_relation(r)) {
        throw Error(ErrorCode::UnknownElement, "unknown relation id " + std::to_string(r.value), "relation");
    }
}

void ContextMap::annotate(EntityId node, EntityId context) {
    check(node);
    check(context);
    insert_sorted(nodes_[node].entities, context);
}

void ContextMap::annotate(EntityId node, RelationId context) {
    check(node);
    check(context);
    insert_sorted(nodes_[node].relations, context);
}

void ContextMap::annotate(RelationId relation, EntityId context) {
    check(relation);
    check(context);
    insert_sorted(edges_[relation].entities, context);
}

const ContextSet& ContextMap::con(EntityId node) const {
    check(node);
    auto it = nodes_.find(node);
    return it == nodes_.end() ? kEmptySet : it->second;
}

const ContextSet& ContextMap::con(RelationId relation) const {
    check(relation);
    auto it = edges_.find(relation);
    return it == edges_.end() ? kEmptySet : it->second;
}

const std::vector<RelationId>& ContextMap::con_restricted_to_relations(EntityId node) const {
    return con(node).relations;
}

std::string_view to_string(ExtensionMode mode) {
    return mode == ExtensionMode::VertexContextsOnly ? "VertexContextsOnly" : "WithEdgeContexts";
}

ExtensionMode extension_mode_from_string(std::string_view s) {
    if (s == "VertexContextsOnly") return ExtensionMode::VertexContextsOnly;
    if (s == "WithEdgeContexts") return ExtensionMode::WithEdgeContexts;
    throw Error(ErrorCode::InvalidArgument, "unknown extension mode '" + std::string(s) + "'", "mode");
}

Subgraph extended_induced_subgraph(const ContextMap& contexts, std::span<const EntityId> vertices,
                                   ExtensionMode mode) {
    const Graph& graph = contexts.graph();
    Subgraph sub = graph.induced_subgraph(vertices);
    std::vector<EntityId> seeds = sub.entities;
    for (EntityId e : seeds) {
        for (RelationId r : graph.out_relations(e)) {
            sub.relations.push_back(r);
            sub.entities.push_back(graph.relation(r).target);
        }
        for (RelationId r : graph.in_relations(e)) {
            sub.relations.push_back(r);
            sub.entities.push_back(graph.relation(r).source);
        }
        if (mode == ExtensionMode::WithEdgeContexts) {
            for (RelationId r : contexts.con_restricted_to_relations(e)) {
                const Relation& rel = graph.relation(r);
                sub.relations.push_back(r);
                sub.entities.push_back(rel.source);
                sub.entities.push_back(rel.target);
            }
        }
    }
    sort_unique(sub.entities);
    sort_unique(sub.relations);
    return sub;
}

Hypergraph context_hypergraph(const ContextMap& contexts, const Subgraph& sub) {
    const Graph& graph = contexts.graph();
    for (EntityId e : sub.entities) {
        if (!graph.has_entity(e)) {
            throw Error(ErrorCode::UnknownEntity, "subgraph entity not in graph", "entities");
        }
    }
    for (RelationId r : sub.relations) {
        const Relation& rel = graph.relation(r);
        if (!sub.contains(rel.source) || !sub.contains(rel.target)) {
            throw Error(ErrorCode::InvalidArgument, "subgraph relation endpoint outside its vertex set", "relations");
        }
    }

    Hypergraph h;
    h.vertices = sub.entities;
    sort_unique(h.vertices);
    std::vector<EntityId> base = h.vertices;
    for (EntityId e : base) {
        const auto& ctx = contexts.con(e).entities;
        h.vertices.insert(h.vertices.end(), ctx.begin(), ctx.end());
    }
    sort_unique(h.vertices);

    std::set<std::vector<EntityId>> family;
    for (EntityId v : h.vertices) {
        std::vector<EntityId> edge{v};
        for (EntityId c : contexts.con(v).entities) {
            if (std::binary_search(h.vertices.begin(), h.vertices.end(), c)) edge.push_back(c);
        }
        sort_unique(edge);
        family.insert(std::move(edge));
    }

    std::map<EntityId, std::vector<EntityId>> sharers;
    for (EntityId e : base) {
        for (EntityId c : contexts.con(e).entities) sharers[c].push_back(e);
    }
    for (auto& [c, members] : sharers) {
        if (members.size() < 2) continue;
        members.push_back(c);
        sort_unique(members);
        family.insert(members);
    }
    h.hyperedges.assign(family.begin(), family.end());
    return h;
}

nlohmann::json hypergraph_to_json(const Graph& graph, const Hypergraph& h) {
    nlohmann::json vertices = nlohmann::json::array();
    for (EntityId v : h.vertices) {
        vertices.push_back({{"id", v.value}, {"label", graph.entity(v).preferred_label}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& edge : h.hyperedges) {
        nlohmann::json members = nlohmann::json::array();
        for (EntityId v : edge) members.push_back(v.value);
        edges.push_back(std::move(members));
    }
    return {{"vertices", std::move(vertices)}, {"hyperedges", std::move(edges)}};
}

std::string hypergraph_to_dot(const Graph& graph, const Hypergraph& h) {
    auto quote = [](std::string_view s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out + "\"";
    };
    std::string out = "graph hypergraph {\n";
    for (EntityId v : h.vertices) {
        out += "  e" + std::to_string(v.value) + " [label=" + quote(graph.entity(v).preferred_label) + "];\n";
    }
    for (std::size_t i = 0; i < h.hyperedges.size(); ++i) {
        out += "  h" + std::to_string(i) + " [shape=diamond, label=\"\", width=0.15, height=0.15];\n";
        for (EntityId v : h.hyperedges[i]) {
            out += "  h" + std::to_string(i) + " -- e" + std::to_string(v.value) + ";\n";
        }
    }
    out += "}\n";
    return out;
}

namespace {

std::vector<EntityId> images_in(const ContextMap& contexts, EntityId e, NamespaceId ns) {
    std::vector<EntityId> out;
    for (EntityId c : contexts.con(e).entities) {
        if (contexts.graph().entity(c).ns == ns) out.push_back(c);
    }
    return out;
}

}  // namespace

std::vector<RelationDraft> infer_cross_context_relations(const ContextMap& contexts, NamespaceId source_ns,
                                                         NamespaceId target_ns, InferenceMode mode) {
    const Graph& graph = contexts.graph();
    const Namespace& src = graph.namespace_(source_ns);
    const Namespace& dst = graph.namespace_(target_ns);

    // Connected pairs in `from` map onto unconnected pairs in `to`.
    const Namespace& from = mode == InferenceMode::TargetImages ? src : dst;
    const Namespace& to = mode == InferenceMode::TargetImages ? dst : src;

    std::unordered_map<EntityId, std::vector<EntityId>> preimages;
    if (mode == InferenceMode::SourcePairs) {
        for (EntityId e : to.members) {
            for (EntityId x : images_in(contexts, e, from.id)) preimages[x].push_back(e);
        }
    }
    auto mapped = [&](EntityId e) {
        if (mode == InferenceMode::TargetImages) return images_in(contexts, e, to.id);
        auto it = preimages.find(e);
        return it == preimages.end() ? std::vector<EntityId>{} : it->second;
    };

    std::set<std::pair<EntityId, EntityId>> pairs;
    for (RelationId r : graph.namespace_subgraph(from.id).relations) {
        const Relation& rel = graph.relation(r);
        if (rel.source == rel.target) continue;
        auto left = mapped(rel.source);
        auto right = mapped(rel.target);
        for (EntityId x : left) {
            for (EntityId y : right) {
                if (x == y || graph.connected(x, y)) continue;
                pairs.emplace(std::min(x, y), std::max(x, y));
            }
        }
    }

    std::vector<RelationDraft> drafts;
    drafts.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        Provenance prov;
        prov.origin = Origin::DerivedCrossContext;
        prov.derived_from = from.id;
        prov.note = "connected in " + from.name;
        drafts.push_back(RelationDraft{a, b, std::string(kinds::kContextInferred), std::move(prov)});
    }
    return drafts;
}

std::vector<RelationId> apply_drafts(Graph& graph, std::span<const RelationDraft> drafts) {
    std::vector<RelationId> ids;
    ids.reserve(drafts.size());
    for (const auto& d : drafts) ids.push_back(graph.ensure_relation(d.source, d.target, d.kind, d.provenance));
    return ids;
}

}  // namespace kgmdd
