#pragma once
// Context algebra over a knowledge graph: the con mapping, extended induced
// subgraphs, context hypergraphs and cross-context relation inference.
//
// Contexts are graph entities (C = E). A node may additionally carry
// relations as context (con restricted to R), which pulls both endpoints of
// that relation into its extended induced subgraph.

#include "kgmdd/graph.hpp"

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace kgmdd {

struct ContextSet {
    std::vector<EntityId> entities;    // sorted, unique
    std::vector<RelationId> relations; // sorted, unique

    [[nodiscard]] bool empty() const { return entities.empty() && relations.empty(); }
    friend bool operator==(const ContextSet&, const ContextSet&) = default;
};

struct ContextConfig {
    /// Relation kinds that make their endpoints context of each other.
    /// Empty means every relation between two different namespaces.
    std::vector<std::string> context_kinds;
    /// Relations inside one namespace count as context too.
    bool intra_namespace_relations = false;
    /// A relation with a source document is context of that document, and
    /// the document is context of the relation.
    bool provenance_edge_contexts = true;
};

/// con : E ∪ R → P(E ∪ R). Absent keys mean con(x) = ∅. Holds a pointer to
/// the graph it was built for; the graph must outlive the map.
class ContextMap {
public:
    explicit ContextMap(const Graph& graph) : graph_(&graph) {}

    static ContextMap from_graph(const Graph& graph, const ContextConfig& config = {});

    void annotate(EntityId node, EntityId context);
    void annotate(EntityId node, RelationId context);
    void annotate(RelationId relation, EntityId context);

    /// Throws UnknownElement for ids the graph does not know.
    [[nodiscard]] const ContextSet& con(EntityId node) const;
    [[nodiscard]] const ContextSet& con(RelationId relation) const;
    /// con|R(e): the relation part of con(e).
    [[nodiscard]] const std::vector<RelationId>& con_restricted_to_relations(EntityId node) const;

    [[nodiscard]] const Graph& graph() const { return *graph_; }

private:
    void check(EntityId e) const;
    void check(RelationId r) const;

    const Graph* graph_;
    std::unordered_map<EntityId, ContextSet> nodes_;
    std::unordered_map<RelationId, ContextSet> edges_;
};

enum class ExtensionMode { VertexContextsOnly, WithEdgeContexts };

std::string_view to_string(ExtensionMode mode);
ExtensionMode extension_mode_from_string(std::string_view s);

/// G^c[E_i] = G[E_i] ∪ {(e,e') : e ∈ E_i, e' ∈ N(e)}, and with edge contexts
/// additionally ∪ {r : r ∈ con|R(e), e ∈ E_i} with both endpoints of r.
Subgraph extended_induced_subgraph(const ContextMap& contexts, std::span<const EntityId> vertices,
                                   ExtensionMode mode);

struct Hypergraph {
    std::vector<EntityId> vertices;                 // sorted
    std::vector<std::vector<EntityId>> hyperedges;  // each sorted; family sorted, unique

    friend bool operator==(const Hypergraph&, const Hypergraph&) = default;
};

/// Vertices are E' plus the entity contexts of E'. One hyperedge per vertex
/// holding the vertex and its entity contexts inside X, and one per context
/// shared by at least two members of E'.
Hypergraph context_hypergraph(const ContextMap& contexts, const Subgraph& sub);

nlohmann::json hypergraph_to_json(const Graph& graph, const Hypergraph& h);
/// Star expansion: one diamond per hyperedge wired to its members.
std::string hypergraph_to_dot(const Graph& graph, const Hypergraph& h);

enum class InferenceMode {
    /// Connected pairs in the source namespace induce edges between their
    /// context images in the target namespace.
    TargetImages,
    /// Connected images in the target namespace induce edges between their
    /// unconnected preimages in the source namespace.
    SourcePairs,
};

struct RelationDraft {
    EntityId source;
    EntityId target;
    std::string kind;
    Provenance provenance;

    friend bool operator==(const RelationDraft&, const RelationDraft&) = default;
};

/// New contextInferred edges, source < target, sorted, no duplicates, none
/// parallel to an existing edge. Provenance is DerivedCrossContext with
/// derived_from naming the namespace the connection came from.
std::vector<RelationDraft> infer_cross_context_relations(const ContextMap& contexts,
                                                         NamespaceId source_ns, NamespaceId target_ns,
                                                         InferenceMode mode = InferenceMode::TargetImages);

/// Adds drafts to the graph (skipping ones already present). Returns ids in
/// draft order.
std::vector<RelationId> apply_drafts(Graph& graph, std::span<const RelationDraft> drafts);

}  // namespace kgmdd
