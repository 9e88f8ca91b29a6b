#pragma once
// In-memory property-graph store.
//
// Entities live in exactly one namespace (terminology, ontology or entity
// class). Relations are stored directed; neighbors() ignores direction.
// The store is append-only: ids are dense, assigned in insertion order and
// never reused. Any number of threads may read a Graph concurrently; writes
// need exclusive access.

#include "kgmdd/ids.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgmdd {

enum class NamespaceKind { Terminology, Ontology, EntityClass };

enum class Origin { Ingested, DerivedCrossContext, DerivedMeta };

enum class DuplicatePolicy {
    Merge,   // return the existing id, folding in new synonyms and meta keys
    Reject,  // throw DuplicateLabelInNamespace
};

std::string_view to_string(NamespaceKind kind);
std::string_view to_string(Origin origin);
NamespaceKind namespace_kind_from_string(std::string_view s);
Origin origin_from_string(std::string_view s);

struct Provenance {
    Origin origin = Origin::Ingested;
    std::optional<EntityId> source_document;
    std::optional<NamespaceId> derived_from;
    std::string note;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Dublin-Core style metadata ("dc:identifier", "dc:title", ...).
using Meta = std::map<std::string, std::string, std::less<>>;

inline constexpr std::string_view kIdentifierKey = "dc:identifier";

struct Entity {
    EntityId id;
    NamespaceId ns;
    std::string preferred_label;
    std::vector<std::string> synonyms;
    Meta meta;
};

struct Relation {
    RelationId id;
    EntityId source;
    EntityId target;
    std::string kind;
    Provenance provenance;
};

struct Namespace {
    NamespaceId id;
    std::string name;
    NamespaceKind kind = NamespaceKind::Terminology;
    std::vector<EntityId> members;
};

namespace kinds {
inline constexpr std::string_view kChildOf = "childOf";
inline constexpr std::string_view kAssociative = "associative";
inline constexpr std::string_view kIsAuthor = "isAuthor";
inline constexpr std::string_view kHasAffiliation = "hasAffiliation";
inline constexpr std::string_view kHasOrigin = "hasOrigin";
inline constexpr std::string_view kHasType = "hasType";
inline constexpr std::string_view kHasKeyword = "hasKeyword";
inline constexpr std::string_view kHasCitation = "hasCitation";
inline constexpr std::string_view kHasAnnotation = "hasAnnotation";
inline constexpr std::string_view kSameAffiliation = "sameAffiliation";
inline constexpr std::string_view kIsCoAuthor = "isCoAuthor";
inline constexpr std::string_view kContextInferred = "contextInferred";
inline constexpr std::string_view kBelPrefix = "BEL:";
}  // namespace kinds

/// sameAffiliation, isCoAuthor, associative and contextInferred are
/// symmetric; everything else is directed.
bool is_symmetric_kind(std::string_view kind);

/// A vertex set plus a relation set, both sorted and referring to ids of
/// the graph they were taken from. Relations always have both endpoints
/// in `entities`.
struct Subgraph {
    std::vector<EntityId> entities;
    std::vector<RelationId> relations;

    [[nodiscard]] bool contains(EntityId e) const;
    [[nodiscard]] bool contains(RelationId r) const;
    [[nodiscard]] bool empty() const { return entities.empty(); }

    /// Sorted union of both parts.
    [[nodiscard]] Subgraph united(const Subgraph& other) const;

    friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

class Graph {
public:
    NamespaceId add_namespace(std::string name, NamespaceKind kind);
    /// Returns the existing namespace of that name, or creates it.
    NamespaceId ensure_namespace(std::string_view name, NamespaceKind kind);

    EntityId add_entity(NamespaceId ns, std::string preferred_label,
                        std::vector<std::string> synonyms = {}, Meta meta = {},
                        DuplicatePolicy policy = DuplicatePolicy::Merge);

    RelationId add_relation(EntityId source, EntityId target, std::string kind,
                            Provenance provenance = {});

    /// add_relation unless a relation with the same kind already connects
    /// the pair (either direction for symmetric kinds).
    RelationId ensure_relation(EntityId source, EntityId target, std::string kind,
                               Provenance provenance = {});

    // Lookup.
    [[nodiscard]] const Entity& entity(EntityId id) const;
    [[nodiscard]] const Relation& relation(RelationId id) const;
    [[nodiscard]] const Namespace& namespace_(NamespaceId id) const;

    [[nodiscard]] bool has_entity(EntityId id) const { return id.valid() && id.index() < entities_.size(); }
    [[nodiscard]] bool has_relation(RelationId id) const { return id.valid() && id.index() < relations_.size(); }
    [[nodiscard]] bool has_namespace(NamespaceId id) const { return id.valid() && id.index() < namespaces_.size(); }

    [[nodiscard]] std::size_t entity_count() const { return entities_.size(); }
    [[nodiscard]] std::size_t relation_count() const { return relations_.size(); }
    [[nodiscard]] std::size_t namespace_count() const { return namespaces_.size(); }

    [[nodiscard]] std::span<const Entity> entities() const { return entities_; }
    [[nodiscard]] std::span<const Relation> relations() const { return relations_; }
    [[nodiscard]] std::span<const Namespace> namespaces() const { return namespaces_; }

    [[nodiscard]] std::optional<NamespaceId> find_namespace(std::string_view name) const;
    /// Preferred label first, then synonyms.
    [[nodiscard]] std::optional<EntityId> find_entity(NamespaceId ns, std::string_view label) const;
    /// Every entity (any namespace) whose preferred label or synonym equals `label`.
    [[nodiscard]] std::vector<EntityId> find_by_label(std::string_view label) const;
    /// Lookup by the dc:identifier meta value within a namespace.
    [[nodiscard]] std::optional<EntityId> find_by_identifier(NamespaceId ns, std::string_view identifier) const;
    [[nodiscard]] std::optional<RelationId> find_relation(EntityId source, EntityId target,
                                                          std::string_view kind) const;
    /// True when any relation links a and b, in either direction.
    [[nodiscard]] bool connected(EntityId a, EntityId b) const;

    [[nodiscard]] std::span<const RelationId> out_relations(EntityId e) const;
    [[nodiscard]] std::span<const RelationId> in_relations(EntityId e) const;

    /// N(e): entities adjacent via any relation in either direction, sorted,
    /// deduplicated, never containing e itself.
    [[nodiscard]] std::vector<EntityId> neighbors(EntityId e) const;

    /// G[V]: the given vertices and every relation with both endpoints inside.
    [[nodiscard]] Subgraph induced_subgraph(std::span<const EntityId> vertices) const;
    [[nodiscard]] Subgraph namespace_subgraph(NamespaceId ns) const;
    [[nodiscard]] Subgraph whole() const;

    /// Copies a subgraph into a standalone graph. Namespaces keep their ids;
    /// entities and relations are renumbered densely in id order.
    [[nodiscard]] Graph materialize(const Subgraph& sub) const;

    /// Topological order (parents before children) of the childOf hierarchy
    /// of one namespace. Throws CycleDetected naming the cycle.
    [[nodiscard]] std::vector<EntityId> hierarchy_order(NamespaceId ns) const;

    /// Rebuilds the adjacency index from the relation table and compares.
    [[nodiscard]] bool adjacency_consistent() const;

    void reserve(std::size_t entities, std::size_t relations);

private:
    void require_entity(EntityId id, const char* what) const;
    void index_label(NamespaceId ns, const std::string& label, EntityId id, bool preferred);

    struct NamespaceIndex {
        std::unordered_map<std::string, EntityId> preferred;
        std::unordered_map<std::string, EntityId> synonyms;
        std::unordered_map<std::string, EntityId> identifiers;
    };

    std::vector<Entity> entities_;
    std::vector<Relation> relations_;
    std::vector<Namespace> namespaces_;
    std::vector<NamespaceIndex> ns_index_;
    std::unordered_map<std::string, NamespaceId> namespace_by_name_;
    std::vector<std::vector<RelationId>> out_;
    std::vector<std::vector<RelationId>> in_;
};

/// "42" names entity 42; "ns:label" looks the label (or a synonym) up in
/// namespace ns. Throws UnknownEntity or UnknownNamespace.
EntityId resolve_entity_ref(const Graph& graph, std::string_view ref);

}  // namespace kgmdd
