#include "kgmdd/graph.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <charconv>
#include <queue>

namespace kgmdd {

std::string_view to_string(NamespaceKind kind) {
    switch (kind) {
        case NamespaceKind::Terminology: return "Terminology";
        case NamespaceKind::Ontology: return "Ontology";
        case NamespaceKind::EntityClass: return "EntityClass";
    }
    return "Terminology";
}

std::string_view to_string(Origin origin) {
    switch (origin) {
        case Origin::Ingested: return "Ingested";
        case Origin::DerivedCrossContext: return "DerivedCrossContext";
        case Origin::DerivedMeta: return "DerivedMeta";
    }
    return "Ingested";
}

NamespaceKind namespace_kind_from_string(std::string_view s) {
    if (s == "Terminology") return NamespaceKind::Terminology;
    if (s == "Ontology") return NamespaceKind::Ontology;
    if (s == "EntityClass") return NamespaceKind::EntityClass;
    throw Error(ErrorCode::InvalidArgument, "unknown namespace kind '" + std::string(s) + "'", "kind");
}

Origin origin_from_string(std::string_view s) {
    if (s == "Ingested") return Origin::Ingested;
    if (s == "DerivedCrossContext") return Origin::DerivedCrossContext;
    if (s == "DerivedMeta") return Origin::DerivedMeta;
    throw Error(ErrorCode::InvalidArgument, "unknown provenance origin '" + std::string(s) + "'", "origin");
}

bool is_symmetric_kind(std::string_view kind) {
    return kind == kinds::kSameAffiliation || kind == kinds::kIsCoAuthor ||
           kind == kinds::kAssociative || kind == kinds::kContextInferred;
}

bool Subgraph::contains(EntityId e) const {
    return std::binary_search(entities.begin(), entities.end(), e);
}

bool Subgraph::contains(RelationId r) const {
    return std::binary_search(relations.begin(), relations.end(), r);
}

Subgraph Subgraph::united(const Subgraph& other) const {
    Subgraph out;
    std::set_union(entities.begin(), entities.end(), other.entities.begin(), other.entities.end(),
                   std::back_inserter(out.entities));
    std::set_union(relations.begin(), relations.end(), other.relations.begin(),
                   other.relations.end(), std::back_inserter(out.relations));
    return out;
}

NamespaceId Graph::add_namespace(std::string name, NamespaceKind kind) {
    if (name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "namespace name must be non-empty", "name");
    }
    if (namespace_by_name_.contains(name)) {
        throw Error(ErrorCode::DuplicateNamespace, "namespace '" + name + "' already exists", "name");
    }
    NamespaceId id(static_cast<std::uint32_t>(namespaces_.size()));
    namespace_by_name_.emplace(name, id);
    namespaces_.push_back(Namespace{id, std::move(name), kind, {}});
    ns_index_.emplace_back();
    return id;
}

NamespaceId Graph::ensure_namespace(std::string_view name, NamespaceKind kind) {
    if (auto found = find_namespace(name)) return *found;
    return add_namespace(std::string(name), kind);
}

void Graph::index_label(NamespaceId ns, const std::string& label, EntityId id, bool preferred) {
    auto& idx = ns_index_[ns.index()];
    if (preferred) {
        idx.preferred.try_emplace(label, id);
    } else {
        idx.synonyms.try_emplace(label, id);
    }
}

EntityId Graph::add_entity(NamespaceId ns, std::string preferred_label,
                           std::vector<std::string> synonyms, Meta meta, DuplicatePolicy policy) {
    if (!has_namespace(ns)) {
        throw Error(ErrorCode::UnknownNamespace, "unknown namespace id " + std::to_string(ns.value), "namespace");
    }
    if (preferred_label.empty()) {
        throw Error(ErrorCode::InvalidArgument, "preferred label must be non-empty", "preferred_label");
    }
    std::erase(synonyms, preferred_label);
    std::erase(synonyms, std::string{});
    std::sort(synonyms.begin(), synonyms.end());
    synonyms.erase(std::unique(synonyms.begin(), synonyms.end()), synonyms.end());

    auto& idx = ns_index_[ns.index()];
    if (auto it = idx.preferred.find(preferred_label); it != idx.preferred.end()) {
        if (policy == DuplicatePolicy::Reject) {
            throw Error(ErrorCode::DuplicateLabelInNamespace,
                        "label '" + preferred_label + "' already exists in namespace '" +
                            namespaces_[ns.index()].name + "'",
                        "preferred_label");
        }
        Entity& existing = entities_[it->second.index()];
        for (auto& syn : synonyms) {
            if (syn == existing.preferred_label) continue;
            auto pos = std::lower_bound(existing.synonyms.begin(), existing.synonyms.end(), syn);
            if (pos == existing.synonyms.end() || *pos != syn) {
                index_label(ns, syn, existing.id, false);
                existing.synonyms.insert(pos, syn);
            }
        }
        for (auto& [key, value] : meta) {
            if (existing.meta.try_emplace(key, value).second && key == kIdentifierKey) {
                idx.identifiers.try_emplace(value, existing.id);
            }
        }
        return existing.id;
    }

    EntityId id(static_cast<std::uint32_t>(entities_.size()));
    index_label(ns, preferred_label, id, true);
    for (const auto& syn : synonyms) index_label(ns, syn, id, false);
    if (auto it = meta.find(kIdentifierKey); it != meta.end()) {
        idx.identifiers.try_emplace(it->second, id);
    }
    entities_.push_back(Entity{id, ns, std::move(preferred_label), std::move(synonyms), std::move(meta)});
    namespaces_[ns.index()].members.push_back(id);
    out_.emplace_back();
    in_.emplace_back();
    return id;
}

void Graph::require_entity(EntityId id, const char* what) const {
    if (!has_entity(id)) {
        throw Error(ErrorCode::UnknownEntity, "unknown entity id " + std::to_string(id.value), what);
    }
}

RelationId Graph::add_relation(EntityId source, EntityId target, std::string kind, Provenance provenance) {
    require_entity(source, "source");
    require_entity(target, "target");
    if (kind.empty()) {
        throw Error(ErrorCode::InvalidArgument, "relation kind must be non-empty", "kind");
    }
    if (provenance.origin == Origin::DerivedCrossContext && !provenance.derived_from) {
        throw Error(ErrorCode::InvalidArgument, "cross-context provenance requires derived_from", "provenance");
    }
    if (provenance.source_document) require_entity(*provenance.source_document, "source_document");
    if (provenance.derived_from && !has_namespace(*provenance.derived_from)) {
        throw Error(ErrorCode::UnknownNamespace, "unknown derived_from namespace", "derived_from");
    }
    RelationId id(static_cast<std::uint32_t>(relations_.size()));
    relations_.push_back(Relation{id, source, target, std::move(kind), std::move(provenance)});
    out_[source.index()].push_back(id);
    in_[target.index()].push_back(id);
    return id;
}

RelationId Graph::ensure_relation(EntityId source, EntityId target, std::string kind, Provenance provenance) {
    require_entity(source, "source");
    require_entity(target, "target");
    if (auto r = find_relation(source, target, kind)) return *r;
    if (is_symmetric_kind(kind)) {
        if (auto r = find_relation(target, source, kind)) return *r;
    }
    return add_relation(source, target, std::move(kind), std::move(provenance));
}

const Entity& Graph::entity(EntityId id) const {
    require_entity(id, "entity");
    return entities_[id.index()];
}

const Relation& Graph::relation(RelationId id) const {
    if (!has_relation(id)) {
        throw Error(ErrorCode::UnknownRelation, "unknown relation id " + std::to_string(id.value), "relation");
    }
    return relations_[id.index()];
}

const Namespace& Graph::namespace_(NamespaceId id) const {
    if (!has_namespace(id)) {
        throw Error(ErrorCode::UnknownNamespace, "unknown namespace id " + std::to_string(id.value), "namespace");
    }
    return namespaces_[id.index()];
}

std::optional<NamespaceId> Graph::find_namespace(std::string_view name) const {
    if (auto it = namespace_by_name_.find(std::string(name)); it != namespace_by_name_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<EntityId> Graph::find_entity(NamespaceId ns, std::string_view label) const {
    const auto& idx = ns_index_.at(namespace_(ns).id.index());
    std::string key(label);
    if (auto it = idx.preferred.find(key); it != idx.preferred.end()) return it->second;
    if (auto it = idx.synonyms.find(key); it != idx.synonyms.end()) return it->second;
    return std::nullopt;
}

std::vector<EntityId> Graph::find_by_label(std::string_view label) const {
    std::vector<EntityId> out;
    for (const auto& ns : namespaces_) {
        if (auto e = find_entity(ns.id, label)) out.push_back(*e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<EntityId> Graph::find_by_identifier(NamespaceId ns, std::string_view identifier) const {
    const auto& idx = ns_index_.at(namespace_(ns).id.index());
    if (auto it = idx.identifiers.find(std::string(identifier)); it != idx.identifiers.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<RelationId> Graph::find_relation(EntityId source, EntityId target, std::string_view kind) const {
    require_entity(source, "source");
    require_entity(target, "target");
    for (RelationId r : out_[source.index()]) {
        const Relation& rel = relations_[r.index()];
        if (rel.target == target && rel.kind == kind) return r;
    }
    return std::nullopt;
}

bool Graph::connected(EntityId a, EntityId b) const {
    require_entity(a, "a");
    require_entity(b, "b");
    for (RelationId r : out_[a.index()]) {
        if (relations_[r.index()].target == b) return true;
    }
    for (RelationId r : in_[a.index()]) {
        if (relations_[r.index()].source == b) return true;
    }
    return false;
}

std::span<const RelationId> Graph::out_relations(EntityId e) const {
    require_entity(e, "entity");
    return out_[e.index()];
}

std::span<const RelationId> Graph::in_relations(EntityId e) const {
    require_entity(e, "entity");
    return in_[e.index()];
}

std::vector<EntityId> Graph::neighbors(EntityId e) const {
    require_entity(e, "entity");
    const auto& outs = out_[e.index()];
    const auto& ins = in_[e.index()];
    std::vector<EntityId> result;
    result.reserve(outs.size() + ins.size());
    for (RelationId r : outs) result.push_back(relations_[r.index()].target);
    for (RelationId r : ins) result.push_back(relations_[r.index()].source);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    std::erase(result, e);
    return result;
}

Subgraph Graph::induced_subgraph(std::span<const EntityId> vertices) const {
    Subgraph sub;
    sub.entities.assign(vertices.begin(), vertices.end());
    for (EntityId v : sub.entities) require_entity(v, "vertices");
    std::sort(sub.entities.begin(), sub.entities.end());
    sub.entities.erase(std::unique(sub.entities.begin(), sub.entities.end()), sub.entities.end());
    for (EntityId v : sub.entities) {
        for (RelationId r : out_[v.index()]) {
            if (sub.contains(relations_[r.index()].target)) sub.relations.push_back(r);
        }
    }
    std::sort(sub.relations.begin(), sub.relations.end());
    return sub;
}

Subgraph Graph::namespace_subgraph(NamespaceId ns) const {
    const Namespace& space = namespace_(ns);
    Subgraph sub;
    sub.entities = space.members;
    std::sort(sub.entities.begin(), sub.entities.end());
    for (EntityId v : sub.entities) {
        for (RelationId r : out_[v.index()]) {
            if (entities_[relations_[r.index()].target.index()].ns == ns) sub.relations.push_back(r);
        }
    }
    std::sort(sub.relations.begin(), sub.relations.end());
    return sub;
}

Subgraph Graph::whole() const {
    Subgraph sub;
    sub.entities.reserve(entities_.size());
    for (const auto& e : entities_) sub.entities.push_back(e.id);
    sub.relations.reserve(relations_.size());
    for (const auto& r : relations_) sub.relations.push_back(r.id);
    return sub;
}

Graph Graph::materialize(const Subgraph& sub) const {
    Graph out;
    for (const auto& ns : namespaces_) out.add_namespace(ns.name, ns.kind);
    std::unordered_map<EntityId, EntityId> remap;
    for (EntityId e : sub.entities) {
        const Entity& src = entity(e);
        remap[e] = out.add_entity(src.ns, src.preferred_label, src.synonyms, src.meta);
    }
    for (RelationId r : sub.relations) {
        const Relation& rel = relation(r);
        auto s = remap.find(rel.source);
        auto t = remap.find(rel.target);
        if (s == remap.end() || t == remap.end()) {
            throw Error(ErrorCode::InvalidArgument, "subgraph relation endpoint outside its vertex set", "relations");
        }
        Provenance prov = rel.provenance;
        if (prov.source_document) {
            auto d = remap.find(*prov.source_document);
            prov.source_document = d == remap.end() ? std::nullopt : std::optional<EntityId>(d->second);
        }
        out.add_relation(s->second, t->second, rel.kind, std::move(prov));
    }
    return out;
}

std::vector<EntityId> Graph::hierarchy_order(NamespaceId ns) const {
    const Namespace& space = namespace_(ns);
    std::unordered_map<EntityId, std::size_t> pending_parents;
    std::unordered_map<EntityId, std::vector<EntityId>> children;
    for (EntityId e : space.members) pending_parents[e] = 0;
    for (EntityId e : space.members) {
        for (RelationId r : out_[e.index()]) {
            const Relation& rel = relations_[r.index()];
            if (rel.kind != kinds::kChildOf || entities_[rel.target.index()].ns != ns) continue;
            ++pending_parents[e];
            children[rel.target].push_back(e);
        }
    }
    std::vector<EntityId> ready;
    for (EntityId e : space.members) {
        if (pending_parents[e] == 0) ready.push_back(e);
    }
    std::sort(ready.begin(), ready.end(), std::greater<>());
    std::vector<EntityId> order;
    while (!ready.empty()) {
        EntityId e = ready.back();
        ready.pop_back();
        order.push_back(e);
        for (EntityId c : children[e]) {
            if (--pending_parents[c] == 0) ready.push_back(c);
        }
    }
    if (order.size() == space.members.size()) return order;

    // Walk parent links from any unresolved node until a node repeats.
    EntityId start;
    for (EntityId e : space.members) {
        if (pending_parents[e] > 0) {
            start = e;
            break;
        }
    }
    std::vector<EntityId> trail;
    std::unordered_map<EntityId, std::size_t> seen;
    EntityId cur = start;
    while (!seen.contains(cur)) {
        seen[cur] = trail.size();
        trail.push_back(cur);
        for (RelationId r : out_[cur.index()]) {
            const Relation& rel = relations_[r.index()];
            if (rel.kind == kinds::kChildOf && entities_[rel.target.index()].ns == ns &&
                pending_parents[rel.target] > 0) {
                cur = rel.target;
                break;
            }
        }
    }
    std::string path;
    for (std::size_t i = seen[cur]; i < trail.size(); ++i) {
        path += entities_[trail[i].index()].preferred_label + " -> ";
    }
    path += entities_[cur.index()].preferred_label;
    throw Error(ErrorCode::CycleDetected, "hierarchy cycle in '" + space.name + "': " + path, space.name);
}

bool Graph::adjacency_consistent() const {
    std::vector<std::vector<RelationId>> outs(entities_.size());
    std::vector<std::vector<RelationId>> ins(entities_.size());
    for (const auto& r : relations_) {
        outs[r.source.index()].push_back(r.id);
        ins[r.target.index()].push_back(r.id);
    }
    if (outs.size() != out_.size() || ins.size() != in_.size()) return false;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        auto a = out_[i];
        auto b = in_[i];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != outs[i] || b != ins[i]) return false;
    }
    return true;
}

void Graph::reserve(std::size_t entities, std::size_t relations) {
    entities_.reserve(entities);
    out_.reserve(entities);
    in_.reserve(entities);
    relations_.reserve(relations);
}

EntityId resolve_entity_ref(const Graph& graph, std::string_view ref) {
    if (!ref.empty() && std::all_of(ref.begin(), ref.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        std::uint32_t value = 0;
        auto [end, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), value);
        EntityId id(value);
        if (ec == std::errc{} && end == ref.data() + ref.size() && graph.has_entity(id)) return id;
        throw Error(ErrorCode::UnknownEntity, "no entity with id " + std::string(ref), std::string(ref));
    }
    auto colon = ref.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::UnknownEntity, "entity reference must be an id or ns:label", std::string(ref));
    }
    auto ns = graph.find_namespace(ref.substr(0, colon));
    if (!ns) {
        throw Error(ErrorCode::UnknownNamespace, "unknown namespace '" + std::string(ref.substr(0, colon)) + "'",
                    std::string(ref));
    }
    auto e = graph.find_entity(*ns, ref.substr(colon + 1));
    if (!e) throw Error(ErrorCode::UnknownEntity, "no entity '" + std::string(ref) + "'", std::string(ref));
    return *e;
}

}  // namespace kgmdd
