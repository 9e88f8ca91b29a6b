#include "kgmdd/compile.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace kgmdd {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct RouteState {
    std::uint32_t last = kNone;
    std::vector<std::uint32_t> visited;  // sorted; only tracked when needed
    bool finished = false;

    friend bool operator==(const RouteState&, const RouteState&) = default;
};

struct RouteStateHash {
    std::size_t operator()(const RouteState& s) const noexcept {
        std::size_t h = s.last * 0x9e3779b97f4a7c15ULL + s.finished;
        for (auto v : s.visited) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

std::vector<EntityId> layer_domain(const Graph& graph, const LayerSpec& layer, std::size_t index) {
    std::vector<EntityId> out;
    if (!layer.entities.empty()) {
        for (EntityId e : layer.entities) {
            if (!graph.has_entity(e)) {
                throw Error(ErrorCode::UnknownEntity, "layer " + std::to_string(index) + " names unknown entity " +
                                                          std::to_string(e.value), "layers");
            }
        }
        out = layer.entities;
    } else if (layer.ns) {
        out = graph.namespace_(*layer.ns).members;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) {
        throw Error(ErrorCode::EmptyLayerDomain,
                    "layer " + std::to_string(index) + " ('" + layer.name + "') has no entities", "layers");
    }
    return out;
}

bool contains(const std::vector<std::uint32_t>& sorted, std::uint32_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

mdd::VariableSpec entity_variable(const Graph& graph, std::string name, const std::vector<EntityId>& domain,
                                  bool with_skip) {
    mdd::VariableSpec var{std::move(name), {}, std::nullopt};
    std::map<std::string, std::size_t> uses;
    for (EntityId e : domain) ++uses[graph.entity(e).preferred_label];
    for (EntityId e : domain) {
        std::string label = graph.entity(e).preferred_label;
        if (uses[label] > 1 || (with_skip && label == kSkipLabel)) label += " [" + std::to_string(e.value) + "]";
        var.values.push_back(mdd::DomainValue{std::move(label), e});
    }
    if (with_skip) var.values.push_back(mdd::DomainValue{std::string(kSkipLabel), std::nullopt});
    return var;
}

mdd::Mdd compile_combinations(const Graph& graph, const CompilationSpec& spec) {
    if (spec.layers.empty()) throw Error(ErrorCode::InvalidSpec, "schema has no layers", "layers");
    if (spec.depth_limit && *spec.depth_limit == 0) {
        throw Error(ErrorCode::InvalidSpec, "depth limit must be at least 1", "depth_limit");
    }
    for (auto anchor : {spec.root_anchor, spec.end_anchor}) {
        if (anchor && !graph.has_entity(*anchor)) {
            throw Error(ErrorCode::UnknownEntity, "anchor " + std::to_string(anchor->value) + " is not in the graph",
                        "anchor");
        }
    }

    std::vector<std::vector<EntityId>> base;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) base.push_back(layer_domain(graph, spec.layers[i], i));

    const bool routed = spec.cyclic && spec.end_anchor.has_value();
    std::size_t depth = spec.layers.size();
    if (spec.cyclic) {
        if (spec.depth_limit.has_value() == spec.end_anchor.has_value()) {
            throw Error(ErrorCode::InvalidSpec, "a cyclic schema needs exactly one of depth_limit or end_anchor",
                        "depth_limit");
        }
        if (spec.depth_limit) {
            depth = *spec.depth_limit;
        } else {
            if (!spec.root_anchor) {
                throw Error(ErrorCode::InvalidSpec, "a cyclic schema bounded by an end anchor needs a root anchor",
                            "root_anchor");
            }
            std::set<EntityId> distinct;
            for (const auto& d : base) distinct.insert(d.begin(), d.end());
            depth = distinct.size();
        }
    } else if (spec.depth_limit) {
        depth = std::min(depth, *spec.depth_limit);
    }

    std::vector<std::vector<EntityId>> domains;
    std::vector<mdd::VariableSpec> variables;
    for (std::size_t i = 0; i < depth; ++i) {
        const std::size_t src = i % spec.layers.size();
        domains.push_back(base[src]);
        std::string name = spec.layers[src].name.empty() ? "layer" + std::to_string(src) : spec.layers[src].name;
        if (spec.cyclic) name += "@" + std::to_string(i);
        variables.push_back(entity_variable(graph, std::move(name), domains.back(), routed));
    }

    auto in_layer = [&](std::size_t layer, EntityId e) {
        return std::binary_search(domains[layer].begin(), domains[layer].end(), e);
    };
    if (spec.root_anchor && !in_layer(0, *spec.root_anchor)) {
        throw Error(ErrorCode::AnchorNotInLayer, "root anchor is not in the first layer", "root_anchor");
    }
    if (spec.end_anchor) {
        bool found = false;
        if (routed) {
            for (std::size_t i = 0; i < depth && !found; ++i) found = in_layer(i, *spec.end_anchor);
        } else {
            found = in_layer(depth - 1, *spec.end_anchor);
        }
        if (!found) throw Error(ErrorCode::AnchorNotInLayer, "end anchor is not in the last layer", "end_anchor");
    }

    auto manager = mdd::Manager::create(std::move(variables));
    const bool track_visited = routed || spec.adjacency == Adjacency::AllPairs;

    auto next = [&](std::size_t layer, const RouteState& s, std::uint32_t v) -> std::optional<RouteState> {
        const auto& domain = domains[layer];
        if (routed && v == domain.size()) {  // skip
            if (!s.finished) return std::nullopt;
            return s;
        }
        if (s.finished) return std::nullopt;
        EntityId e = domain[v];
        if (layer == 0 && spec.root_anchor && e != *spec.root_anchor) return std::nullopt;
        if (!routed && layer + 1 == depth && spec.end_anchor && e != *spec.end_anchor) return std::nullopt;
        if (routed && contains(s.visited, e.value)) return std::nullopt;
        if (s.last != kNone) {
            if (spec.adjacency == Adjacency::Consecutive) {
                if (!graph.connected(EntityId(s.last), e)) return std::nullopt;
            } else {
                for (auto prev : s.visited) {
                    if (!graph.connected(EntityId(prev), e)) return std::nullopt;
                }
            }
        }
        RouteState out;
        out.last = e.value;
        if (track_visited) {
            out.visited = s.visited;
            out.visited.insert(std::lower_bound(out.visited.begin(), out.visited.end(), e.value), e.value);
        }
        out.finished = routed && e == *spec.end_anchor;
        return out;
    };
    auto accept = [&](const RouteState& s) { return !routed || s.finished; };
    return mdd::build_top_down<RouteState, RouteStateHash>(manager, RouteState{}, next, accept);
}

std::optional<EntityId> value_entity(const mdd::Mdd& m, std::size_t layer, std::uint32_t value) {
    const auto& var = m.manager()->variable(layer);
    if (value >= var.size()) {
        throw Error(ErrorCode::ValueOutOfDomain, "value out of domain", "value");
    }
    return var.values[value].entity;
}

std::vector<EntityId> topological_order(const Graph& graph, const Subgraph& pathway) {
    std::unordered_map<EntityId, std::size_t> indegree;
    std::unordered_map<EntityId, std::vector<EntityId>> succ;
    for (EntityId e : pathway.entities) indegree[e] = 0;
    for (RelationId r : pathway.relations) {
        const Relation& rel = graph.relation(r);
        ++indegree[rel.target];
        succ[rel.source].push_back(rel.target);
    }
    std::set<EntityId> ready;
    for (EntityId e : pathway.entities) {
        if (indegree[e] == 0) ready.insert(e);
    }
    std::vector<EntityId> order;
    while (!ready.empty()) {
        EntityId e = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(e);
        for (EntityId t : succ[e]) {
            if (--indegree[t] == 0) ready.insert(t);
        }
    }
    if (order.size() != pathway.entities.size()) {
        throw Error(ErrorCode::NotADag, "pathway contains a directed cycle", "pathway");
    }
    return order;
}

mdd::Mdd compile_activity(const Graph& graph, const Subgraph& pathway, EntityId source, EntityId sink,
                          std::span<const EntityId> order) {
    if (!pathway.contains(source)) {
        throw Error(ErrorCode::UnknownEntity, "source is not part of the pathway", "source");
    }
    if (!pathway.contains(sink)) {
        throw Error(ErrorCode::UnknownEntity, "sink is not part of the pathway", "sink");
    }
    auto topo = topological_order(graph, pathway);

    std::vector<EntityId> var_order;
    if (order.empty()) {
        var_order = topo;
    } else {
        var_order.assign(order.begin(), order.end());
        auto sorted = var_order;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted != pathway.entities) {
            throw Error(ErrorCode::OrderIncomplete,
                        "variable order must list every pathway entity exactly once", "order");
        }
    }

    std::vector<mdd::VariableSpec> variables;
    std::unordered_map<EntityId, std::size_t> layer_of;
    std::set<std::string> names;
    for (EntityId e : var_order) {
        std::string name = graph.entity(e).preferred_label;
        if (!names.insert(name).second) name += " [" + std::to_string(e.value) + "]";
        layer_of[e] = variables.size();
        variables.push_back(mdd::activity_variable(std::move(name), e));
    }
    auto manager = mdd::Manager::create(std::move(variables));

    std::unordered_map<EntityId, std::vector<EntityId>> succ;
    for (RelationId r : pathway.relations) {
        const Relation& rel = graph.relation(r);
        succ[rel.source].push_back(rel.target);
    }

    // reach(v) = active(v) AND (v == sink OR some successor reaches).
    // Processing in reverse topological order keeps every successor ready.
    const std::uint32_t active = 1;
    std::unordered_map<EntityId, mdd::Mdd> reach;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        EntityId v = *it;
        mdd::Mdd onward = manager->constant(v == sink);
        if (v != sink) {
            for (EntityId w : succ[v]) onward = mdd::apply(mdd::Op::Union, onward, reach.at(w));
        }
        mdd::Mdd lit = manager->literal(layer_of[v], std::span<const std::uint32_t>(&active, 1));
        reach.emplace(v, mdd::apply(mdd::Op::Intersection, lit, onward));
    }
    return reach.at(source);
}

mdd::Mdd compile_activity(const Graph& pathway, EntityId source, EntityId sink, std::span<const EntityId> order) {
    return compile_activity(pathway, pathway.whole(), source, sink, order);
}

}  // namespace kgmdd
