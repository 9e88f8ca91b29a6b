#pragma once
// Knowledge graph to MDD compilation.
//
// Combination mode: one variable per schema layer whose domain is that
// layer's entities; an assignment is TRUE iff the chosen entities form an
// adjacency-consistent chain (and honour the anchors).
//
// Activity mode: one active/inactive variable per pathway entity; an
// assignment is TRUE iff some directed source -> sink path is fully active.

#include "kgmdd/graph.hpp"
#include "kgmdd/mdd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kgmdd {

enum class Adjacency {
    Consecutive,  // layers i and i+1 must be adjacent
    AllPairs,     // every two chosen entities must be adjacent
};

struct LayerSpec {
    std::string name;
    /// Explicit entities win; otherwise every member of `ns`.
    std::optional<NamespaceId> ns;
    std::vector<EntityId> entities;
};

struct CompilationSpec {
    std::vector<LayerSpec> layers;
    std::optional<EntityId> root_anchor;
    std::optional<EntityId> end_anchor;
    std::optional<std::size_t> depth_limit;
    /// The layer list repeats (e.g. document, annotation, document, ...).
    /// Cyclic schemas need exactly one of depth_limit or end_anchor; with an
    /// end anchor they also need a root anchor and compile the simple routes
    /// from root to end, padded with a trailing "skip" value.
    bool cyclic = false;
    Adjacency adjacency = Adjacency::Consecutive;
};

inline constexpr std::string_view kSkipLabel = "skip";

/// A variable whose values are the given entities, labelled by preferred
/// label (suffixed with the id where labels collide), optionally followed
/// by a trailing skip value.
mdd::VariableSpec entity_variable(const Graph& graph, std::string name, const std::vector<EntityId>& domain,
                                  bool with_skip);

/// Throws EmptyLayerDomain, AnchorNotInLayer or InvalidSpec.
mdd::Mdd compile_combinations(const Graph& graph, const CompilationSpec& spec);

/// Entity behind each value of a compiled layer (nullopt for "skip").
std::optional<EntityId> value_entity(const mdd::Mdd& m, std::size_t layer, std::uint32_t value);

/// Kahn order, smallest id first among ready vertices. Throws NotADag.
std::vector<EntityId> topological_order(const Graph& graph, const Subgraph& pathway);

/// `order` empty means topological order. Throws NotADag, OrderIncomplete,
/// UnknownEntity (source or sink outside the pathway).
mdd::Mdd compile_activity(const Graph& graph, const Subgraph& pathway, EntityId source, EntityId sink,
                          std::span<const EntityId> order = {});
mdd::Mdd compile_activity(const Graph& pathway, EntityId source, EntityId sink,
                          std::span<const EntityId> order = {});

}  // namespace kgmdd
