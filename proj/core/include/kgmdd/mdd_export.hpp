#pragma once

#include "kgmdd/mdd.hpp"

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace kgmdd::mdd {

struct DotOptions {
    bool hide_false = true;  // omit edges into FALSE and the FALSE terminal
};

/// Layers ranked top to bottom, edges labelled with domain values; parallel
/// edges to the same child are merged into one comma-separated label.
std::string to_dot(const Mdd& m, const DotOptions& options = {});

/// {variables, fixed, root, nodes:[{id, layer, children}]} over reachable nodes.
nlohmann::json to_json(const Mdd& m);

/// Value labels of one assignment, keyed by variable name.
nlohmann::json assignment_to_json(const Mdd& m, const Assignment& a);

struct FsmState {
    NodeRef id;
    std::size_t layer;   // variable_count() for terminals
    std::string label;   // variable name, "TRUE" or "FALSE"
    bool accepting = false;
};

struct FsmTransition {
    NodeRef from;
    NodeRef to;
    std::uint32_t value;
    std::string label;
};

/// A conflict edge re-attached against the variable order, between the
/// layers where its two entities are decided.
struct FsmBackTransition {
    EntityId from_entity;
    EntityId to_entity;
    std::size_t from_layer;
    std::size_t to_layer;
};

struct Fsm {
    std::vector<FsmState> states;
    std::vector<FsmTransition> transitions;
    std::vector<FsmBackTransition> back_transitions;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// States are the reachable nodes plus both terminals. An entity is located
/// by the variable that stands for it or, failing that, the first layer
/// whose domain contains it; unknown entities throw
/// UnknownEntityInConflictEdge. Descriptive export only.
Fsm mdd_to_fsm(const Mdd& m, std::span<const std::pair<EntityId, EntityId>> conflict_edges);

}  // namespace kgmdd::mdd
