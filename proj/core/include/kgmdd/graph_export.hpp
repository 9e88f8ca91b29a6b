#pragma once

#include "kgmdd/graph.hpp"

#include <string>

namespace kgmdd {

/// Percent-encodes everything outside [A-Za-z0-9-._~].
std::string iri_escape(std::string_view text);

/// <urn:kgmdd:{namespace}/{label}>, both parts escaped.
std::string entity_iri(const Graph& graph, EntityId e);
/// <urn:kgmdd:rel/{kind}>
std::string relation_kind_iri(std::string_view kind);

/// One "<s> <p> <o> ." line per relation, lines sorted bytewise.
std::string export_ntriples(const Graph& graph);
std::string export_ntriples(const Graph& graph, const Subgraph& sub);

/// Plain digraph; one cluster per namespace.
std::string export_graph_dot(const Graph& graph, const Subgraph& sub);
std::string export_graph_dot(const Graph& graph);

}  // namespace kgmdd
