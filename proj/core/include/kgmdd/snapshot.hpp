#pragma once
// Versioned JSON graph document. Used both for whole-graph snapshots and
// for subgraph payloads (which keep the ids of the graph they came from).

#include "kgmdd/graph.hpp"

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace kgmdd {

inline constexpr std::string_view kSnapshotFormat = "kgmdd-graph";
inline constexpr int kSnapshotVersion = 1;

nlohmann::json entity_to_json(const Entity& e);
nlohmann::json relation_to_json(const Relation& r);

nlohmann::json graph_to_json(const Graph& graph);
/// Only the listed entities and relations; namespaces are included in full.
nlohmann::json subgraph_to_json(const Graph& graph, const Subgraph& sub);

/// Throws SnapshotVersion on a foreign magic or version, ParseError on a
/// malformed document.
Graph graph_from_json(const nlohmann::json& doc);

/// Compact, key-sorted, newline terminated. Same graph gives the same bytes.
std::string serialize_snapshot(const Graph& graph);
Graph parse_snapshot(std::string_view text);

void save_snapshot(const Graph& graph, const std::filesystem::path& path);
Graph load_snapshot(const std::filesystem::path& path);

}  // namespace kgmdd
