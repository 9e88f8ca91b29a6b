#pragma once
// Hypothesis validation between two entities.
//
// A path is a simple entity sequence a = e0, e1, ..., en = b in which each
// consecutive pair is joined by at least one relation of an allowed kind.
// When several relations join a pair, the path records the smallest id.
// Traversal ignores relation direction unless `directed` is set.

#include "kgmdd/graph.hpp"
#include "kgmdd/mdd.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kgmdd {

inline constexpr std::size_t kDefaultMaxLength = 4;

struct PathQuery {
    EntityId from;
    EntityId to;
    std::size_t max_length = kDefaultMaxLength;
    std::set<std::string, std::less<>> allowed_kinds;  // empty = every kind
    std::size_t max_paths = 0;                         // 0 = unlimited
    bool directed = false;
};

struct Path {
    std::vector<EntityId> entities;
    std::vector<RelationId> relations;

    [[nodiscard]] std::size_t length() const { return relations.size(); }
    friend bool operator==(const Path&, const Path&) = default;
};

struct KnowledgeStream {
    std::vector<Path> paths;  // lexicographic by entity sequence
    bool truncated = false;
};

/// Fewest hops, ties broken by the lexicographically smallest entity
/// sequence. nullopt when b is unreachable. The hop bound is not applied.
std::optional<Path> shortest_path(const Graph& graph, const PathQuery& q);

/// Every simple path of at most max_length hops.
KnowledgeStream knowledge_stream(const Graph& graph, const PathQuery& q);

/// One variable per intermediate position (max_length - 1 of them). Domains
/// hold the entities that can occupy that position followed by "skip";
/// shorter paths fill their trailing positions with skip. TRUE assignments
/// are exactly the paths of knowledge_stream.
mdd::Mdd validate_influence(const Graph& graph, const PathQuery& q);

/// Maps a TRUE assignment of validate_influence back to its path.
Path decode_influence_path(const Graph& graph, const PathQuery& q, const mdd::Mdd& m,
                           const mdd::Assignment& assignment);

nlohmann::json path_to_json(const Graph& graph, const Path& path);
nlohmann::json stream_to_json(const Graph& graph, const KnowledgeStream& stream);
/// Induced subgraph of all path entities; relations used by a path are
/// drawn bold.
std::string stream_to_dot(const Graph& graph, const KnowledgeStream& stream);

}  // namespace kgmdd
