#pragma once
// Seeded desk-scale workload: a dense random graph plus a mixed query
// sequence (neighbourhood, extended subgraph, knowledge stream), timed per
// query kind.

#include "kgmdd/graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace kgmdd::bench {

struct BenchConfig {
    std::size_t nodes = 1000;
    std::size_t edges = 10000;
    std::size_t queries = 1000;
    std::uint64_t seed = 1;
    std::size_t namespaces = 3;
    std::size_t stream_max_length = 2;
    std::size_t stream_max_paths = 1000;
};

enum class QueryKind : std::uint8_t { Neighborhood, ExtendedSubgraph, Stream };

struct Query {
    QueryKind kind;
    EntityId a;
    EntityId b;  // Stream only

    friend bool operator==(const Query&, const Query&) = default;
};

/// splitmix64; fixed output for a seed on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

/// Throws InvalidArgument unless nodes >= 2 and namespaces >= 1.
Graph generate_graph(const BenchConfig& config);
std::vector<Query> generate_queries(const BenchConfig& config);
/// FNV-1a over the query sequence.
std::uint64_t workload_hash(const std::vector<Query>& queries);

/// Builds the graph, runs the workload and reports timings in milliseconds.
nlohmann::json run(const BenchConfig& config);

}  // namespace kgmdd::bench
