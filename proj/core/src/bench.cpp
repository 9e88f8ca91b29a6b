#include "kgmdd/bench.hpp"

#include "kgmdd/context.hpp"
#include "kgmdd/error.hpp"
#include "kgmdd/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace kgmdd::bench {

using nlohmann::json;

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

namespace {

void check(const BenchConfig& c) {
    if (c.nodes < 2) throw Error(ErrorCode::InvalidArgument, "bench needs at least 2 nodes", "nodes");
    if (c.namespaces < 1) throw Error(ErrorCode::InvalidArgument, "bench needs a namespace", "namespaces");
    if (c.stream_max_length < 1) {
        throw Error(ErrorCode::InvalidArgument, "stream length must be at least 1", "stream_max_length");
    }
}

std::pair<EntityId, EntityId> distinct_pair(Rng& rng, std::size_t n) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n - 1));
    if (b >= a) ++b;
    return {EntityId(a), EntityId(b)};
}

json summarize(std::vector<double>& ms) {
    std::sort(ms.begin(), ms.end());
    auto rank = [&](double p) {
        auto i = static_cast<std::size_t>(std::ceil(p * static_cast<double>(ms.size())));
        return ms[std::clamp<std::size_t>(i, 1, ms.size()) - 1];
    };
    double sum = 0;
    for (double v : ms) sum += v;
    return json{{"count", ms.size()},
                {"mean", sum / static_cast<double>(ms.size())},
                {"p50", rank(0.50)},
                {"p90", rank(0.90)},
                {"p99", rank(0.99)},
                {"max", ms.back()}};
}

std::string_view kind_name(QueryKind k) {
    switch (k) {
        case QueryKind::Neighborhood: return "neighborhood";
        case QueryKind::ExtendedSubgraph: return "extended_subgraph";
        case QueryKind::Stream: return "stream";
    }
    return "?";
}

}  // namespace

Graph generate_graph(const BenchConfig& config) {
    check(config);
    Rng rng(config.seed);
    Graph g;
    g.reserve(config.nodes, config.edges);
    std::vector<NamespaceId> spaces;
    for (std::size_t i = 0; i < config.namespaces; ++i) {
        spaces.push_back(g.add_namespace("ns" + std::to_string(i), NamespaceKind::EntityClass));
    }
    for (std::size_t i = 0; i < config.nodes; ++i) {
        g.add_entity(spaces[i % spaces.size()], "n" + std::to_string(i));
    }
    const std::string kind(kinds::kAssociative);
    for (std::size_t i = 0; i < config.edges; ++i) {
        auto [a, b] = distinct_pair(rng, config.nodes);
        g.add_relation(a, b, kind);
    }
    return g;
}

std::vector<Query> generate_queries(const BenchConfig& config) {
    check(config);
    // A separate stream so the query sequence does not depend on the edge count.
    Rng rng(config.seed ^ 0x5bd1e995ULL);
    std::vector<Query> out;
    out.reserve(config.queries);
    for (std::size_t i = 0; i < config.queries; ++i) {
        const auto roll = rng.below(10);
        auto [a, b] = distinct_pair(rng, config.nodes);
        if (roll < 8) {
            out.push_back({QueryKind::Neighborhood, a, EntityId{}});
        } else if (roll < 9) {
            out.push_back({QueryKind::ExtendedSubgraph, a, EntityId{}});
        } else {
            out.push_back({QueryKind::Stream, a, b});
        }
    }
    return out;
}

std::uint64_t workload_hash(const std::vector<Query>& queries) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& q : queries) {
        mix(static_cast<std::uint64_t>(q.kind), 1);
        mix(q.a.value, 4);
        mix(q.b.value, 4);
    }
    return h;
}

json run(const BenchConfig& config) {
    using clock = std::chrono::steady_clock;
    auto since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    const auto t_all = clock::now();
    auto t0 = clock::now();
    Graph g = generate_graph(config);
    const double build_ms = since(t0);
    t0 = clock::now();
    ContextMap contexts = ContextMap::from_graph(g);
    const double context_ms = since(t0);

    auto queries = generate_queries(config);
    std::vector<double> times[3];
    std::size_t checksum = 0;
    for (const auto& q : queries) {
        t0 = clock::now();
        switch (q.kind) {
            case QueryKind::Neighborhood:
                checksum += g.neighbors(q.a).size();
                break;
            case QueryKind::ExtendedSubgraph: {
                EntityId v[] = {q.a};
                checksum += extended_induced_subgraph(contexts, v, ExtensionMode::VertexContextsOnly).relations.size();
                break;
            }
            case QueryKind::Stream: {
                PathQuery pq;
                pq.from = q.a;
                pq.to = q.b;
                pq.max_length = config.stream_max_length;
                pq.max_paths = config.stream_max_paths;
                checksum += knowledge_stream(g, pq).paths.size();
                break;
            }
        }
        times[static_cast<int>(q.kind)].push_back(since(t0));
    }

    json timings = json::object();
    for (QueryKind k : {QueryKind::Neighborhood, QueryKind::ExtendedSubgraph, QueryKind::Stream}) {
        auto& ms = times[static_cast<int>(k)];
        if (!ms.empty()) timings[std::string(kind_name(k))] = summarize(ms);
    }
    return json{{"config",
                 {{"nodes", config.nodes},
                  {"edges", config.edges},
                  {"queries", config.queries},
                  {"seed", config.seed},
                  {"stream_max_length", config.stream_max_length}}},
                {"workload_hash", workload_hash(queries)},
                {"result_checksum", checksum},
                {"graph_build_ms", build_ms},
                {"context_build_ms", context_ms},
                {"total_ms", since(t_all)},
                {"timings_ms", std::move(timings)}};
}

}  // namespace kgmdd::bench
