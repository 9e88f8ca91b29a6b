#include "kgmdd/validation.hpp"

#include "kgmdd/compile.hpp"
#include "kgmdd/error.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>

namespace kgmdd {

using nlohmann::json;

namespace {

using Hop = std::pair<EntityId, RelationId>;

// Neighbour lists under a query's kind filter and direction, built on demand.
class HopIndex {
public:
    HopIndex(const Graph& graph, const PathQuery& q) : graph_(graph), q_(q) {}

    const std::vector<Hop>& forward(EntityId u) { return lookup(forward_, u, true); }
    const std::vector<Hop>& backward(EntityId u) { return lookup(backward_, u, false); }

    std::optional<RelationId> link(EntityId u, EntityId w) {
        const auto& hops = forward(u);
        auto it = std::lower_bound(hops.begin(), hops.end(), w,
                                   [](const Hop& h, EntityId e) { return h.first < e; });
        if (it == hops.end() || it->first != w) return std::nullopt;
        return it->second;
    }

    /// Hop distances up to `bound`; farther or unreachable entities get max().
    std::vector<std::size_t> distances_from(EntityId start, bool along,
                                            std::size_t bound = std::numeric_limits<std::size_t>::max()) {
        constexpr auto inf = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> dist(graph_.entity_count(), inf);
        std::deque<EntityId> queue{start};
        dist[start.index()] = 0;
        while (!queue.empty()) {
            EntityId u = queue.front();
            queue.pop_front();
            if (dist[u.index()] >= bound) continue;
            for (const auto& [w, r] : along ? forward(u) : backward(u)) {
                if (dist[w.index()] == inf) {
                    dist[w.index()] = dist[u.index()] + 1;
                    queue.push_back(w);
                }
            }
        }
        return dist;
    }

private:
    bool allowed(const Relation& rel) const {
        return q_.allowed_kinds.empty() || q_.allowed_kinds.contains(rel.kind);
    }

    const std::vector<Hop>& lookup(std::unordered_map<EntityId, std::vector<Hop>>& cache, EntityId u, bool out) {
        if (auto it = cache.find(u); it != cache.end()) return it->second;
        std::map<EntityId, RelationId> best;
        auto take = [&](EntityId other, RelationId r) {
            if (other == u) return;
            auto [it, fresh] = best.emplace(other, r);
            if (!fresh && r < it->second) it->second = r;
        };
        const bool both = !q_.directed;
        if (out || both) {
            for (RelationId r : graph_.out_relations(u)) {
                if (allowed(graph_.relation(r))) take(graph_.relation(r).target, r);
            }
        }
        if (!out || both) {
            for (RelationId r : graph_.in_relations(u)) {
                if (allowed(graph_.relation(r))) take(graph_.relation(r).source, r);
            }
        }
        return cache.emplace(u, std::vector<Hop>(best.begin(), best.end())).first->second;
    }

    const Graph& graph_;
    const PathQuery& q_;
    std::unordered_map<EntityId, std::vector<Hop>> forward_;
    std::unordered_map<EntityId, std::vector<Hop>> backward_;
};

void check_query(const Graph& graph, const PathQuery& q) {
    if (!graph.has_entity(q.from)) {
        throw Error(ErrorCode::UnknownEntity, "unknown source entity " + std::to_string(q.from.value), "from");
    }
    if (!graph.has_entity(q.to)) {
        throw Error(ErrorCode::UnknownEntity, "unknown target entity " + std::to_string(q.to.value), "to");
    }
    if (q.from == q.to) throw Error(ErrorCode::InvalidArgument, "source and target must differ", "to");
    if (q.max_length < 1) throw Error(ErrorCode::InvalidArgument, "max_length must be at least 1", "max_length");
}

}  // namespace

std::optional<Path> shortest_path(const Graph& graph, const PathQuery& q) {
    check_query(graph, q);
    HopIndex hops(graph, q);
    auto dist = hops.distances_from(q.to, false);
    if (dist[q.from.index()] == std::numeric_limits<std::size_t>::max()) return std::nullopt;

    Path path{{q.from}, {}};
    EntityId cur = q.from;
    while (cur != q.to) {
        for (const auto& [w, r] : hops.forward(cur)) {
            if (dist[w.index()] + 1 == dist[cur.index()]) {
                path.entities.push_back(w);
                path.relations.push_back(r);
                cur = w;
                break;
            }
        }
    }
    return path;
}

KnowledgeStream knowledge_stream(const Graph& graph, const PathQuery& q) {
    check_query(graph, q);
    HopIndex hops(graph, q);
    auto to_target = hops.distances_from(q.to, false, q.max_length);

    KnowledgeStream stream;
    Path current{{q.from}, {}};
    std::vector<bool> on_path(graph.entity_count(), false);
    on_path[q.from.index()] = true;

    auto dfs = [&](auto& self, EntityId u) -> bool {
        for (const auto& [w, r] : hops.forward(u)) {
            if (on_path[w.index()]) continue;
            const std::size_t used = current.relations.size() + 1;
            if (w == q.to) {
                if (q.max_paths != 0 && stream.paths.size() == q.max_paths) {
                    stream.truncated = true;
                    return false;
                }
                Path done = current;
                done.entities.push_back(w);
                done.relations.push_back(r);
                stream.paths.push_back(std::move(done));
                continue;
            }
            const std::size_t rest = to_target[w.index()];
            if (used >= q.max_length || rest > q.max_length - used) continue;
            on_path[w.index()] = true;
            current.entities.push_back(w);
            current.relations.push_back(r);
            bool keep_going = self(self, w);
            current.entities.pop_back();
            current.relations.pop_back();
            on_path[w.index()] = false;
            if (!keep_going) return false;
        }
        return true;
    };
    dfs(dfs, q.from);
    return stream;
}

namespace {

struct HopState {
    EntityId last;
    std::vector<std::uint32_t> visited;  // sorted intermediate ids

    friend bool operator==(const HopState&, const HopState&) = default;
};

struct HopStateHash {
    std::size_t operator()(const HopState& s) const noexcept {
        std::size_t h = s.last.value;
        for (auto v : s.visited) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

}  // namespace

mdd::Mdd validate_influence(const Graph& graph, const PathQuery& q) {
    check_query(graph, q);
    HopIndex hops(graph, q);
    const std::size_t L = q.max_length;
    const std::size_t positions = L - 1;
    auto from_source = hops.distances_from(q.from, true, L);
    auto to_target = hops.distances_from(q.to, false, L);

    std::vector<std::vector<EntityId>> candidates(positions);
    for (std::size_t e = 0; e < graph.entity_count(); ++e) {
        EntityId id(static_cast<std::uint32_t>(e));
        if (id == q.from || id == q.to) continue;
        const std::size_t da = from_source[e];
        const std::size_t db = to_target[e];
        if (da == std::numeric_limits<std::size_t>::max() || db == std::numeric_limits<std::size_t>::max()) continue;
        // Position i (0-based) is hop i+1 from the source.
        for (std::size_t i = 0; i < positions; ++i) {
            if (da <= i + 1 && db <= L - (i + 1)) candidates[i].push_back(id);
        }
    }

    std::vector<mdd::VariableSpec> variables;
    for (std::size_t i = 0; i < positions; ++i) {
        variables.push_back(entity_variable(graph, "hop" + std::to_string(i + 1), candidates[i], true));
    }
    auto manager = mdd::Manager::create(std::move(variables));

    mdd::Mdd result = manager->constant(false);
    for (std::size_t len = 1; len <= L; ++len) {
        // Paths with exactly `len` hops: positions 0..len-2 carry entities,
        // the rest are skip.
        auto next = [&](std::size_t layer, const HopState& s, std::uint32_t v) -> std::optional<HopState> {
            const auto& domain = candidates[layer];
            const bool skip = v == domain.size();
            if (layer + 1 < len) {
                if (skip) return std::nullopt;
                EntityId e = domain[v];
                if (std::binary_search(s.visited.begin(), s.visited.end(), e.value)) return std::nullopt;
                if (!hops.link(s.last, e)) return std::nullopt;
                HopState out{e, s.visited};
                out.visited.insert(std::lower_bound(out.visited.begin(), out.visited.end(), e.value), e.value);
                return out;
            }
            if (!skip) return std::nullopt;
            if (layer + 1 == len) {
                if (!hops.link(s.last, q.to)) return std::nullopt;
                return HopState{q.to, {}};
            }
            return s;
        };
        auto accept = [&](const HopState& s) { return s.last == q.to || hops.link(s.last, q.to).has_value(); };
        auto part = mdd::build_top_down<HopState, HopStateHash>(manager, HopState{q.from, {}}, next, accept);
        result = mdd::apply(mdd::Op::Union, result, part);
    }
    return result;
}

Path decode_influence_path(const Graph& graph, const PathQuery& q, const mdd::Mdd& m,
                           const mdd::Assignment& assignment) {
    check_query(graph, q);
    if (assignment.size() != m.variable_count()) {
        throw Error(ErrorCode::ArityMismatch, "assignment length differs from the variable count", "assignment");
    }
    HopIndex hops(graph, q);
    Path path{{q.from}, {}};
    auto step = [&](EntityId w) {
        auto r = hops.link(path.entities.back(), w);
        if (!r) throw Error(ErrorCode::InvalidArgument, "assignment is not a path", "assignment");
        path.entities.push_back(w);
        path.relations.push_back(*r);
    };
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        auto e = value_entity(m, i, assignment[i]);
        if (!e) break;
        step(*e);
    }
    step(q.to);
    return path;
}

json path_to_json(const Graph& graph, const Path& path) {
    json entities = json::array();
    for (EntityId e : path.entities) {
        entities.push_back({{"id", e.value}, {"label", graph.entity(e).preferred_label}});
    }
    json relations = json::array();
    for (RelationId r : path.relations) {
        relations.push_back({{"id", r.value}, {"kind", graph.relation(r).kind}});
    }
    return json{{"length", path.length()}, {"entities", std::move(entities)}, {"relations", std::move(relations)}};
}

json stream_to_json(const Graph& graph, const KnowledgeStream& stream) {
    json paths = json::array();
    for (const auto& p : stream.paths) paths.push_back(path_to_json(graph, p));
    return json{{"count", stream.paths.size()}, {"truncated", stream.truncated}, {"paths", std::move(paths)}};
}

std::string stream_to_dot(const Graph& graph, const KnowledgeStream& stream) {
    std::vector<EntityId> vertices;
    std::vector<RelationId> used;
    for (const auto& p : stream.paths) {
        vertices.insert(vertices.end(), p.entities.begin(), p.entities.end());
        used.insert(used.end(), p.relations.begin(), p.relations.end());
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    Subgraph sub = graph.induced_subgraph(vertices);

    auto quote = [](std::string_view s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out + "\"";
    };
    std::string out = "digraph stream {\n  node [shape=ellipse];\n";
    for (EntityId e : sub.entities) {
        out += "  e" + std::to_string(e.value) + " [label=" + quote(graph.entity(e).preferred_label) + "];\n";
    }
    for (RelationId r : sub.relations) {
        const Relation& rel = graph.relation(r);
        out += "  e" + std::to_string(rel.source.value) + " -> e" + std::to_string(rel.target.value) +
               " [label=" + quote(rel.kind);
        if (std::binary_search(used.begin(), used.end(), r)) {
            out += ", penwidth=3, color=red";
        } else {
            out += ", style=dashed, color=gray";
        }
        out += "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace kgmdd
