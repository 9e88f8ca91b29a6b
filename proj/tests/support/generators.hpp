#pragma once
// Seeded random inputs for property tests.

#include "kgmdd/graph.hpp"
#include "kgmdd/mdd.hpp"

#include <random>
#include <string>
#include <vector>

namespace kgmdd::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct RandomGraphShape {
    std::size_t max_entities = 30;
    std::size_t max_namespaces = 3;
    double edge_factor = 1.5;        // up to edge_factor * n relations
    double document_prob = 0.3;      // relation carries a source_document
    double self_loop_prob = 0.03;
    std::vector<std::string> kinds = {"associative", "hasKeyword", "childOf", "BEL:increases"};
};

inline Graph random_graph(Rng& rng, const RandomGraphShape& shape = {}) {
    Graph g;
    const std::size_t spaces = uniform(rng, 1, shape.max_namespaces);
    std::vector<NamespaceId> ns;
    for (std::size_t i = 0; i < spaces; ++i) {
        ns.push_back(g.add_namespace("ns" + std::to_string(i), NamespaceKind::EntityClass));
    }
    const std::size_t n = uniform(rng, 1, shape.max_entities);
    for (std::size_t i = 0; i < n; ++i) g.add_entity(ns[uniform(rng, 0, spaces - 1)], "e" + std::to_string(i));
    const auto m = uniform(rng, 0, static_cast<std::size_t>(shape.edge_factor * static_cast<double>(n)));
    for (std::size_t i = 0; i < m; ++i) {
        EntityId a(static_cast<std::uint32_t>(uniform(rng, 0, n - 1)));
        EntityId b(static_cast<std::uint32_t>(uniform(rng, 0, n - 1)));
        if (a == b && !coin(rng, shape.self_loop_prob)) continue;
        Provenance prov;
        if (coin(rng, shape.document_prob)) prov.source_document = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, n - 1)));
        g.add_relation(a, b, shape.kinds[uniform(rng, 0, shape.kinds.size() - 1)], prov);
    }
    return g;
}

inline std::vector<EntityId> random_subset(Rng& rng, const Graph& g, double p) {
    std::vector<EntityId> out;
    for (std::size_t i = 0; i < g.entity_count(); ++i) {
        if (coin(rng, p)) out.emplace_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

/// One namespace per layer, `width` entities each, edges between
/// consecutive layers with probability p plus a few stray edges.
inline Graph random_layered_graph(Rng& rng, std::size_t layers, std::size_t width, double p) {
    Graph g;
    std::vector<std::vector<EntityId>> members(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        auto ns = g.add_namespace("L" + std::to_string(l), NamespaceKind::EntityClass);
        const std::size_t w = uniform(rng, 1, width);
        for (std::size_t i = 0; i < w; ++i) {
            members[l].push_back(g.add_entity(ns, "l" + std::to_string(l) + "_" + std::to_string(i)));
        }
    }
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        for (EntityId a : members[l]) {
            for (EntityId b : members[l + 1]) {
                if (!coin(rng, p)) continue;
                if (coin(rng, 0.5)) {
                    g.add_relation(a, b, "associative");
                } else {
                    g.add_relation(b, a, "hasKeyword");
                }
            }
        }
    }
    const std::size_t stray = uniform(rng, 0, layers * 2);
    for (std::size_t i = 0; i < stray; ++i) {
        EntityId a(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
        EntityId b(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
        if (a != b) g.add_relation(a, b, "associative");
    }
    return g;
}

/// Random DAG over n entities (edges only from lower to higher index, so
/// index order is topological).
inline Graph random_dag(Rng& rng, std::size_t n, double p) {
    Graph g;
    auto ns = g.add_namespace("pathway", NamespaceKind::EntityClass);
    for (std::size_t i = 0; i < n; ++i) g.add_entity(ns, "v" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coin(rng, p)) g.add_relation(EntityId(static_cast<std::uint32_t>(i)), EntityId(static_cast<std::uint32_t>(j)), "increases");
        }
    }
    return g;
}

/// Random domain sizes with a bounded number of assignments.
inline std::vector<std::size_t> random_domains(Rng& rng, std::size_t max_vars, std::size_t max_size,
                                               std::size_t max_assignments) {
    std::vector<std::size_t> out;
    std::size_t product = 1;
    const std::size_t k = uniform(rng, 1, max_vars);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t d = uniform(rng, 1, max_size);
        while (d > 1 && product * d > max_assignments) --d;
        product *= d;
        out.push_back(d);
    }
    return out;
}

inline std::shared_ptr<mdd::Manager> manager_for(const std::vector<std::size_t>& domains) {
    std::vector<mdd::VariableSpec> vars;
    for (std::size_t i = 0; i < domains.size(); ++i) vars.push_back(mdd::plain_variable("x" + std::to_string(i), domains[i]));
    return mdd::Manager::create(std::move(vars));
}

/// Truth table indexed in mixed radix, first variable most significant,
/// so index order is lexicographic assignment order.
struct TruthTable {
    std::vector<std::size_t> domains;
    std::vector<bool> values;
};

inline std::size_t table_size(const std::vector<std::size_t>& domains) {
    std::size_t n = 1;
    for (auto d : domains) n *= d;
    return n;
}

inline mdd::Assignment assignment_at(const std::vector<std::size_t>& domains, std::size_t index) {
    mdd::Assignment a(domains.size());
    for (std::size_t i = domains.size(); i-- > 0;) {
        a[i] = static_cast<std::uint32_t>(index % domains[i]);
        index /= domains[i];
    }
    return a;
}

inline TruthTable random_table(Rng& rng, const std::vector<std::size_t>& domains) {
    TruthTable t{domains, {}};
    const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t i = 0; i < table_size(domains); ++i) t.values.push_back(coin(rng, density));
    return t;
}

}  // namespace kgmdd::testing
