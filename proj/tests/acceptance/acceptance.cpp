// Acceptance gate. Runs every primary criterion, prints one PASS/FAIL line
// each, and exits non-zero when any criterion fails.

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include "kgmdd/bench.hpp"
#include "kgmdd/compile.hpp"
#include "kgmdd/context.hpp"
#include "kgmdd/graph_export.hpp"
#include "kgmdd/ingest.hpp"
#include "kgmdd/snapshot.hpp"
#include "kgmdd/validation.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <regex>
#include <sstream>

using namespace kgmdd;
using namespace kgmdd::testing;

namespace {

struct Outcome {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    std::string note;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        if (failures++ == 0) first_failure = what;
    }
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<void(Outcome&)> body;
};

// ------------------------------------------------------- context algebra

void context_algebra(Outcome& o) {
    Rng rng(1001);
    for (int round = 0; round < 200; ++round) {
        Graph g = random_graph(rng, {.max_entities = 30, .max_namespaces = 3});
        auto con = ContextMap::from_graph(g);
        const std::string tag = "graph " + std::to_string(round);
        for (int s = 0; s < 3; ++s) {
            auto seed = random_subset(rng, g, 0.1 + 0.2 * s);
            auto plain = extended_induced_subgraph(con, seed, ExtensionMode::VertexContextsOnly);
            auto full = extended_induced_subgraph(con, seed, ExtensionMode::WithEdgeContexts);
            o.expect(plain == oracle_extended(g, seed, false), tag + ": extended subgraph (vertex contexts)");
            o.expect(full == oracle_extended(g, seed, true), tag + ": extended subgraph (edge contexts)");
            Subgraph induced = g.induced_subgraph(seed);
            o.expect(context_hypergraph(con, induced) == oracle_hypergraph(g, induced), tag + ": hypergraph of G[E_i]");
            o.expect(context_hypergraph(con, plain) == oracle_hypergraph(g, plain), tag + ": hypergraph of extension");
        }
        for (std::size_t a = 0; a < g.namespace_count(); ++a) {
            for (std::size_t b = 0; b < g.namespace_count(); ++b) {
                if (a == b) continue;
                NamespaceId s(static_cast<std::uint32_t>(a)), t(static_cast<std::uint32_t>(b));
                for (bool source_pairs : {false, true}) {
                    auto drafts = infer_cross_context_relations(
                        con, s, t, source_pairs ? InferenceMode::SourcePairs : InferenceMode::TargetImages);
                    std::set<std::pair<EntityId, EntityId>> got;
                    for (const auto& d : drafts) got.emplace(d.source, d.target);
                    o.expect(got.size() == drafts.size() && got == oracle_inference(g, s, t, source_pairs),
                             tag + ": inference");
                }
            }
        }
    }
}

// ------------------------------------------------------------------- mdd

void mdd_canonicity(Outcome& o) {
    Rng rng(1002);
    for (int round = 0; round < 500; ++round) {
        auto domains = random_domains(rng, 6, 5, 256);
        auto mgr = manager_for(domains);
        TruthTable ta = random_table(rng, domains);
        TruthTable tb = random_table(rng, domains);
        const std::string tag = "function " + std::to_string(round);
        mdd::Mdd a = mdd::reduce(mgr, tree_from_table(ta));
        mdd::Mdd b = mdd::reduce(mgr, tree_from_table(tb));
        o.expect(table_of(a, domains) == ta.values, tag + ": reduce semantics");
        o.expect(structurally_reduced(a), tag + ": reduced form");
        o.expect(a == build_by_apply(mgr, ta), tag + ": tree-built and apply-built roots differ");
        std::vector<bool> u(ta.values.size()), i(ta.values.size()), n(ta.values.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            u[k] = ta.values[k] || tb.values[k];
            i[k] = ta.values[k] && tb.values[k];
            n[k] = !ta.values[k];
        }
        mdd::Mdd mu = mdd::apply(mdd::Op::Union, a, b);
        mdd::Mdd mi = mdd::apply(mdd::Op::Intersection, a, b);
        o.expect(table_of(mu, domains) == u, tag + ": union");
        o.expect(table_of(mi, domains) == i, tag + ": intersection");
        o.expect(table_of(mdd::negate(a), domains) == n, tag + ": negation");
        o.expect(mdd::negate(mu) == mdd::apply(mdd::Op::Intersection, mdd::negate(a), mdd::negate(b)), tag + ": De Morgan");
        o.expect(mdd::negate(mi) == mdd::apply(mdd::Op::Union, mdd::negate(a), mdd::negate(b)), tag + ": De Morgan (dual)");
        o.expect(mdd::count_solutions(a) == static_cast<std::size_t>(std::count(ta.values.begin(), ta.values.end(), true)),
                 tag + ": count");
    }
}

// ----------------------------------------------------------- compilation

std::set<mdd::Assignment> all_solutions(const mdd::Mdd& m) {
    auto v = mdd::enumerate_paths(m, static_cast<std::size_t>(-1));
    return {v.begin(), v.end()};
}

void compilation(Outcome& o) {
    Rng rng(1003);
    for (int round = 0; round < 300; ++round) {
        Graph g = random_layered_graph(rng, uniform(rng, 1, 4), 6, 0.45);
        std::vector<std::vector<EntityId>> domains;
        CompilationSpec spec;
        for (const Namespace& ns : g.namespaces()) {
            domains.push_back(ns.members);
            spec.layers.push_back({ns.name, ns.id, {}});
        }
        spec.adjacency = coin(rng, 0.3) ? Adjacency::AllPairs : Adjacency::Consecutive;
        if (coin(rng, 0.3)) spec.root_anchor = domains.front()[uniform(rng, 0, domains.front().size() - 1)];
        if (coin(rng, 0.3)) spec.end_anchor = domains.back()[uniform(rng, 0, domains.back().size() - 1)];
        auto m = compile_combinations(g, spec);
        auto expect = oracle_combinations(g, domains, spec.adjacency, spec.root_anchor, spec.end_anchor);
        o.expect(mdd_tuples(m) == expect && mdd::count_solutions(m) == expect.size(),
                 "layered graph " + std::to_string(round));
    }
    for (int round = 0; round < 100; ++round) {
        Graph g = random_layered_graph(rng, 2, 4, 0.5);
        std::vector<std::vector<EntityId>> domains;
        CompilationSpec spec;
        for (const Namespace& ns : g.namespaces()) {
            domains.push_back(ns.members);
            spec.layers.push_back({ns.name, ns.id, {}});
        }
        if (domains[0].size() < 2) continue;
        spec.cyclic = true;
        spec.root_anchor = domains[0].front();
        spec.end_anchor = domains[0].back();
        auto m = compile_combinations(g, spec);
        auto expect = oracle_routes(g, domains, Adjacency::Consecutive, *spec.root_anchor, *spec.end_anchor,
                                    domains[0].size() + domains[1].size());
        o.expect(mdd_tuples(m) == expect, "cyclic route schema " + std::to_string(round));
    }
    for (int round = 0; round < 150; ++round) {
        const std::size_t n = 2 + static_cast<std::size_t>(round) % 13;  // 2..14
        Graph g = random_dag(rng, n, 0.3);
        EntityId source(0), sink(static_cast<std::uint32_t>(n - 1));
        auto m = compile_activity(g, source, sink);
        o.expect(all_solutions(m) == oracle_activity(g, g.whole(), m, source, sink),
                 "activity DAG n=" + std::to_string(n));
    }
    Diamond d = diamond();
    auto dm = compile_activity(d.graph, d.a, d.b);
    o.expect(mdd::count_solutions(dm) == 3, "diamond fixture has exactly 3 satisfying assignments");
    o.expect(all_solutions(dm) == oracle_activity(d.graph, d.graph.whole(), dm, d.a, d.b), "diamond vs brute force");
    Nachr r = nachr();
    auto rm = compile_activity(r.graph, r.receptor, r.cognition);
    o.expect(all_solutions(rm) == oracle_activity(r.graph, r.graph.whole(), rm, r.receptor, r.cognition),
             "receptor pathway vs brute force");
    o.expect(mdd::count_solutions(rm) == 7, "receptor pathway has 7 satisfying assignments");
}

// --------------------------------------------------------- cross-module

void cross_module(Outcome& o) {
    Rng rng(1004);
    Graph fixture = fixture_corpus_graph();
    std::size_t queries = 0;
    std::size_t connected = 0;
    std::size_t total_paths = 0;
    auto check = [&](const Graph& g, const PathQuery& q, const std::string& tag) {
        ++queries;
        auto stream = knowledge_stream(g, q);
        auto m = validate_influence(g, q);
        o.expect(!stream.truncated && mdd::count_solutions(m) == stream.paths.size(), tag + ": count == |stream|");
        auto shortest = shortest_path(g, q);
        if (stream.paths.empty()) return;
        ++connected;
        total_paths += stream.paths.size();
        std::size_t fewest = stream.paths.front().length();
        for (const auto& p : stream.paths) fewest = std::min(fewest, p.length());
        o.expect(shortest && shortest->length() == fewest, tag + ": shortest == stream minimum");
    };
    for (int i = 0; i < 100; ++i) {
        PathQuery q;
        q.from = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, fixture.entity_count() - 1)));
        do {
            q.to = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, fixture.entity_count() - 1)));
        } while (q.to == q.from);
        q.max_length = uniform(rng, 1, 4);
        check(fixture, q, "fixture query " + std::to_string(i));
    }
    for (int i = 0; i < 200; ++i) {
        Graph g = random_graph(rng, {.max_entities = 15});
        if (g.entity_count() < 2) continue;
        PathQuery q;
        q.from = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
        do {
            q.to = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
        } while (q.to == q.from);
        q.max_length = uniform(rng, 1, 5);
        q.directed = coin(rng, 0.2);
        check(g, q, "random query " + std::to_string(i));
    }
    // targets drawn from the undirected ball of radius L around the source
    auto reachable = [](const Graph& g, EntityId from, std::size_t depth) {
        std::vector<std::size_t> dist(g.entity_count(), static_cast<std::size_t>(-1));
        std::vector<EntityId> frontier{from}, found;
        dist[from.value] = 0;
        for (std::size_t d = 1; d <= depth && !frontier.empty(); ++d) {
            std::vector<EntityId> next;
            for (EntityId u : frontier) {
                for (const Relation& r : g.relations()) {
                    EntityId v;
                    if (r.source == u) v = r.target;
                    else if (r.target == u) v = r.source;
                    else continue;
                    if (dist[v.value] != static_cast<std::size_t>(-1)) continue;
                    dist[v.value] = d;
                    next.push_back(v);
                    found.push_back(v);
                }
            }
            frontier = std::move(next);
        }
        return found;
    };
    for (int i = 0; i < 150; ++i) {
        const bool on_fixture = i % 2 == 0;
        Graph g = on_fixture ? fixture : random_graph(rng, {.max_entities = 15});
        if (g.entity_count() < 2) continue;
        PathQuery q;
        q.from = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
        q.max_length = uniform(rng, 1, on_fixture ? 4 : 5);
        auto ball = reachable(g, q.from, q.max_length);
        if (ball.empty()) continue;
        q.to = ball[uniform(rng, 0, ball.size() - 1)];
        check(g, q, "reachable-target query " + std::to_string(i));
    }
    o.note = std::to_string(queries) + " queries, " + std::to_string(connected) + " with paths, " +
             std::to_string(total_paths) + " paths in total";
    o.expect(connected >= 100, "at least 100 queries with a non-empty stream");
    o.expect(queries >= 100, "at least 100 queries");
}

// ------------------------------------------------------------- ingestion

void ingestion(Outcome& o) {
    Graph g = fixture_corpus_graph(false);
    auto before = tally(g);
    o.expect(before.entity_total() == 32, "entity tally 32, got " + std::to_string(before.entity_total()));
    o.expect(before.relation_total() == 54, "ingested relation tally 54, got " + std::to_string(before.relation_total()));
    derive_meta_relations(g);
    auto after = tally(g);
    o.expect(after.relation_total() == 60, "relation tally with derived edges 60, got " + std::to_string(after.relation_total()));

    const std::string first = serialize_snapshot(g);
    o.expect(serialize_snapshot(fixture_corpus_graph()) == first, "fresh re-ingest is byte-identical");
    ingest_corpus(g, fixture_path("corpus.jsonl"));
    derive_meta_relations(g);
    o.expect(serialize_snapshot(g) == first, "re-ingest into the same graph is byte-identical");

    o.expect(pairs_of_kind(g, "sameAffiliation") == oracle_shared(g, "hasAffiliation", true), "sameAffiliation oracle");
    o.expect(pairs_of_kind(g, "isCoAuthor") == oracle_shared(g, "isAuthor", true), "isCoAuthor oracle");
}

// ----------------------------------------------------------- performance

void performance(Outcome& o) {
    bench::BenchConfig c;
    c.nodes = 100000;
    c.edges = 1000000;
    c.queries = 10000;
    const auto start = std::chrono::steady_clock::now();
    auto report = bench::run(c);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double p99 = report["timings_ms"]["neighborhood"]["p99"].get<double>();
    std::ostringstream note;
    note << "wall " << wall << " s, neighborhood p99 " << p99 << " ms, stream p99 "
         << report["timings_ms"]["stream"]["p99"].get<double>() << " ms";
    o.note = note.str();
    o.expect(wall < 300.0, "bench exceeded 5 minutes");
    o.expect(p99 < 10.0, "neighborhood p99 at or above 10 ms");
}

// ---------------------------------------------------------------- export

std::string percent_decode(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

void export_round_trip(Outcome& o) {
    Rng rng(1007);
    std::vector<Graph> graphs;
    graphs.push_back(fixture_corpus_graph());
    for (int i = 0; i < 50; ++i) graphs.push_back(random_graph(rng));

    const std::regex triple(R"(^<urn:kgmdd:([^/>]+)/([^>]*)> <urn:kgmdd:rel/([^>]*)> <urn:kgmdd:([^/>]+)/([^>]*)> \.$)");
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const Graph& g = graphs[gi];
        const std::string tag = "graph " + std::to_string(gi);
        std::multiset<std::tuple<std::string, std::string, std::string, std::string, std::string>> parsed, expected;
        std::istringstream lines(export_ntriples(g));
        std::string line;
        bool well_formed = true;
        while (std::getline(lines, line)) {
            std::smatch m;
            if (!std::regex_match(line, m, triple)) {
                well_formed = false;
                break;
            }
            parsed.emplace(percent_decode(m[1]), percent_decode(m[2]), percent_decode(m[3]), percent_decode(m[4]),
                           percent_decode(m[5]));
        }
        for (const Relation& r : g.relations()) {
            const Entity& s = g.entity(r.source);
            const Entity& t = g.entity(r.target);
            expected.emplace(g.namespace_(s.ns).name, s.preferred_label, r.kind, g.namespace_(t.ns).name, t.preferred_label);
        }
        o.expect(well_formed, tag + ": malformed N-Triples line");
        o.expect(parsed.size() == g.relation_count(), tag + ": triple count != relation count");
        o.expect(parsed == expected, tag + ": triples do not match relations");

        Graph back = parse_snapshot(serialize_snapshot(g));
        bool iso = back.entity_count() == g.entity_count() && back.relation_count() == g.relation_count() &&
                   back.namespace_count() == g.namespace_count();
        for (std::size_t i = 0; iso && i < g.namespace_count(); ++i) {
            const auto& a = g.namespaces()[i];
            const auto& b = back.namespaces()[i];
            iso = a.name == b.name && a.kind == b.kind && a.members == b.members;
        }
        for (std::size_t i = 0; iso && i < g.entity_count(); ++i) {
            const auto& a = g.entities()[i];
            const auto& b = back.entities()[i];
            iso = a.ns == b.ns && a.preferred_label == b.preferred_label && a.synonyms == b.synonyms && a.meta == b.meta;
        }
        for (std::size_t i = 0; iso && i < g.relation_count(); ++i) {
            const auto& a = g.relations()[i];
            const auto& b = back.relations()[i];
            iso = a.source == b.source && a.target == b.target && a.kind == b.kind && a.provenance == b.provenance;
        }
        o.expect(iso, tag + ": JSON snapshot does not round-trip to an isomorphic graph");
    }
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"context-algebra oracle equivalence", 60, context_algebra},
        {"MDD canonicity and semantics", 60, mdd_canonicity},
        {"compilation equivalence", 120, compilation},
        {"cross-module consistency", 0, cross_module},
        {"ingestion determinism", 0, ingestion},
        {"dense-graph desk-scale performance", 300, performance},
        {"export round-trip", 0, export_round_trip},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.expect(false, "over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget");
        const bool pass = o.failures == 0;
        if (!pass) ++failed;
        std::printf("%s  [%zu] %s  (%zu/%zu checks, %.2f s%s%s)%s%s\n", pass ? "PASS" : "FAIL", i + 1, c.name.c_str(),
                    o.checks - o.failures, o.checks, secs, o.note.empty() ? "" : ", ", o.note.c_str(),
                    pass ? "" : "  first failure: ", pass ? "" : o.first_failure.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
