#include "kgmdd/bench.hpp"
#include "kgmdd/compile.hpp"
#include "kgmdd/context.hpp"
#include "kgmdd/mdd.hpp"
#include "kgmdd/validation.hpp"

#include <benchmark/benchmark.h>

using namespace kgmdd;

namespace {

const Graph& dense_graph() {
    static const Graph g = [] {
        bench::BenchConfig c;
        c.nodes = 20000;
        c.edges = 200000;
        return bench::generate_graph(c);
    }();
    return g;
}

// Layered DAG: `width` entities per layer, every entity feeds the next layer.
Graph layered_pathway(std::size_t layers, std::size_t width) {
    Graph g;
    auto ns = g.add_namespace("pathway", NamespaceKind::EntityClass);
    auto source = g.add_entity(ns, "source");
    std::vector<EntityId> previous{source};
    for (std::size_t l = 0; l < layers; ++l) {
        std::vector<EntityId> current;
        for (std::size_t i = 0; i < width; ++i) {
            current.push_back(g.add_entity(ns, "v" + std::to_string(l) + "_" + std::to_string(i)));
        }
        for (EntityId a : previous) {
            for (EntityId b : current) g.add_relation(a, b, "BEL:increases");
        }
        previous = current;
    }
    auto sink = g.add_entity(ns, "sink");
    for (EntityId a : previous) g.add_relation(a, sink, "BEL:increases");
    return g;
}

void BM_Neighbors(benchmark::State& state) {
    const Graph& g = dense_graph();
    std::uint32_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.neighbors(EntityId(i)));
        i = (i + 7919) % static_cast<std::uint32_t>(g.entity_count());
    }
}
BENCHMARK(BM_Neighbors);

void BM_ExtendedSubgraph(benchmark::State& state) {
    const Graph& g = dense_graph();
    static const ContextMap contexts = ContextMap::from_graph(g);
    std::uint32_t i = 0;
    for (auto _ : state) {
        EntityId v[] = {EntityId(i)};
        benchmark::DoNotOptimize(extended_induced_subgraph(contexts, v, ExtensionMode::WithEdgeContexts));
        i = (i + 7919) % static_cast<std::uint32_t>(g.entity_count());
    }
}
BENCHMARK(BM_ExtendedSubgraph);

void BM_KnowledgeStream(benchmark::State& state) {
    const Graph& g = dense_graph();
    std::uint32_t i = 0;
    for (auto _ : state) {
        PathQuery q;
        q.from = EntityId(i);
        q.to = EntityId((i + 1) % static_cast<std::uint32_t>(g.entity_count()));
        q.max_length = static_cast<std::size_t>(state.range(0));
        q.max_paths = 1000;
        benchmark::DoNotOptimize(knowledge_stream(g, q));
        i = (i + 7919) % static_cast<std::uint32_t>(g.entity_count());
    }
}
BENCHMARK(BM_KnowledgeStream)->Arg(2)->Arg(3);

void BM_ApplyUnion(benchmark::State& state) {
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    std::vector<mdd::VariableSpec> vars;
    for (std::size_t i = 0; i < k; ++i) vars.push_back(mdd::plain_variable("x" + std::to_string(i), 4));
    for (auto _ : state) {
        state.PauseTiming();
        auto mgr = mdd::Manager::create(vars);
        state.ResumeTiming();
        mdd::Mdd acc = mgr->constant(false);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            std::uint32_t v = static_cast<std::uint32_t>(i % 4);
            auto term = mdd::apply(mdd::Op::Intersection, mgr->literal(i, std::span(&v, 1)), mgr->literal(i + 1, std::span(&v, 1)));
            acc = mdd::apply(mdd::Op::Union, acc, term);
        }
        benchmark::DoNotOptimize(acc.root());
    }
}
BENCHMARK(BM_ApplyUnion)->Arg(8)->Arg(16)->Arg(32);

void BM_CompileActivity(benchmark::State& state) {
    Graph g = layered_pathway(static_cast<std::size_t>(state.range(0)), 3);
    EntityId source(0), sink(static_cast<std::uint32_t>(g.entity_count() - 1));
    for (auto _ : state) benchmark::DoNotOptimize(compile_activity(g, source, sink).root());
}
BENCHMARK(BM_CompileActivity)->Arg(2)->Arg(4)->Arg(6);

void BM_ValidateInfluence(benchmark::State& state) {
    Graph g = layered_pathway(3, 4);
    PathQuery q;
    q.from = EntityId(0);
    q.to = EntityId(static_cast<std::uint32_t>(g.entity_count() - 1));
    q.max_length = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(validate_influence(g, q).root());
}
BENCHMARK(BM_ValidateInfluence)->Arg(4)->Arg(5);

}  // namespace
BENCHMARK_MAIN();
