#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include "kgmdd/error.hpp"
#include "kgmdd/validation.hpp"

#include <doctest.h>

using namespace kgmdd;
using namespace kgmdd::testing;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

std::vector<Tuple> entity_paths(const KnowledgeStream& s) {
    std::vector<Tuple> out;
    for (const auto& p : s.paths) out.push_back(p.entities);
    return out;
}

PathQuery random_query(Rng& rng, const Graph& g) {
    PathQuery q;
    q.from = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
    do {
        q.to = EntityId(static_cast<std::uint32_t>(uniform(rng, 0, g.entity_count() - 1)));
    } while (q.to == q.from);
    q.max_length = uniform(rng, 1, 4);
    q.directed = coin(rng, 0.2);
    if (coin(rng, 0.2)) q.allowed_kinds = {"associative", "childOf"};
    return q;
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("diamond: two routes of length two") {
    Diamond d = diamond();
    PathQuery q{.from = d.a, .to = d.b};
    auto shortest = shortest_path(d.graph, q);
    REQUIRE(shortest);
    CHECK(shortest->entities == Tuple{d.a, d.x, d.b});
    CHECK(shortest->relations.size() == 2);
    auto stream = knowledge_stream(d.graph, q);
    CHECK(entity_paths(stream) == std::vector<Tuple>{{d.a, d.x, d.b}, {d.a, d.y, d.b}});
    CHECK_FALSE(stream.truncated);
    auto m = validate_influence(d.graph, q);
    CHECK(mdd::count_solutions(m) == 2);
    for (const auto& a : mdd::enumerate_paths(m, 10)) {
        Path p = decode_influence_path(d.graph, q, m, a);
        CHECK(std::find(stream.paths.begin(), stream.paths.end(), p) != stream.paths.end());
    }

    q.max_length = 1;
    CHECK(knowledge_stream(d.graph, q).paths.empty());
    CHECK(mdd::count_solutions(validate_influence(d.graph, q)) == 0);
    CHECK(shortest_path(d.graph, q));  // shortest path ignores the bound
}

TEST_CASE("direction and kind filters") {
    Diamond d = diamond();
    PathQuery q{.from = d.b, .to = d.a, .directed = true};
    CHECK_FALSE(shortest_path(d.graph, q));
    CHECK(knowledge_stream(d.graph, q).paths.empty());
    q.directed = false;
    CHECK(knowledge_stream(d.graph, q).paths.size() == 2);
    q.allowed_kinds = {"childOf"};
    CHECK_FALSE(shortest_path(d.graph, q));
}

TEST_CASE("disconnected entities report NotConnected") {
    Graph g;
    auto ns = g.add_namespace("n", NamespaceKind::EntityClass);
    auto a = g.add_entity(ns, "a");
    auto b = g.add_entity(ns, "b");
    PathQuery q{.from = a, .to = b};
    CHECK_FALSE(shortest_path(g, q));
    CHECK(knowledge_stream(g, q).paths.empty());
    CHECK(validate_influence(g, q).is_false());
}

TEST_CASE("query validation") {
    Diamond d = diamond();
    CHECK(code_of([&] { shortest_path(d.graph, {.from = d.a, .to = d.a}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { knowledge_stream(d.graph, {.from = d.a, .to = d.b, .max_length = 0}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { validate_influence(d.graph, {.from = EntityId(9), .to = d.b}); }) == ErrorCode::UnknownEntity);
}

TEST_CASE("truncation keeps the lexicographic prefix") {
    Diamond d = diamond();
    PathQuery q{.from = d.a, .to = d.b, .max_paths = 1};
    auto s = knowledge_stream(d.graph, q);
    CHECK(s.truncated);
    CHECK(entity_paths(s) == std::vector<Tuple>{{d.a, d.x, d.b}});
    q.max_paths = 2;
    CHECK_FALSE(knowledge_stream(d.graph, q).truncated);
}

TEST_CASE("each hop records the smallest relation id") {
    Graph g;
    auto ns = g.add_namespace("n", NamespaceKind::EntityClass);
    auto a = g.add_entity(ns, "a");
    auto b = g.add_entity(ns, "b");
    g.add_relation(b, a, "associative");
    g.add_relation(a, b, "childOf");
    auto p = shortest_path(g, {.from = a, .to = b});
    REQUIRE(p);
    CHECK(p->relations == std::vector<RelationId>{RelationId(0)});
    auto directed = shortest_path(g, {.from = a, .to = b, .directed = true});
    REQUIRE(directed);
    CHECK(directed->relations == std::vector<RelationId>{RelationId(1)});
}

TEST_CASE("fixture corpus: author to concept") {
    Graph g = fixture_corpus_graph();
    PathQuery q;
    q.from = resolve_entity_ref(g, "author:Ada Example");
    q.to = resolve_entity_ref(g, "mesh:Glutamic Acid");
    q.max_length = 3;
    auto stream = knowledge_stream(g, q);
    CHECK(mdd::count_solutions(validate_influence(g, q)) == stream.paths.size());
    CHECK(entity_paths(stream) == oracle_paths(g, q));
    auto j = stream_to_json(g, stream);
    CHECK(j["count"] == stream.paths.size());
    CHECK(stream_to_dot(g, stream).find("penwidth=3") != std::string::npos);
    CHECK(path_to_json(g, stream.paths.at(0))["entities"].size() == stream.paths[0].entities.size());
}

TEST_CASE("property: stream, shortest path and MDD agree with brute force") {
    Rng rng(51);
    int queries = 0;
    while (queries < 150) {
        Graph g = random_graph(rng, {.max_entities = 12});
        if (g.entity_count() < 2) continue;
        PathQuery q = random_query(rng, g);
        ++queries;
        auto expect = oracle_paths(g, q);
        auto stream = knowledge_stream(g, q);
        CHECK(entity_paths(stream) == expect);
        for (const auto& p : stream.paths) {
            REQUIRE(p.relations.size() + 1 == p.entities.size());
            for (std::size_t i = 0; i < p.relations.size(); ++i) {
                const Relation& r = g.relation(p.relations[i]);
                CHECK(((r.source == p.entities[i] && r.target == p.entities[i + 1]) ||
                       (!q.directed && r.target == p.entities[i] && r.source == p.entities[i + 1])));
            }
        }
        auto m = validate_influence(g, q);
        CHECK(mdd::count_solutions(m) == expect.size());
        auto hops = oracle_hops(g, q);
        auto shortest = shortest_path(g, q);
        CHECK(shortest.has_value() == hops.has_value());
        if (shortest && hops) CHECK(shortest->length() == *hops);
        if (!expect.empty()) {
            std::size_t fewest = expect.front().size();
            for (const auto& t : expect) fewest = std::min(fewest, t.size());
            REQUIRE(shortest);
            CHECK(shortest->length() == fewest - 1);
        }
    }
}

TEST_CASE("property: the stream grows with the length bound") {
    Rng rng(52);
    for (int round = 0; round < 40; ++round) {
        Graph g = random_graph(rng, {.max_entities = 10});
        if (g.entity_count() < 2) continue;
        PathQuery q = random_query(rng, g);
        q.max_length = 1;
        std::size_t previous = 0;
        for (std::size_t len = 1; len <= 5; ++len) {
            q.max_length = len;
            auto size = knowledge_stream(g, q).paths.size();
            CHECK(size >= previous);
            previous = size;
        }
    }
}

}  // TEST_SUITE
