#include "fixtures.hpp"
#include "oracles.hpp"

#include "kgmdd/error.hpp"
#include "kgmdd/ingest.hpp"
#include "kgmdd/snapshot.hpp"

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

TerminologyOptions named(std::string name) {
    TerminologyOptions o;
    o.name = std::move(name);
    return o;
}

Graph with_mesh() {
    Graph g;
    load_terminology(g, fixture_path("mesh.tsv"), TerminologyFormat::FlatTSV);
    return g;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("terminology formats and namespace naming") {
    CHECK(terminology_format_for("x/go.obo") == TerminologyFormat::OboLike);
    CHECK(terminology_format_for("mesh.tsv") == TerminologyFormat::FlatTSV);

    Graph g;
    auto mesh = load_terminology(g, fixture_path("mesh.tsv"), TerminologyFormat::FlatTSV);
    auto go = load_terminology(g, fixture_path("go.obo"), TerminologyFormat::OboLike);
    CHECK(g.namespace_(mesh).name == "mesh");
    CHECK(g.namespace_(mesh).kind == NamespaceKind::Terminology);
    CHECK(g.namespace_(go).name == "go");
    CHECK(g.namespace_(go).kind == NamespaceKind::Ontology);
    CHECK(g.namespace_(mesh).members.size() == 12);
    CHECK(g.namespace_(go).members.size() == 4);
    auto glu = g.find_by_identifier(mesh, "D008");
    REQUIRE(glu);
    CHECK(g.entity(*glu).preferred_label == "Glutamic Acid");
    CHECK(g.find_entity(mesh, "Glutamate") == glu);
    CHECK(g.find_entity(go, "synaptic transmission"));
}

TEST_CASE("empty terminology creates an empty namespace") {
    Graph g;
    auto ns = load_terminology_text(g, "", TerminologyFormat::FlatTSV, named("empty"));
    CHECK(g.namespace_(ns).members.empty());
    CHECK(g.entity_count() == 0);
    auto obo = load_terminology_text(g, "format-version: 1.2\n", TerminologyFormat::OboLike, named("o"));
    CHECK(g.namespace_(obo).members.empty());
}

TEST_CASE("terminology errors leave the graph untouched") {
    Graph g;
    CHECK(code_of([&] {
              load_terminology_text(g, "id\tpreferred_label\tsynonyms\tparents\nA\ta\t\tA\n", TerminologyFormat::FlatTSV,
                                    named("t"));
          }) == ErrorCode::CycleDetected);
    CHECK(code_of([&] {
              load_terminology_text(g, "A\ta\t\tB\nB\tb\t\tA\n", TerminologyFormat::FlatTSV, named("t"));
          }) == ErrorCode::CycleDetected);
    CHECK(code_of([&] {
              load_terminology_text(g, "A\ta\t\tZ\n", TerminologyFormat::FlatTSV, named("t"));
          }) == ErrorCode::UnresolvedParent);
    CHECK(code_of([&] {
              load_terminology_text(g, "[Term]\nid: X\nname: x\nis_a: Y\n", TerminologyFormat::OboLike, named("t"));
          }) == ErrorCode::UnresolvedParent);
    CHECK(code_of([&] {
              load_terminology_text(g, "A\ta\t\t\nA\tb\t\t\n", TerminologyFormat::FlatTSV, named("t"));
          }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_terminology(g, fixture_path("missing.tsv"), TerminologyFormat::FlatTSV); }) ==
          ErrorCode::InvalidArgument);
    CHECK(g.entity_count() == 0);
    CHECK(g.namespace_count() == 0);
}

TEST_CASE("fixture corpus tallies") {
    Graph g = fixture_corpus_graph(false);
    IngestReport before = tally(g);
    CHECK(before.entity_total() == 32);
    CHECK(before.relation_total() == 54);
    CHECK(before.entities_by_namespace.at("mesh") == 12);
    CHECK(before.entities_by_namespace.at("go") == 4);
    CHECK(before.entities_by_namespace.at("document") == 6);
    CHECK(before.entities_by_namespace.at("origin") == 2);
    CHECK(before.entities_by_namespace.at("author") == 4);
    CHECK(before.entities_by_namespace.at("affiliation") == 2);
    CHECK(before.entities_by_namespace.at("article_type") == 2);
    CHECK(before.relations_by_kind.at("childOf") == 14);
    CHECK(before.relations_by_kind.at("hasOrigin") == 6);
    CHECK(before.relations_by_kind.at("hasType") == 7);
    CHECK(before.relations_by_kind.at("isAuthor") == 10);
    CHECK(before.relations_by_kind.at("hasAffiliation") == 4);
    CHECK(before.relations_by_kind.at("hasKeyword") == 6);
    CHECK(before.relations_by_kind.at("hasCitation") == 3);
    CHECK(before.relations_by_kind.at("hasAnnotation") == 2);
    CHECK(before.relations_by_kind.at("BEL:increases") == 2);

    IngestReport derived = derive_meta_relations(g);
    CHECK(derived.relations_added == 6);
    IngestReport after = tally(g);
    CHECK(after.relation_total() == 60);
    CHECK(after.relations_by_kind.at("sameAffiliation") == 2);
    CHECK(after.relations_by_kind.at("isCoAuthor") == 4);
}

TEST_CASE("corpus report lists unresolved references") {
    Graph g = with_mesh();
    auto report = ingest_corpus_text(g, R"j({"doc_id":"d1","keywords":["D001","Nope"],"citations":["d9"]})j");
    CHECK(report.unresolved.size() == 2);
    CHECK(report.unresolved[0] == UnresolvedReference{"d1", "keywords", "Nope"});
    CHECK(report.unresolved[1] == UnresolvedReference{"d1", "citations", "d9"});
    CHECK(report.to_json()["unresolved"].size() == 2);
}

TEST_CASE("BEL evidence becomes the relation's source document") {
    Graph g = fixture_corpus_graph(false);
    auto mesh = *g.find_namespace("mesh");
    auto docs = *g.find_namespace("document");
    auto nicotine = *g.find_by_identifier(mesh, "D012");
    auto receptors = *g.find_by_identifier(mesh, "D005");
    auto rel = g.find_relation(nicotine, receptors, "BEL:increases");
    REQUIRE(rel);
    CHECK(g.relation(*rel).provenance.source_document == g.find_entity(docs, "PMID:1001"));
}

TEST_CASE("corpus errors") {
    Graph g = with_mesh();
    const std::size_t n = g.entity_count();
    CHECK(code_of([&] {
              ingest_corpus_text(g, R"j({"doc_id":"d","bel_triples":[{"subject":"p(mesh:D001)","predicate":"increases","object":"mesh:D002"}]})j");
          }) == ErrorCode::UnsupportedBelTerm);
    CHECK(code_of([&] { ingest_corpus_text(g, R"j({"doc_id":"d","annotations":[{"namespace":"go","concept_id":"GO:1"}]})j"); }) ==
          ErrorCode::MissingTerminology);
    CHECK(code_of([&] { ingest_corpus_text(g, "{\"doc_id\":\"d\"}\n{\"doc_id\":\"d\"}\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { ingest_corpus_text(g, "{oops"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { ingest_corpus_text(g, R"j({"title":"no id"})j"); }) == ErrorCode::ParseError);
    CHECK(g.entity_count() == n);

    Graph keyword_less;
    CHECK(code_of([&] { ingest_corpus_text(keyword_less, R"j({"doc_id":"d","keywords":["x"]})j"); }) ==
          ErrorCode::MissingTerminology);
}

TEST_CASE("empty corpus adds only the corpus namespaces") {
    Graph g;
    auto report = ingest_corpus_text(g, "\n\n");
    CHECK(report.entities_added == 0);
    CHECK(report.relations_added == 0);
    CHECK(g.entity_count() == 0);
}

TEST_CASE("ingest is deterministic and re-ingest is a no-op") {
    const std::string first = serialize_snapshot(fixture_corpus_graph());
    CHECK(serialize_snapshot(fixture_corpus_graph()) == first);

    Graph g = fixture_corpus_graph();
    auto again = ingest_corpus(g, fixture_path("corpus.jsonl"));
    CHECK(again.entities_added == 0);
    CHECK(again.relations_added == 0);
    CHECK(derive_meta_relations(g).relations_added == 0);
    CHECK(serialize_snapshot(g) == first);
}

TEST_CASE("derived meta relations match the pairwise oracle") {
    Graph g = fixture_corpus_graph();
    CHECK(pairs_of_kind(g, "sameAffiliation") == oracle_shared(g, "hasAffiliation", true));
    CHECK(pairs_of_kind(g, "isCoAuthor") == oracle_shared(g, "isAuthor", true));
    for (const Relation& r : g.relations()) {
        if (r.kind == "sameAffiliation" || r.kind == "isCoAuthor") {
            CHECK(r.source < r.target);
            CHECK(r.provenance.origin == Origin::DerivedMeta);
        }
    }
}

}  // TEST_SUITE
