#pragma once
// Small hand-built graphs and the on-disk fixture corpus.

#include "kgmdd/graph.hpp"
#include "kgmdd/ingest.hpp"

#include <filesystem>
#include <string>

#ifndef KGMDD_FIXTURE_DIR
#error "KGMDD_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace kgmdd::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(KGMDD_FIXTURE_DIR) / name;
}

/// a -> x, a -> y, x -> b, y -> b
struct Diamond {
    Graph graph;
    EntityId a, x, y, b;
};

inline Diamond diamond() {
    Diamond d;
    auto ns = d.graph.add_namespace("pathway", NamespaceKind::EntityClass);
    d.a = d.graph.add_entity(ns, "a");
    d.x = d.graph.add_entity(ns, "x");
    d.y = d.graph.add_entity(ns, "y");
    d.b = d.graph.add_entity(ns, "b");
    d.graph.add_relation(d.a, d.x, "BEL:increases");
    d.graph.add_relation(d.a, d.y, "BEL:increases");
    d.graph.add_relation(d.x, d.b, "BEL:increases");
    d.graph.add_relation(d.y, d.b, "BEL:increases");
    return d;
}

/// v0 -> v1 -> ... -> v{n-1}
inline Graph chain(std::size_t n) {
    Graph g;
    auto ns = g.add_namespace("pathway", NamespaceKind::EntityClass);
    for (std::size_t i = 0; i < n; ++i) g.add_entity(ns, "v" + std::to_string(i));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g.add_relation(EntityId(static_cast<std::uint32_t>(i)), EntityId(static_cast<std::uint32_t>(i + 1)),
                       "BEL:increases");
    }
    return g;
}

/// Receptor activity drives three transmitter systems (cholinergic also
/// drives glutamatergic); each system can induce synaptic plasticity, which
/// changes cognitive operations.
struct Nachr {
    Graph graph;
    EntityId receptor, cholinergic, glutamatergic, dopaminergic, plasticity, cognition;
};

inline Nachr nachr() {
    Nachr n;
    auto ns = n.graph.add_namespace("pathway", NamespaceKind::EntityClass);
    n.receptor = n.graph.add_entity(ns, "nAChR");
    n.cholinergic = n.graph.add_entity(ns, "cholinergic system");
    n.glutamatergic = n.graph.add_entity(ns, "glutamatergic system");
    n.dopaminergic = n.graph.add_entity(ns, "dopaminergic system");
    n.plasticity = n.graph.add_entity(ns, "synaptic plasticity");
    n.cognition = n.graph.add_entity(ns, "cognitive change");
    for (EntityId system : {n.cholinergic, n.glutamatergic, n.dopaminergic}) {
        n.graph.add_relation(n.receptor, system, "BEL:increases");
        n.graph.add_relation(system, n.plasticity, "BEL:increases");
    }
    n.graph.add_relation(n.cholinergic, n.glutamatergic, "BEL:increases");
    n.graph.add_relation(n.plasticity, n.cognition, "BEL:increases");
    return n;
}

/// MeSH + GO terminologies, the six-document corpus and derived meta edges.
inline Graph fixture_corpus_graph(bool derive = true) {
    Graph g;
    load_terminology(g, fixture_path("mesh.tsv"), TerminologyFormat::FlatTSV);
    load_terminology(g, fixture_path("go.obo"), TerminologyFormat::OboLike);
    ingest_corpus(g, fixture_path("corpus.jsonl"));
    if (derive) derive_meta_relations(g);
    return g;
}

}  // namespace kgmdd::testing
