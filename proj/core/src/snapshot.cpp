#include "kgmdd/snapshot.hpp"

#include "kgmdd/error.hpp"

#include <fstream>
#include <sstream>

namespace kgmdd {

using nlohmann::json;

json entity_to_json(const Entity& e) {
    json meta = json::object();
    for (const auto& [k, v] : e.meta) meta[k] = v;
    return json{{"id", e.id.value},
                {"namespace", e.ns.value},
                {"label", e.preferred_label},
                {"synonyms", e.synonyms},
                {"meta", std::move(meta)}};
}

json relation_to_json(const Relation& r) {
    json prov{{"origin", to_string(r.provenance.origin)}};
    if (r.provenance.source_document) prov["source_document"] = r.provenance.source_document->value;
    if (r.provenance.derived_from) prov["derived_from"] = r.provenance.derived_from->value;
    if (!r.provenance.note.empty()) prov["note"] = r.provenance.note;
    return json{{"id", r.id.value},
                {"source", r.source.value},
                {"target", r.target.value},
                {"kind", r.kind},
                {"provenance", std::move(prov)}};
}

namespace {

json namespaces_to_json(const Graph& graph) {
    json out = json::array();
    for (const auto& ns : graph.namespaces()) {
        out.push_back(json{{"id", ns.id.value}, {"name", ns.name}, {"kind", to_string(ns.kind)}});
    }
    return out;
}

json header() {
    return json{{"format", kSnapshotFormat}, {"version", kSnapshotVersion}};
}

}  // namespace

json graph_to_json(const Graph& graph) {
    json doc = header();
    doc["namespaces"] = namespaces_to_json(graph);
    json entities = json::array();
    for (const auto& e : graph.entities()) entities.push_back(entity_to_json(e));
    json relations = json::array();
    for (const auto& r : graph.relations()) relations.push_back(relation_to_json(r));
    doc["entities"] = std::move(entities);
    doc["relations"] = std::move(relations);
    return doc;
}

json subgraph_to_json(const Graph& graph, const Subgraph& sub) {
    json doc = header();
    doc["namespaces"] = namespaces_to_json(graph);
    json entities = json::array();
    for (EntityId e : sub.entities) entities.push_back(entity_to_json(graph.entity(e)));
    json relations = json::array();
    for (RelationId r : sub.relations) relations.push_back(relation_to_json(graph.relation(r)));
    doc["entities"] = std::move(entities);
    doc["relations"] = std::move(relations);
    return doc;
}

Graph graph_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("format", std::string{}) != kSnapshotFormat) {
        throw Error(ErrorCode::SnapshotVersion, "not a kgmdd graph document", "format");
    }
    if (doc.value("version", 0) != kSnapshotVersion) {
        throw Error(ErrorCode::SnapshotVersion,
                    "unsupported snapshot version " + doc.value("version", json()).dump(), "version");
    }
    Graph graph;
    try {
        std::uint32_t expected = 0;
        for (const auto& ns : doc.at("namespaces")) {
            if (ns.at("id").get<std::uint32_t>() != expected++) {
                throw Error(ErrorCode::ParseError, "namespace ids must be dense and ordered", "namespaces");
            }
            graph.add_namespace(ns.at("name").get<std::string>(),
                                namespace_kind_from_string(ns.at("kind").get<std::string>()));
        }
        expected = 0;
        for (const auto& e : doc.at("entities")) {
            if (e.at("id").get<std::uint32_t>() != expected++) {
                throw Error(ErrorCode::ParseError, "entity ids must be dense and ordered", "entities");
            }
            Meta meta;
            const json meta_doc = e.value("meta", json::object());
            for (const auto& [k, v] : meta_doc.items()) meta[k] = v.get<std::string>();
            graph.add_entity(NamespaceId(e.at("namespace").get<std::uint32_t>()),
                             e.at("label").get<std::string>(),
                             e.value("synonyms", std::vector<std::string>{}), std::move(meta),
                             DuplicatePolicy::Reject);
        }
        expected = 0;
        for (const auto& r : doc.at("relations")) {
            if (r.at("id").get<std::uint32_t>() != expected++) {
                throw Error(ErrorCode::ParseError, "relation ids must be dense and ordered", "relations");
            }
            Provenance prov;
            const json& p = r.at("provenance");
            prov.origin = origin_from_string(p.at("origin").get<std::string>());
            if (p.contains("source_document")) {
                prov.source_document = EntityId(p["source_document"].get<std::uint32_t>());
            }
            if (p.contains("derived_from")) {
                prov.derived_from = NamespaceId(p["derived_from"].get<std::uint32_t>());
            }
            prov.note = p.value("note", std::string{});
            graph.add_relation(EntityId(r.at("source").get<std::uint32_t>()),
                               EntityId(r.at("target").get<std::uint32_t>()),
                               r.at("kind").get<std::string>(), std::move(prov));
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::ParseError, std::string("malformed graph document: ") + ex.what());
    }
    return graph;
}

std::string serialize_snapshot(const Graph& graph) {
    return graph_to_json(graph).dump() + "\n";
}

Graph parse_snapshot(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw Error(ErrorCode::ParseError, "snapshot is not valid JSON");
    }
    return graph_from_json(doc);
}

void save_snapshot(const Graph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "cannot write snapshot '" + path.string() + "'", "out");
    }
    out << serialize_snapshot(graph);
}

Graph load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidArgument, "cannot read snapshot '" + path.string() + "'", "snapshot");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_snapshot(buf.str());
}

}  // namespace kgmdd
