#include "kgmdd/ingest.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace kgmdd {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path, const char* param) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path.string() + "'", param);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    for (auto part : split(s, '|')) {
        part = trim(part);
        if (!part.empty()) out.emplace_back(part);
    }
    return out;
}

struct Concept {
    std::string id;
    std::string label;
    std::vector<std::string> synonyms;
    std::vector<std::string> parents;
    std::size_t line = 0;
};

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, std::string(source) + ":" + std::to_string(line) + ": " + what,
                "line " + std::to_string(line));
}

std::vector<Concept> parse_tsv(std::string_view text, std::string_view source) {
    std::vector<Concept> out;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || trim(line).front() == '#') continue;
        auto cols = split(line, '\t');
        if (trim(cols[0]) == "id" && cols.size() > 1 && trim(cols[1]) == "preferred_label") continue;
        if (cols.size() < 2) parse_error(source, line_no, "expected at least 2 tab-separated columns");
        if (cols.size() > 4) parse_error(source, line_no, "expected at most 4 tab-separated columns");
        Concept c;
        c.id = std::string(trim(cols[0]));
        c.label = std::string(trim(cols[1]));
        if (c.id.empty()) parse_error(source, line_no, "empty concept id");
        if (c.label.empty()) parse_error(source, line_no, "empty preferred label");
        if (cols.size() > 2) c.synonyms = split_list(cols[2]);
        if (cols.size() > 3) c.parents = split_list(cols[3]);
        c.line = line_no;
        out.push_back(std::move(c));
    }
    return out;
}

std::string obo_synonym(std::string_view value) {
    value = trim(value);
    if (!value.empty() && value.front() == '"') {
        auto close = value.find('"', 1);
        if (close != std::string_view::npos) return std::string(value.substr(1, close - 1));
    }
    return std::string(value);
}

std::vector<Concept> parse_obo(std::string_view text, std::string_view source) {
    std::vector<Concept> out;
    std::optional<Concept> current;
    bool in_term = false;
    auto flush = [&]() {
        if (current) {
            if (current->id.empty()) parse_error(source, current->line, "[Term] without id");
            if (current->label.empty()) parse_error(source, current->line, "[Term] without name");
            out.push_back(std::move(*current));
            current.reset();
        }
    };
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '!') continue;
        if (line.front() == '[') {
            flush();
            if (line.back() != ']') parse_error(source, line_no, "malformed stanza header");
            in_term = line == "[Term]";
            if (in_term) {
                current = Concept{};
                current->line = line_no;
            }
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos) parse_error(source, line_no, "expected 'key: value'");
        if (!in_term) continue;
        auto key = trim(line.substr(0, colon));
        auto value = trim(line.substr(colon + 1));
        if (auto bang = value.find(" !"); bang != std::string_view::npos && key != "name") {
            value = trim(value.substr(0, bang));
        }
        if (key == "id") {
            current->id = std::string(value);
        } else if (key == "name") {
            current->label = std::string(value);
        } else if (key == "synonym") {
            auto syn = obo_synonym(value);
            if (!syn.empty()) current->synonyms.push_back(std::move(syn));
        } else if (key == "is_a") {
            if (value.empty()) parse_error(source, line_no, "empty is_a");
            current->parents.emplace_back(value);
        }
    }
    flush();
    return out;
}

void check_local_cycles(const std::vector<Concept>& concepts,
                        const std::unordered_map<std::string, std::size_t>& index) {
    std::vector<int> color(concepts.size(), 0);
    std::vector<std::size_t> stack;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        color[i] = 1;
        stack.push_back(i);
        for (const auto& p : concepts[i].parents) {
            auto it = index.find(p);
            if (it == index.end()) continue;
            std::size_t j = it->second;
            if (color[j] == 1) {
                std::string path;
                auto from = std::find(stack.begin(), stack.end(), j);
                for (auto k = from; k != stack.end(); ++k) path += concepts[*k].id + " -> ";
                path += concepts[j].id;
                throw Error(ErrorCode::CycleDetected, "hierarchy cycle: " + path, concepts[j].id);
            }
            if (color[j] == 0) visit(j);
        }
        stack.pop_back();
        color[i] = 2;
    };
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (color[i] == 0) visit(i);
    }
}

}  // namespace

TerminologyFormat terminology_format_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".obo" ? TerminologyFormat::OboLike : TerminologyFormat::FlatTSV;
}

NamespaceId load_terminology(Graph& graph, const std::filesystem::path& path, TerminologyFormat format,
                             TerminologyOptions options) {
    if (options.name.empty()) options.name = path.stem().string();
    return load_terminology_text(graph, read_file(path, "terminology"), format, std::move(options),
                                 path.string());
}

NamespaceId load_terminology_text(Graph& graph, std::string_view text, TerminologyFormat format,
                                  TerminologyOptions options, std::string_view source_name) {
    if (options.name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "terminology needs a namespace name", "name");
    }
    auto concepts = format == TerminologyFormat::FlatTSV ? parse_tsv(text, source_name)
                                                         : parse_obo(text, source_name);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (!index.emplace(concepts[i].id, i).second) {
            parse_error(source_name, concepts[i].line, "duplicate concept id '" + concepts[i].id + "'");
        }
    }
    auto existing = graph.find_namespace(options.name);
    for (const auto& c : concepts) {
        for (const auto& p : c.parents) {
            if (index.contains(p)) continue;
            if (existing && graph.find_by_identifier(*existing, p)) continue;
            throw Error(ErrorCode::UnresolvedParent,
                        std::string(source_name) + ":" + std::to_string(c.line) + ": parent '" + p +
                            "' of '" + c.id + "' is not defined",
                        p);
        }
    }
    check_local_cycles(concepts, index);

    NamespaceKind kind = options.kind.value_or(format == TerminologyFormat::FlatTSV ? NamespaceKind::Terminology
                                                                                     : NamespaceKind::Ontology);
    NamespaceId ns = graph.ensure_namespace(options.name, kind);
    std::vector<EntityId> ids;
    ids.reserve(concepts.size());
    for (const auto& c : concepts) {
        Meta meta{{std::string(kIdentifierKey), c.id}};
        ids.push_back(graph.add_entity(ns, c.label, c.synonyms, std::move(meta), options.policy));
    }
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        for (const auto& p : concepts[i].parents) {
            auto it = index.find(p);
            EntityId parent = it != index.end() ? ids[it->second] : *graph.find_by_identifier(ns, p);
            if (parent == ids[i]) {
                throw Error(ErrorCode::CycleDetected, "hierarchy cycle: " + concepts[i].id + " -> " + p, p);
            }
            graph.ensure_relation(ids[i], parent, std::string(kinds::kChildOf));
        }
    }
    (void)graph.hierarchy_order(ns);
    return ns;
}

std::size_t IngestReport::entity_total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : entities_by_namespace) n += c;
    return n;
}

std::size_t IngestReport::relation_total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : relations_by_kind) n += c;
    return n;
}

json IngestReport::to_json() const {
    json unresolved_json = json::array();
    for (const auto& u : unresolved) {
        unresolved_json.push_back({{"doc_id", u.doc_id}, {"field", u.field}, {"reference", u.reference}});
    }
    return json{{"entities_by_namespace", entities_by_namespace},
                {"relations_by_kind", relations_by_kind},
                {"entity_total", entity_total()},
                {"relation_total", relation_total()},
                {"entities_added", entities_added},
                {"relations_added", relations_added},
                {"unresolved", std::move(unresolved_json)}};
}

IngestReport tally(const Graph& graph) {
    IngestReport report;
    for (const auto& ns : graph.namespaces()) report.entities_by_namespace[ns.name] = ns.members.size();
    for (const auto& r : graph.relations()) ++report.relations_by_kind[r.kind];
    return report;
}

namespace {

struct ConceptRef {
    std::string ns;
    std::string concept_id;
};

struct AuthorRecord {
    std::string name;
    std::vector<std::string> affiliations;
};

struct AnnotationRecord {
    ConceptRef target;
    std::optional<std::string> offset;
};

struct BelRecord {
    ConceptRef subject;
    std::string predicate;
    ConceptRef object;
    std::string evidence;
};

struct CorpusRecord {
    std::string doc_id;
    std::string origin;
    std::string title;
    std::vector<std::string> article_types;
    std::vector<AuthorRecord> authors;
    std::vector<std::string> keywords;
    std::vector<std::string> citations;
    std::vector<AnnotationRecord> annotations;
    std::vector<BelRecord> bel_triples;
    std::size_t line = 0;
};

std::vector<std::string> string_list(const json& j, const char* key, std::string_view source, std::size_t line) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) parse_error(source, line, std::string("'") + key + "' must be an array");
    for (const auto& v : j[key]) {
        if (!v.is_string()) parse_error(source, line, std::string("'") + key + "' must contain strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

ConceptRef parse_bel_term(const json& v, std::string_view source, std::size_t line) {
    if (!v.is_string()) parse_error(source, line, "BEL terms must be strings of the form namespace:concept");
    auto s = v.get<std::string>();
    if (s.find('(') != std::string::npos || s.find(')') != std::string::npos) {
        throw Error(ErrorCode::UnsupportedBelTerm,
                    std::string(source) + ":" + std::to_string(line) + ": nested BEL term '" + s +
                        "' is not supported; use namespace:concept",
                    s);
    }
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size()) {
        parse_error(source, line, "BEL term '" + s + "' must be namespace:concept");
    }
    return ConceptRef{s.substr(0, colon), s.substr(colon + 1)};
}

CorpusRecord parse_record(const json& j, std::string_view source, std::size_t line) {
    if (!j.is_object()) parse_error(source, line, "record must be a JSON object");
    CorpusRecord rec;
    rec.line = line;
    try {
        if (!j.contains("doc_id") || !j["doc_id"].is_string() || j["doc_id"].get<std::string>().empty()) {
            parse_error(source, line, "record needs a non-empty string doc_id");
        }
        rec.doc_id = j["doc_id"].get<std::string>();
        rec.origin = j.value("origin", std::string{});
        rec.title = j.value("title", std::string{});
        rec.article_types = string_list(j, "article_types", source, line);
        rec.keywords = string_list(j, "keywords", source, line);
        rec.citations = string_list(j, "citations", source, line);
        for (const auto& a : j.value("authors", json::array())) {
            AuthorRecord author;
            author.name = a.at("name").get<std::string>();
            if (author.name.empty()) parse_error(source, line, "author name must be non-empty");
            author.affiliations = string_list(a, "affiliations", source, line);
            rec.authors.push_back(std::move(author));
        }
        for (const auto& a : j.value("annotations", json::array())) {
            AnnotationRecord ann;
            ann.target = ConceptRef{a.at("namespace").get<std::string>(), a.at("concept_id").get<std::string>()};
            if (a.contains("offset") && !a["offset"].is_null()) {
                ann.offset = a["offset"].is_string() ? a["offset"].get<std::string>() : a["offset"].dump();
            }
            rec.annotations.push_back(std::move(ann));
        }
        for (const auto& b : j.value("bel_triples", json::array())) {
            BelRecord bel;
            bel.subject = parse_bel_term(b.at("subject"), source, line);
            bel.object = parse_bel_term(b.at("object"), source, line);
            bel.predicate = b.at("predicate").get<std::string>();
            if (bel.predicate.empty() || bel.predicate.find_first_of(" ()") != std::string::npos) {
                parse_error(source, line, "invalid BEL predicate '" + bel.predicate + "'");
            }
            bel.evidence = b.value("evidence", rec.doc_id);
            rec.bel_triples.push_back(std::move(bel));
        }
    } catch (const json::exception& ex) {
        parse_error(source, line, ex.what());
    }
    return rec;
}

std::optional<EntityId> resolve_concept(const Graph& graph, NamespaceId ns, const std::string& id) {
    if (auto e = graph.find_by_identifier(ns, id)) return e;
    return graph.find_entity(ns, id);
}

}  // namespace

IngestReport ingest_corpus(Graph& graph, const std::filesystem::path& path, const IngestOptions& options) {
    return ingest_corpus_text(graph, read_file(path, "corpus"), options, path.string());
}

IngestReport ingest_corpus_text(Graph& graph, std::string_view jsonl, const IngestOptions& options,
                                std::string_view source_name) {
    std::vector<CorpusRecord> records;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (auto raw : split(jsonl, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) parse_error(source_name, line_no, "invalid JSON");
        auto rec = parse_record(j, source_name, line_no);
        if (!seen.insert(rec.doc_id).second) {
            parse_error(source_name, line_no, "duplicate doc_id '" + rec.doc_id + "'");
        }
        records.push_back(std::move(rec));
    }

    // Every referenced terminology must already be loaded; checked up front
    // so a failing run leaves the graph untouched.
    auto require_ns = [&](const std::string& name, std::size_t line) {
        auto ns = graph.find_namespace(name);
        if (!ns) {
            throw Error(ErrorCode::MissingTerminology,
                        std::string(source_name) + ":" + std::to_string(line) + ": terminology '" + name +
                            "' is not loaded",
                        name);
        }
        return *ns;
    };
    for (const auto& rec : records) {
        if (!rec.keywords.empty()) require_ns(options.keyword_namespace, rec.line);
        for (const auto& a : rec.annotations) require_ns(a.target.ns, rec.line);
        for (const auto& b : rec.bel_triples) {
            require_ns(b.subject.ns, rec.line);
            require_ns(b.object.ns, rec.line);
        }
    }

    const std::size_t entities_before = graph.entity_count();
    const std::size_t relations_before = graph.relation_count();
    std::vector<UnresolvedReference> unresolved;

    auto doc_ns = graph.ensure_namespace(corpus_ns::kDocument, NamespaceKind::EntityClass);
    auto origin_ns = graph.ensure_namespace(corpus_ns::kOrigin, NamespaceKind::EntityClass);
    auto author_ns = graph.ensure_namespace(corpus_ns::kAuthor, NamespaceKind::EntityClass);
    auto affiliation_ns = graph.ensure_namespace(corpus_ns::kAffiliation, NamespaceKind::EntityClass);
    auto type_ns = graph.ensure_namespace(corpus_ns::kArticleType, NamespaceKind::EntityClass);

    std::vector<EntityId> docs;
    for (const auto& rec : records) {
        Meta meta{{std::string(kIdentifierKey), rec.doc_id}};
        if (!rec.title.empty()) meta.emplace("dc:title", rec.title);
        docs.push_back(graph.add_entity(doc_ns, rec.doc_id, {}, std::move(meta), options.policy));
    }

    const std::string is_author(kinds::kIsAuthor);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        EntityId doc = docs[i];
        if (!rec.origin.empty()) {
            auto o = graph.add_entity(origin_ns, rec.origin);
            graph.ensure_relation(doc, o, std::string(kinds::kHasOrigin));
        }
        for (const auto& t : rec.article_types) {
            auto e = graph.add_entity(type_ns, t);
            graph.ensure_relation(doc, e, std::string(kinds::kHasType));
        }
        for (const auto& a : rec.authors) {
            auto author = graph.add_entity(author_ns, a.name);
            graph.ensure_relation(author, doc, is_author);
            for (const auto& aff : a.affiliations) {
                auto e = graph.add_entity(affiliation_ns, aff);
                graph.ensure_relation(author, e, std::string(kinds::kHasAffiliation));
            }
        }
        if (!rec.keywords.empty()) {
            auto kw_ns = *graph.find_namespace(options.keyword_namespace);
            for (const auto& kw : rec.keywords) {
                if (auto e = resolve_concept(graph, kw_ns, kw)) {
                    graph.ensure_relation(doc, *e, std::string(kinds::kHasKeyword));
                } else {
                    unresolved.push_back({rec.doc_id, "keywords", kw});
                }
            }
        }
        for (const auto& cited : rec.citations) {
            auto target = graph.find_by_identifier(doc_ns, cited);
            if (target && *target != doc) {
                graph.ensure_relation(doc, *target, std::string(kinds::kHasCitation));
            } else {
                unresolved.push_back({rec.doc_id, "citations", cited});
            }
        }
        for (const auto& ann : rec.annotations) {
            auto ns = *graph.find_namespace(ann.target.ns);
            if (auto e = resolve_concept(graph, ns, ann.target.concept_id)) {
                Provenance prov;
                if (ann.offset) prov.note = "offset=" + *ann.offset;
                graph.ensure_relation(doc, *e, std::string(kinds::kHasAnnotation), std::move(prov));
            } else {
                unresolved.push_back({rec.doc_id, "annotations", ann.target.ns + ":" + ann.target.concept_id});
            }
        }
        for (const auto& bel : rec.bel_triples) {
            auto s = resolve_concept(graph, *graph.find_namespace(bel.subject.ns), bel.subject.concept_id);
            auto o = resolve_concept(graph, *graph.find_namespace(bel.object.ns), bel.object.concept_id);
            auto evidence = graph.find_by_identifier(doc_ns, bel.evidence);
            if (!s) unresolved.push_back({rec.doc_id, "bel_triples", bel.subject.ns + ":" + bel.subject.concept_id});
            if (!o) unresolved.push_back({rec.doc_id, "bel_triples", bel.object.ns + ":" + bel.object.concept_id});
            if (!evidence) unresolved.push_back({rec.doc_id, "bel_triples", bel.evidence});
            if (!s || !o || !evidence) continue;
            std::string kind = std::string(kinds::kBelPrefix) + bel.predicate;
            bool present = false;
            for (RelationId r : graph.out_relations(*s)) {
                const Relation& rel = graph.relation(r);
                if (rel.target == *o && rel.kind == kind && rel.provenance.source_document == evidence) {
                    present = true;
                    break;
                }
            }
            if (!present) {
                Provenance prov;
                prov.source_document = *evidence;
                graph.add_relation(*s, *o, std::move(kind), std::move(prov));
            }
        }
    }

    IngestReport report = tally(graph);
    report.entities_added = graph.entity_count() - entities_before;
    report.relations_added = graph.relation_count() - relations_before;
    report.unresolved = std::move(unresolved);
    return report;
}

IngestReport derive_meta_relations(Graph& graph) {
    const std::size_t entities_before = graph.entity_count();
    const std::size_t relations_before = graph.relation_count();

    // Groups of authors hanging off one shared entity.
    std::map<EntityId, std::vector<EntityId>> by_affiliation;
    std::map<EntityId, std::vector<EntityId>> by_document;
    for (const Relation& r : graph.relations()) {
        if (r.kind == kinds::kHasAffiliation) by_affiliation[r.target].push_back(r.source);
        if (r.kind == kinds::kIsAuthor) by_document[r.target].push_back(r.source);
    }
    auto link_all = [&](std::map<EntityId, std::vector<EntityId>>& groups, std::string_view kind) {
        for (auto& [_, members] : groups) {
            std::sort(members.begin(), members.end());
            members.erase(std::unique(members.begin(), members.end()), members.end());
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    Provenance prov;
                    prov.origin = Origin::DerivedMeta;
                    graph.ensure_relation(members[i], members[j], std::string(kind), std::move(prov));
                }
            }
        }
    };
    link_all(by_affiliation, kinds::kSameAffiliation);
    link_all(by_document, kinds::kIsCoAuthor);

    IngestReport report = tally(graph);
    report.entities_added = graph.entity_count() - entities_before;
    report.relations_added = graph.relation_count() - relations_before;
    return report;
}

}  // namespace kgmdd
