#pragma once
// Builds the document/context graph from files: terminologies (flat TSV or
// a minimal OBO-like stanza format) and a JSON Lines corpus of document
// records with authors, affiliations, keywords, citations, ontology
// annotations and pre-extracted BEL triples.

#include "kgmdd/graph.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace kgmdd {

enum class TerminologyFormat { FlatTSV, OboLike };

/// ".obo" selects OboLike; anything else is FlatTSV.
TerminologyFormat terminology_format_for(const std::filesystem::path& path);

struct TerminologyOptions {
    std::string name;  // namespace name; empty means the file stem
    std::optional<NamespaceKind> kind;  // default: Terminology for TSV, Ontology for OBO
    DuplicatePolicy policy = DuplicatePolicy::Merge;
};

/// Concepts become entities (dc:identifier = concept id), parents become
/// childOf relations child -> parent. The whole file is validated before
/// the graph is touched.
NamespaceId load_terminology(Graph& graph, const std::filesystem::path& path, TerminologyFormat format,
                             TerminologyOptions options = {});
NamespaceId load_terminology_text(Graph& graph, std::string_view text, TerminologyFormat format,
                                  TerminologyOptions options, std::string_view source_name = "<memory>");

namespace corpus_ns {
inline constexpr std::string_view kDocument = "document";
inline constexpr std::string_view kOrigin = "origin";
inline constexpr std::string_view kAuthor = "author";
inline constexpr std::string_view kAffiliation = "affiliation";
inline constexpr std::string_view kArticleType = "article_type";
}  // namespace corpus_ns

struct UnresolvedReference {
    std::string doc_id;
    std::string field;      // "citations", "keywords", "annotations", "bel_triples"
    std::string reference;

    friend bool operator==(const UnresolvedReference&, const UnresolvedReference&) = default;
};

/// Entity and relation counts are tallies of the whole graph after the run.
struct IngestReport {
    std::map<std::string, std::size_t> entities_by_namespace;
    std::map<std::string, std::size_t> relations_by_kind;
    std::size_t entities_added = 0;
    std::size_t relations_added = 0;
    std::vector<UnresolvedReference> unresolved;

    [[nodiscard]] std::size_t entity_total() const;
    [[nodiscard]] std::size_t relation_total() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

IngestReport tally(const Graph& graph);

struct IngestOptions {
    std::string keyword_namespace = "mesh";
    DuplicatePolicy policy = DuplicatePolicy::Merge;
};

IngestReport ingest_corpus(Graph& graph, const std::filesystem::path& path, const IngestOptions& options = {});
IngestReport ingest_corpus_text(Graph& graph, std::string_view jsonl, const IngestOptions& options = {},
                                std::string_view source_name = "<memory>");

/// sameAffiliation between authors sharing an affiliation, isCoAuthor
/// between authors sharing a document. Both symmetric, stored once with
/// the lower id as source; provenance DerivedMeta. Idempotent.
IngestReport derive_meta_relations(Graph& graph);

}  // namespace kgmdd
