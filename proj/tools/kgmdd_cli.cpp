// kgmdd command-line tool. Exit codes: 0 success, 1 runtime error, 2 usage.

#include "kgmdd/bench.hpp"
#include "kgmdd/error.hpp"
#include "kgmdd/graph_export.hpp"
#include "kgmdd/ingest.hpp"
#include "kgmdd/mdd_export.hpp"
#include "kgmdd/service.hpp"
#include "kgmdd/snapshot.hpp"
#include "kgmdd/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using nlohmann::json;
using namespace kgmdd;

bool verbose = false;

void log(const std::string& message) {
    if (verbose) std::cerr << "kgmdd: " << message << '\n';
}

struct IngestArgs {
    std::vector<std::string> terminologies;
    std::string corpus;
    std::string out;
    std::string keyword_ns = "mesh";
    bool derive = true;
};

struct ValidateArgs {
    std::string snapshot;
    std::string from;
    std::string to;
    std::size_t max_len = kDefaultMaxLength;
    std::vector<std::string> kinds;
    std::size_t max_paths = 0;
    bool directed = false;
    bool mdd = false;
    std::string dot;
    bool list_paths = false;
};

struct ServeArgs {
    std::string snapshot;
    std::string listen = "127.0.0.1:8080";
    long ttl = 1800;
};

struct ExportArgs {
    std::string snapshot;
    std::string format;
};

int run_ingest(const IngestArgs& a) {
    Graph g;
    json terms = json::array();
    for (const auto& spec : a.terminologies) {
        TerminologyOptions opts;
        std::filesystem::path path = spec;
        if (auto eq = spec.find('='); eq != std::string::npos && spec.find('/') > eq) {
            opts.name = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        }
        NamespaceId ns = load_terminology(g, path, terminology_format_for(path), opts);
        log("loaded terminology " + g.namespace_(ns).name + " from " + path.string());
        terms.push_back({{"namespace", g.namespace_(ns).name}, {"concepts", g.namespace_(ns).members.size()}});
    }
    IngestOptions opts;
    opts.keyword_namespace = a.keyword_ns;
    IngestReport corpus = ingest_corpus(g, a.corpus, opts);
    log("ingested corpus " + a.corpus);
    json report{{"terminologies", terms}, {"corpus", corpus.to_json()}};
    if (a.derive) report["derived"] = derive_meta_relations(g).to_json();
    report["totals"] = tally(g).to_json();
    save_snapshot(g, a.out);
    log("wrote snapshot " + a.out);
    std::cout << report.dump(2) << '\n';
    return 0;
}

int run_validate(const ValidateArgs& a) {
    Graph g = load_snapshot(a.snapshot);
    PathQuery q;
    q.from = resolve_entity_ref(g, a.from);
    q.to = resolve_entity_ref(g, a.to);
    q.max_length = a.max_len;
    q.max_paths = a.max_paths;
    q.directed = a.directed;
    q.allowed_kinds.insert(a.kinds.begin(), a.kinds.end());

    json out{{"from", q.from.value}, {"to", q.to.value}, {"max_length", q.max_length}};
    auto shortest = shortest_path(g, q);
    out["status"] = shortest ? "Connected" : "NotConnected";
    out["shortest_path"] = shortest ? path_to_json(g, *shortest) : json();
    auto stream = knowledge_stream(g, q);
    out["stream_size"] = stream.paths.size();
    out["truncated"] = stream.truncated;
    if (a.list_paths) out["paths"] = stream_to_json(g, stream)["paths"];
    if (a.mdd) {
        auto m = validate_influence(g, q);
        const auto count = mdd::count_solutions(m);
        json count_json = count <= std::numeric_limits<std::uint64_t>::max() ? json(count.convert_to<std::uint64_t>())
                                                                               : json(count.str());
        out["mdd"] = {{"solution_count", count_json}, {"node_count", m.node_count()}};
        if (!a.dot.empty()) {
            std::ofstream(a.dot) << mdd::to_dot(m);
            out["mdd"]["dot_path"] = a.dot;
        }
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_bench(const bench::BenchConfig& c) {
    log("generating " + std::to_string(c.nodes) + " nodes, " + std::to_string(c.edges) + " edges");
    std::cout << bench::run(c).dump(2) << '\n';
    return 0;
}

int run_serve(const ServeArgs& a) {
    auto colon = a.listen.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "listen address must be host:port", "listen");
    const std::string host = a.listen.substr(0, colon);
    const int port = std::stoi(a.listen.substr(colon + 1));
    service::ServiceConfig cfg;
    cfg.session_ttl = std::chrono::seconds(a.ttl);
    service::Service svc(load_snapshot(a.snapshot), cfg);
    std::cerr << "kgmdd: serving " << a.snapshot << " on " << a.listen << '\n';
    service::serve(svc, host, port);
    return 0;
}

int run_export(const ExportArgs& a) {
    Graph g = load_snapshot(a.snapshot);
    if (a.format == "ntriples") {
        std::cout << export_ntriples(g);
    } else if (a.format == "json") {
        std::cout << serialize_snapshot(g);
    } else {
        std::cout << export_graph_dot(g);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-annotated knowledge graphs compiled to decision diagrams"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    IngestArgs ingest;
    auto* ci = app.add_subcommand("ingest", "Build a snapshot from terminologies and a corpus");
    ci->add_option("--terminology", ingest.terminologies, "Terminology file, optionally name=path")
        ->check([](const std::string& s) {
            auto eq = s.find('=');
            std::string path = (eq != std::string::npos && s.find('/') > eq) ? s.substr(eq + 1) : s;
            return std::filesystem::is_regular_file(path) ? std::string{} : "file not found: " + path;
        });
    ci->add_option("--corpus", ingest.corpus, "JSON Lines corpus")->required()->check(CLI::ExistingFile);
    ci->add_option("--out", ingest.out, "Snapshot to write")->required();
    ci->add_option("--keyword-ns", ingest.keyword_ns, "Namespace that resolves document keywords");
    ci->add_flag("!--no-derive", ingest.derive, "Skip sameAffiliation/isCoAuthor derivation");

    ValidateArgs validate;
    auto* cv = app.add_subcommand("validate", "Shortest path, knowledge stream and influence MDD");
    cv->add_option("--snapshot", validate.snapshot)->required()->envname("KGMDD_SNAPSHOT")->check(CLI::ExistingFile);
    cv->add_option("--from", validate.from, "Entity id or ns:label")->required();
    cv->add_option("--to", validate.to, "Entity id or ns:label")->required();
    cv->add_option("--max-len", validate.max_len, "Hop bound L")->check(CLI::PositiveNumber);
    cv->add_option("--kinds", validate.kinds, "Allowed relation kinds")->delimiter(',');
    cv->add_option("--max-paths", validate.max_paths, "Stream truncation (0 = unlimited)");
    cv->add_flag("--directed", validate.directed, "Follow relation direction");
    cv->add_flag("--paths", validate.list_paths, "Include the stream paths");
    auto* mdd_flag = cv->add_flag("--mdd", validate.mdd, "Also build the influence MDD");
    cv->add_option("--dot", validate.dot, "Write the MDD as DOT to this file")->needs(mdd_flag);

    bench::BenchConfig bc;
    auto* cb = app.add_subcommand("bench", "Seeded dense-graph query benchmark");
    cb->add_option("--nodes", bc.nodes)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 31));
    cb->add_option("--edges", bc.edges)->check(CLI::NonNegativeNumber);
    cb->add_option("--queries", bc.queries)->check(CLI::NonNegativeNumber);
    cb->add_option("--seed", bc.seed);
    cb->add_option("--stream-len", bc.stream_max_length)->check(CLI::PositiveNumber);

    ServeArgs serve;
    auto* cs = app.add_subcommand("serve", "Serve the HTTP API over a snapshot");
    cs->add_option("--snapshot", serve.snapshot)->required()->envname("KGMDD_SNAPSHOT")->check(CLI::ExistingFile);
    cs->add_option("--listen", serve.listen, "host:port")->envname("KGMDD_LISTEN");
    cs->add_option("--session-ttl", serve.ttl, "Idle seconds before a route session expires")
        ->check(CLI::PositiveNumber);

    ExportArgs exp;
    auto* ce = app.add_subcommand("export", "Write the snapshot as N-Triples, JSON or DOT");
    ce->add_option("--snapshot", exp.snapshot)->required()->envname("KGMDD_SNAPSHOT")->check(CLI::ExistingFile);
    ce->add_option("--format", exp.format)->required()->check(CLI::IsMember({"ntriples", "json", "dot"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ci->parsed()) return run_ingest(ingest);
        if (cv->parsed()) return run_validate(validate);
        if (cb->parsed()) return run_bench(bc);
        if (cs->parsed()) return run_serve(serve);
        if (ce->parsed()) return run_export(exp);
    } catch (const Error& e) {
        std::cerr << json{{"error", {{"code", code_name(e.code())}, {"message", e.what()}, {"parameter", e.parameter()}}}}
                         .dump()
                  << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", "Internal"}, {"message", e.what()}, {"parameter", ""}}}}.dump() << '\n';
        return 1;
    }
    return 2;
}
