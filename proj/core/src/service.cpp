#include "kgmdd/service.hpp"

#include "kgmdd/compile.hpp"
#include "kgmdd/error.hpp"
#include "kgmdd/graph_export.hpp"
#include "kgmdd/mdd_export.hpp"
#include "kgmdd/snapshot.hpp"
#include "kgmdd/validation.hpp"

#include <httplib.h>

#include <charconv>
#include <limits>

namespace kgmdd::service {

using nlohmann::json;

namespace {

// Service-level failures that have no library counterpart.
struct ApiError {
    int status;
    std::string code;
    std::string message;
    std::string parameter;
};

Response json_response(int status, const json& body) {
    return Response{status, "application/json", body.dump() + "\n"};
}

Response error_response(const ApiError& e) {
    return json_response(e.status, json{{"error", {{"code", e.code}, {"message", e.message}, {"parameter", e.parameter}}}});
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownNamespace:
        case ErrorCode::UnknownEntity:
        case ErrorCode::UnknownRelation:
        case ErrorCode::UnknownElement:
            return 404;
        default:
            return 400;
    }
}

json count_json(const mdd::BigCount& c) {
    if (c <= std::numeric_limits<std::uint64_t>::max()) return json(c.convert_to<std::uint64_t>());
    return json(c.str());
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        auto j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        parts.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return parts;
}

std::size_t parse_count(const Request& r, const std::string& key, std::size_t fallback, std::size_t max) {
    auto it = r.query.find(key);
    if (it == r.query.end()) return fallback;
    std::size_t value = 0;
    const auto& text = it->second;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || value > max) {
        throw ApiError{400, "InvalidArgument", "'" + key + "' must be an integer in [0, " + std::to_string(max) + "]",
                       key};
    }
    return value;
}

json parse_body(const Request& r) {
    if (r.body.empty()) return json::object();
    try {
        json body = json::parse(r.body);
        if (!body.is_object()) throw ApiError{400, "ParseError", "request body must be a JSON object", "body"};
        return body;
    } catch (const json::parse_error& e) {
        throw ApiError{400, "ParseError", e.what(), "body"};
    }
}

template <class T>
T field(const json& body, const std::string& key) {
    auto it = body.find(key);
    if (it == body.end()) throw ApiError{400, "InvalidArgument", "missing field '" + key + "'", key};
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ApiError{400, "InvalidArgument", "field '" + key + "' has the wrong type", key};
    }
}

template <class T>
T field_or(const json& body, const std::string& key, T fallback) {
    return body.contains(key) ? field<T>(body, key) : fallback;
}

EntityId entity_ref(const Graph& g, const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return resolve_entity_ref(g, std::to_string(v.get<std::uint64_t>()));
    if (v.is_string()) return resolve_entity_ref(g, v.get<std::string>());
    throw ApiError{400, "InvalidArgument", "'" + key + "' must be an entity id or ns:label", key};
}

std::vector<EntityId> entity_refs(const Graph& g, const json& body, const std::string& key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_array()) {
        throw ApiError{400, "InvalidArgument", "'" + key + "' must be an array of entities", key};
    }
    std::vector<EntityId> out;
    for (const auto& v : *it) out.push_back(entity_ref(g, v, key));
    return out;
}

std::optional<EntityId> optional_ref(const Graph& g, const json& body, const std::string& key) {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    return entity_ref(g, body[key], key);
}

CompilationSpec combination_spec(const Graph& g, const json& body) {
    CompilationSpec spec;
    auto it = body.find("layers");
    if (it == body.end() || !it->is_array()) throw ApiError{400, "InvalidArgument", "'layers' must be an array", "layers"};
    for (const auto& layer : *it) {
        if (!layer.is_object()) throw ApiError{400, "InvalidArgument", "each layer must be an object", "layers"};
        LayerSpec ls;
        ls.name = field_or<std::string>(layer, "name", "");
        if (layer.contains("entities")) {
            ls.entities = entity_refs(g, layer, "entities");
        } else {
            auto ns_name = field<std::string>(layer, "ns");
            auto ns = g.find_namespace(ns_name);
            if (!ns) throw Error(ErrorCode::UnknownNamespace, "unknown namespace '" + ns_name + "'", "ns");
            ls.ns = *ns;
            if (ls.name.empty()) ls.name = ns_name;
        }
        spec.layers.push_back(std::move(ls));
    }
    spec.root_anchor = optional_ref(g, body, "root_anchor");
    spec.end_anchor = optional_ref(g, body, "end_anchor");
    if (body.contains("depth_limit") && !body["depth_limit"].is_null()) {
        spec.depth_limit = field<std::size_t>(body, "depth_limit");
    }
    spec.cyclic = field_or<bool>(body, "cyclic", false);
    auto adjacency = field_or<std::string>(body, "adjacency", "consecutive");
    if (adjacency == "consecutive") {
        spec.adjacency = Adjacency::Consecutive;
    } else if (adjacency == "all_pairs") {
        spec.adjacency = Adjacency::AllPairs;
    } else {
        throw ApiError{400, "InvalidArgument", "adjacency must be consecutive or all_pairs", "adjacency"};
    }
    return spec;
}

PathQuery path_query(const Graph& g, const json& body) {
    PathQuery q;
    q.from = entity_ref(g, body.contains("from") ? body["from"] : json(), "from");
    q.to = entity_ref(g, body.contains("to") ? body["to"] : json(), "to");
    q.max_length = field_or<std::size_t>(body, "max_length", kDefaultMaxLength);
    for (const auto& k : field_or<std::vector<std::string>>(body, "allowed_kinds", {})) q.allowed_kinds.insert(k);
    q.directed = field_or<bool>(body, "directed", false);
    return q;
}

}  // namespace

Service::Service(Graph graph, ServiceConfig config)
    : graph_(std::move(graph)), contexts_(ContextMap::from_graph(graph_)), config_(std::move(config)) {}

Response Service::handle(const Request& request) {
    try {
        const auto parts = split_path(request.path);
        const auto& m = request.method;
        if (m == "GET" && parts == std::vector<std::string>{"entities"}) return entities(request);
        if (m == "POST" && parts == std::vector<std::string>{"subgraph", "extended"}) return extended_subgraph(request);
        if (m == "POST" && parts == std::vector<std::string>{"mdd", "compile"}) return compile(request);
        if (m == "GET" && parts == std::vector<std::string>{"export"}) return export_graph(request);
        if (parts.size() == 3 && parts[0] == "mdd") {
            if (m == "GET" && parts[2] == "paths") return paths(parts[1], request);
            if (m == "GET" && parts[2] == "dot") return dot(parts[1]);
            if (m == "POST" && parts[2] == "route") return start_route(parts[1], request);
        }
        if (parts.size() == 2 && parts[0] == "route" && m == "GET") return route(parts[1], "", request);
        if (parts.size() == 3 && parts[0] == "route" && m == "POST" && (parts[2] == "choose" || parts[2] == "undo")) {
            return route(parts[1], parts[2], request);
        }
        throw ApiError{404, "NotFound", "no endpoint " + m + " " + request.path, "path"};
    } catch (const ApiError& e) {
        return error_response(e);
    } catch (const Error& e) {
        return error_response({status_for(e.code()), std::string(code_name(e.code())), e.what(), e.parameter()});
    } catch (const std::exception& e) {
        return error_response({500, "Internal", e.what(), ""});
    }
}

Response Service::entities(const Request& r) {
    const std::size_t offset = parse_count(r, "offset", 0, std::numeric_limits<std::uint32_t>::max());
    const std::size_t limit = parse_count(r, "limit", config_.default_page_size, config_.max_page_size);
    std::optional<NamespaceId> ns;
    if (auto it = r.query.find("ns"); it != r.query.end() && !it->second.empty()) {
        ns = graph_.find_namespace(it->second);
        if (!ns) throw Error(ErrorCode::UnknownNamespace, "unknown namespace '" + it->second + "'", "ns");
    }
    std::string label;
    if (auto it = r.query.find("label"); it != r.query.end()) label = it->second;

    auto matches = [&](const Entity& e) {
        if (ns && e.ns != *ns) return false;
        if (label.empty() || e.preferred_label.find(label) != std::string::npos) return true;
        for (const auto& s : e.synonyms) {
            if (s.find(label) != std::string::npos) return true;
        }
        return false;
    };
    std::size_t total = 0;
    json items = json::array();
    for (const Entity& e : graph_.entities()) {
        if (!matches(e)) continue;
        if (total >= offset && items.size() < limit) {
            items.push_back({{"id", e.id.value},
                             {"ns", graph_.namespace_(e.ns).name},
                             {"label", e.preferred_label},
                             {"synonyms", e.synonyms}});
        }
        ++total;
    }
    return json_response(200, json{{"total", total}, {"offset", offset}, {"limit", limit}, {"items", std::move(items)}});
}

Response Service::extended_subgraph(const Request& r) {
    json body = parse_body(r);
    auto vertices = entity_refs(graph_, body, "vertices");
    auto mode = extension_mode_from_string(field_or<std::string>(body, "mode", "VertexContextsOnly"));
    return json_response(200, subgraph_to_json(graph_, extended_induced_subgraph(contexts_, vertices, mode)));
}

Response Service::compile(const Request& r) {
    json body = parse_body(r);
    const auto kind = field<std::string>(body, "kind");
    std::optional<mdd::Mdd> result;
    if (kind == "combinations") {
        result = compile_combinations(graph_, combination_spec(graph_, body));
    } else if (kind == "activity") {
        auto vertices = entity_refs(graph_, body, "pathway");
        std::sort(vertices.begin(), vertices.end());
        vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
        Subgraph pathway = graph_.induced_subgraph(vertices);
        std::vector<EntityId> order;
        if (body.contains("order")) order = entity_refs(graph_, body, "order");
        result = compile_activity(graph_, pathway, entity_ref(graph_, body.value("source", json()), "source"),
                                  entity_ref(graph_, body.value("sink", json()), "sink"), order);
    } else if (kind == "influence") {
        result = validate_influence(graph_, path_query(graph_, body));
    } else {
        throw ApiError{400, "InvalidArgument", "kind must be combinations, activity or influence", "kind"};
    }
    const auto count = mdd::count_solutions(*result);
    const auto nodes = result->node_count();
    std::string id = store_mdd(*result);
    return json_response(200, json{{"mdd_id", id}, {"node_count", nodes}, {"solution_count", count_json(count)}});
}

Response Service::paths(const std::string& mdd_id, const Request& r) {
    const mdd::Mdd m = find_mdd(mdd_id);
    const std::size_t limit = parse_count(r, "limit", config_.default_page_size, config_.max_page_size);
    json out = json::array();
    for (const auto& a : mdd::enumerate_paths(m, limit)) {
        out.push_back({{"assignment", a}, {"labels", mdd::assignment_to_json(m, a)}});
    }
    return json_response(200, json{{"mdd_id", mdd_id}, {"limit", limit}, {"paths", std::move(out)}});
}

Response Service::dot(const std::string& mdd_id) {
    return Response{200, "text/vnd.graphviz", mdd::to_dot(find_mdd(mdd_id))};
}

Response Service::start_route(const std::string& mdd_id, const Request& r) {
    json body = parse_body(r);
    Session s{mdd_id, {}, find_mdd(mdd_id), config_.now()};
    if (body.contains("decisions")) {
        if (!body["decisions"].is_array()) {
            throw ApiError{400, "InvalidArgument", "'decisions' must be an array", "decisions"};
        }
        for (const auto& d : body["decisions"]) {
            const auto layer = field<std::size_t>(d, "layer");
            const auto value = field<std::uint32_t>(d, "value");
            if (layer >= s.current.variable_count()) {
                throw ApiError{400, "InvalidArgument", "layer out of range", "layer"};
            }
            auto next = mdd::restrict(s.current, layer, value);
            if (mdd::count_solutions(next) == 0) {
                throw ApiError{409, "DeadEndChoice", "replayed decision leaves no solutions", "decisions"};
            }
            s.current = std::move(next);
            s.decisions.push_back({layer, value});
        }
    }
    std::lock_guard lock(session_mutex_);
    std::string id = "s" + std::to_string(next_session_++);
    auto& stored = sessions_.emplace(id, std::move(s)).first->second;
    return json_response(200, summary(id, stored));
}

Response Service::route(const std::string& session_id, const std::string& action, const Request& r) {
    std::lock_guard lock(session_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        if (expired_.contains(session_id)) throw ApiError{410, "SessionExpired", "session has expired", "session"};
        throw ApiError{404, "UnknownSession", "no session '" + session_id + "'", "session"};
    }
    const auto now = config_.now();
    Session& s = it->second;
    if (now - s.last_used > config_.session_ttl) {
        sessions_.erase(it);
        expired_.insert(session_id);
        throw ApiError{410, "SessionExpired", "session has expired", "session"};
    }
    s.last_used = now;

    if (action == "choose") {
        json body = parse_body(r);
        const auto layer = field<std::size_t>(body, "layer");
        const auto value = field<std::uint32_t>(body, "value");
        if (layer >= s.current.variable_count()) throw ApiError{400, "InvalidArgument", "layer out of range", "layer"};
        if (s.current.fixed()[layer]) throw ApiError{409, "LayerDecided", "layer already decided", "layer"};
        auto next = mdd::restrict(s.current, layer, value);
        if (mdd::count_solutions(next) == 0) {
            throw ApiError{409, "DeadEndChoice", "value has no remaining solutions", "value"};
        }
        s.current = std::move(next);
        s.decisions.push_back({layer, value});
    } else if (action == "undo") {
        if (s.decisions.empty()) throw ApiError{409, "NothingToUndo", "no decision to undo", "session"};
        s.decisions.pop_back();
        mdd::Mdd replay = find_mdd(s.mdd_id);
        for (const auto& d : s.decisions) replay = mdd::restrict(replay, d.layer, d.value);
        s.current = std::move(replay);
    }
    return json_response(200, summary(session_id, s));
}

json Service::summary(const std::string& session_id, const Session& s) const {
    const auto& mgr = *s.current.manager();
    json decisions = json::array();
    for (const auto& d : s.decisions) {
        decisions.push_back({{"layer", d.layer}, {"value", d.value}, {"label", mgr.variable(d.layer).values[d.value].label}});
    }
    json layers = json::array();
    for (std::size_t layer = 0; layer < mgr.variable_count(); ++layer) {
        const auto& var = mgr.variable(layer);
        json entry{{"layer", layer}, {"name", var.name}};
        if (auto f = s.current.fixed()[layer]) {
            entry["fixed"] = {{"value", *f}, {"label", var.values[*f].label}};
        } else {
            json candidates = json::array();
            json dead = json::array();
            for (std::uint32_t v = 0; v < var.size(); ++v) {
                auto c = mdd::count_solutions(mdd::restrict(s.current, layer, v));
                json item{{"value", v}, {"label", var.values[v].label}};
                if (var.values[v].entity) item["entity"] = var.values[v].entity->value;
                if (c == 0) {
                    dead.push_back(std::move(item));
                } else {
                    item["count"] = count_json(c);
                    candidates.push_back(std::move(item));
                }
            }
            entry["fixed"] = nullptr;
            entry["candidates"] = std::move(candidates);
            entry["dead_ends"] = std::move(dead);
        }
        layers.push_back(std::move(entry));
    }
    return json{{"session_id", session_id},
                {"mdd_id", s.mdd_id},
                {"decisions", std::move(decisions)},
                {"solution_count", count_json(mdd::count_solutions(s.current))},
                {"layers", std::move(layers)}};
}

Response Service::export_graph(const Request& r) {
    std::string format;
    if (auto it = r.query.find("format"); it != r.query.end()) {
        format = it->second;
    } else if (r.accept.find("application/n-triples") != std::string::npos) {
        format = "ntriples";
    } else if (r.accept.empty() || r.accept.find("application/json") != std::string::npos ||
               r.accept.find("*/*") != std::string::npos) {
        format = "json";
    } else {
        throw ApiError{406, "NotAcceptable", "supported types: application/n-triples, application/json", "Accept"};
    }
    if (format == "ntriples") return Response{200, "application/n-triples", export_ntriples(graph_)};
    if (format == "json") return Response{200, "application/json", serialize_snapshot(graph_)};
    if (format == "dot") return Response{200, "text/vnd.graphviz", export_graph_dot(graph_)};
    throw ApiError{400, "InvalidArgument", "format must be ntriples, json or dot", "format"};
}

mdd::Mdd Service::find_mdd(const std::string& id) const {
    std::shared_lock lock(mdd_mutex_);
    auto it = mdds_.find(id);
    if (it == mdds_.end()) throw ApiError{404, "UnknownMdd", "no diagram '" + id + "'", "mdd"};
    return it->second;
}

std::string Service::store_mdd(mdd::Mdd m) {
    std::unique_lock lock(mdd_mutex_);
    std::string id = "m" + std::to_string(next_mdd_++);
    mdds_.emplace(id, std::move(m));
    return id;
}

void Service::mount(httplib::Server& server) {
    auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
        Request r{req.method, req.path, {}, req.body, req.get_header_value("Accept")};
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        Response out = handle(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    server.Get(R"(/.*)", adapt);
    server.Post(R"(/.*)", adapt);
}

void serve(Service& service, const std::string& host, int port) {
    httplib::Server server;
    service.mount(server);
    if (!server.bind_to_port(host, port)) {
        throw Error(ErrorCode::InvalidArgument, "cannot listen on " + host + ":" + std::to_string(port), "listen");
    }
    server.listen_after_bind();
}

}  // namespace kgmdd::service
