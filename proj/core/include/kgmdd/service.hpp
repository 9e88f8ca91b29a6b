#pragma once
// HTTP+JSON facade over a read-only graph snapshot.
//
//   GET  /entities?ns=&label=&offset=&limit=
//   POST /subgraph/extended          {vertices, mode}
//   POST /mdd/compile                {kind: combinations|activity|influence, ...}
//   GET  /mdd/{id}/paths?limit=
//   GET  /mdd/{id}/dot
//   POST /mdd/{id}/route             {decisions?: [{layer, value}]}
//   GET  /route/{id}
//   POST /route/{id}/choose          {layer, value}
//   POST /route/{id}/undo
//   GET  /export?format=             or Accept: application/n-triples | application/json
//
// Errors are {"error": {"code", "message", "parameter"}}. handle() does all
// the work; mount() only adapts httplib requests to it, so tests can drive
// the service without a socket.

#include "kgmdd/context.hpp"
#include "kgmdd/graph.hpp"
#include "kgmdd/mdd.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace kgmdd::service {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    std::string accept;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

using Clock = std::chrono::steady_clock;

struct ServiceConfig {
    std::chrono::seconds session_ttl{1800};
    /// Injectable for expiry tests.
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
    std::size_t default_page_size = 50;
    std::size_t max_page_size = 1000;
};

class Service {
public:
    explicit Service(Graph graph, ServiceConfig config = {});

    Response handle(const Request& request);
    void mount(httplib::Server& server);

    [[nodiscard]] const Graph& graph() const { return graph_; }
    [[nodiscard]] const ContextMap& contexts() const { return contexts_; }

private:
    struct Decision {
        std::size_t layer;
        std::uint32_t value;
    };
    struct Session {
        std::string mdd_id;
        std::vector<Decision> decisions;
        mdd::Mdd current;
        Clock::time_point last_used;
    };

    Response entities(const Request& r);
    Response extended_subgraph(const Request& r);
    Response compile(const Request& r);
    Response paths(const std::string& mdd_id, const Request& r);
    Response dot(const std::string& mdd_id);
    Response start_route(const std::string& mdd_id, const Request& r);
    Response route(const std::string& session_id, const std::string& action, const Request& r);
    Response export_graph(const Request& r);

    mdd::Mdd find_mdd(const std::string& id) const;
    std::string store_mdd(mdd::Mdd m);
    nlohmann::json summary(const std::string& session_id, const Session& s) const;

    Graph graph_;
    ContextMap contexts_;
    ServiceConfig config_;

    mutable std::shared_mutex mdd_mutex_;
    std::map<std::string, mdd::Mdd> mdds_;
    std::size_t next_mdd_ = 1;

    std::mutex session_mutex_;
    std::map<std::string, Session> sessions_;
    std::set<std::string> expired_;
    std::size_t next_session_ = 1;
};

/// Loads a snapshot and serves it until the process is stopped. Throws
/// InvalidArgument when the address cannot be bound.
void serve(Service& service, const std::string& host, int port);

}  // namespace kgmdd::service
