#include "kgmdd/mdd_export.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <map>

namespace kgmdd::mdd {

using nlohmann::json;

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

std::string node_name(NodeRef n) {
    if (n == kFalse) return "F";
    if (n == kTrue) return "T";
    return "n" + std::to_string(n);
}

}  // namespace

std::string to_dot(const Mdd& m, const DotOptions& options) {
    const Manager& mgr = *m.manager();
    auto nodes = m.reachable_nodes();
    std::map<std::size_t, std::vector<NodeRef>> layers;
    for (NodeRef n : nodes) {
        if (n > kTrue) layers[mgr.layer_of(n)].push_back(n);
    }
    std::string out = "digraph mdd {\n  rankdir=TB;\n  node [shape=ellipse];\n";
    for (const auto& [layer, members] : layers) {
        out += "  { rank=same;";
        for (NodeRef n : members) out += " " + node_name(n) + ";";
        out += " }\n";
        for (NodeRef n : members) {
            out += "  " + node_name(n) + " [label=" + quote(mgr.variable(layer).name) + "];\n";
        }
    }
    bool has_true = std::find(nodes.begin(), nodes.end(), kTrue) != nodes.end();
    bool has_false = std::find(nodes.begin(), nodes.end(), kFalse) != nodes.end();
    out += "  { rank=sink;";
    if (has_true) out += " T;";
    if (has_false && !options.hide_false) out += " F;";
    out += " }\n";
    if (has_true) out += "  T [shape=box, label=\"Y\"];\n";
    if (has_false && !options.hide_false) out += "  F [shape=box, label=\"N\"];\n";
    for (NodeRef n : nodes) {
        if (n <= kTrue) continue;
        const auto& var = mgr.variable(mgr.layer_of(n));
        std::map<NodeRef, std::string> grouped;
        auto kids = mgr.children(n);
        for (std::size_t v = 0; v < kids.size(); ++v) {
            if (options.hide_false && kids[v] == kFalse) continue;
            auto& label = grouped[kids[v]];
            if (!label.empty()) label += ",";
            label += var.values[v].label;
        }
        for (const auto& [child, label] : grouped) {
            out += "  " + node_name(n) + " -> " + node_name(child) + " [label=" + quote(label) + "];\n";
        }
    }
    out += "}\n";
    return out;
}

json to_json(const Mdd& m) {
    const Manager& mgr = *m.manager();
    json variables = json::array();
    for (const auto& var : mgr.variables()) {
        json values = json::array();
        for (const auto& v : var.values) {
            json val{{"label", v.label}};
            if (v.entity) val["entity"] = v.entity->value;
            values.push_back(std::move(val));
        }
        json jv{{"name", var.name}, {"values", std::move(values)}};
        if (var.entity) jv["entity"] = var.entity->value;
        variables.push_back(std::move(jv));
    }
    json fixed = json::array();
    for (const auto& f : m.fixed()) fixed.push_back(f ? json(*f) : json());
    json nodes = json::array();
    for (NodeRef n : m.reachable_nodes()) {
        if (n <= kTrue) continue;
        nodes.push_back({{"id", n}, {"layer", mgr.layer_of(n)}, {"children", mgr.children(n)}});
    }
    return json{{"variables", std::move(variables)},
                {"fixed", std::move(fixed)},
                {"root", m.root()},
                {"terminals", {{"false", kFalse}, {"true", kTrue}}},
                {"nodes", std::move(nodes)}};
}

json assignment_to_json(const Mdd& m, const Assignment& a) {
    json out = json::object();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& var = m.manager()->variable(i);
        out[var.name] = var.values.at(a[i]).label;
    }
    return out;
}

json Fsm::to_json() const {
    json s = json::array();
    for (const auto& st : states) {
        s.push_back({{"id", st.id}, {"layer", st.layer}, {"label", st.label}, {"accepting", st.accepting}});
    }
    json t = json::array();
    for (const auto& tr : transitions) {
        t.push_back({{"from", tr.from}, {"to", tr.to}, {"value", tr.value}, {"label", tr.label}});
    }
    json b = json::array();
    for (const auto& bt : back_transitions) {
        b.push_back({{"from_entity", bt.from_entity.value},
                     {"to_entity", bt.to_entity.value},
                     {"from_layer", bt.from_layer},
                     {"to_layer", bt.to_layer},
                     {"kind", "conflict"}});
    }
    return json{{"states", std::move(s)}, {"transitions", std::move(t)}, {"back_transitions", std::move(b)}};
}

Fsm mdd_to_fsm(const Mdd& m, std::span<const std::pair<EntityId, EntityId>> conflict_edges) {
    const Manager& mgr = *m.manager();
    const std::size_t k = mgr.variable_count();

    auto locate = [&](EntityId e) -> std::size_t {
        for (std::size_t i = 0; i < k; ++i) {
            if (mgr.variable(i).entity == e) return i;
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (const auto& v : mgr.variable(i).values) {
                if (v.entity == e) return i;
            }
        }
        throw Error(ErrorCode::UnknownEntityInConflictEdge,
                    "entity " + std::to_string(e.value) + " is not part of the compiled diagram", "conflict_edges");
    };

    Fsm fsm;
    for (const auto& [from, to] : conflict_edges) {
        fsm.back_transitions.push_back(FsmBackTransition{from, to, locate(from), locate(to)});
    }

    auto nodes = m.reachable_nodes();
    if (std::find(nodes.begin(), nodes.end(), kFalse) == nodes.end()) nodes.insert(nodes.begin(), kFalse);
    if (std::find(nodes.begin(), nodes.end(), kTrue) == nodes.end()) nodes.insert(nodes.begin() + 1, kTrue);
    for (NodeRef n : nodes) {
        if (n == kFalse) {
            fsm.states.push_back(FsmState{n, k, "FALSE", false});
        } else if (n == kTrue) {
            fsm.states.push_back(FsmState{n, k, "TRUE", true});
        } else {
            std::size_t layer = mgr.layer_of(n);
            fsm.states.push_back(FsmState{n, layer, mgr.variable(layer).name, false});
            auto kids = mgr.children(n);
            for (std::uint32_t v = 0; v < kids.size(); ++v) {
                fsm.transitions.push_back(FsmTransition{n, kids[v], v, mgr.variable(layer).values[v].label});
            }
        }
    }
    return fsm;
}

}  // namespace kgmdd::mdd
