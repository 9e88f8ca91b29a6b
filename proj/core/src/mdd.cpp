#include "kgmdd/mdd.hpp"

#include "kgmdd/error.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace kgmdd::mdd {

VariableSpec plain_variable(std::string name, std::size_t size) {
    VariableSpec spec{std::move(name), {}, std::nullopt};
    for (std::size_t i = 0; i < size; ++i) spec.values.push_back(DomainValue{std::to_string(i), std::nullopt});
    return spec;
}

VariableSpec activity_variable(std::string name, std::optional<EntityId> entity) {
    return VariableSpec{std::move(name), {{"inactive", std::nullopt}, {"active", std::nullopt}}, entity};
}

std::shared_ptr<Manager> Manager::create(std::vector<VariableSpec> variables) {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const auto& v = variables[i];
        if (v.values.empty()) {
            throw Error(ErrorCode::InvalidArgument, "variable '" + v.name + "' has an empty domain", v.name);
        }
        std::set<std::string_view> labels;
        for (const auto& val : v.values) {
            if (!labels.insert(val.label).second) {
                throw Error(ErrorCode::InvalidArgument,
                            "variable '" + v.name + "' repeats value '" + val.label + "'", v.name);
            }
        }
    }
    return std::shared_ptr<Manager>(new Manager(std::move(variables)));
}

Manager::Manager(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
    const auto k = static_cast<std::uint32_t>(variables_.size());
    nodes_.push_back(NodeInfo{k, 0});  // FALSE
    nodes_.push_back(NodeInfo{k, 0});  // TRUE
    table_.assign(64, kFalse);
}

bool Manager::same_order(const Manager& other) const {
    if (variables_.size() != other.variables_.size()) return false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name != other.variables_[i].name ||
            variables_[i].size() != other.variables_[i].size()) {
            return false;
        }
    }
    return true;
}

void Manager::check_ref(NodeRef n) const {
    if (n >= nodes_.size()) {
        throw Error(ErrorCode::InvalidArgument, "node reference " + std::to_string(n) + " out of range", "node");
    }
}

std::size_t Manager::hash_node(std::size_t layer, std::span<const NodeRef> children) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ layer;
    for (NodeRef c : children) {
        h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
}

bool Manager::node_equals(NodeRef n, std::size_t layer, std::span<const NodeRef> children) const {
    if (nodes_[n].layer != layer) return false;
    auto k = kids(n);
    return std::equal(k.begin(), k.end(), children.begin(), children.end());
}

void Manager::grow_table() {
    std::vector<NodeRef> bigger(table_.size() * 2, kFalse);
    const std::size_t mask = bigger.size() - 1;
    for (NodeRef n : table_) {
        if (n == kFalse) continue;
        std::size_t slot = hash_node(nodes_[n].layer, kids(n)) & mask;
        while (bigger[slot] != kFalse) slot = (slot + 1) & mask;
        bigger[slot] = n;
    }
    table_ = std::move(bigger);
}

NodeRef Manager::make_node(std::size_t layer, std::span<const NodeRef> children) {
    std::unique_lock lock(mutex_);
    return make_node_locked(layer, children);
}

NodeRef Manager::make_node_locked(std::size_t layer, std::span<const NodeRef> children) {
    if (layer >= variables_.size()) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " out of range", "layer");
    }
    if (children.size() != variables_[layer].size()) {
        throw Error(ErrorCode::ArityMismatch,
                    "layer " + std::to_string(layer) + " expects " + std::to_string(variables_[layer].size()) +
                        " children, got " + std::to_string(children.size()),
                    "children");
    }
    for (NodeRef c : children) {
        check_ref(c);
        if (nodes_[c].layer <= layer) {
            throw Error(ErrorCode::NotLayered,
                        "child on layer " + std::to_string(nodes_[c].layer) + " under layer " + std::to_string(layer),
                        "children");
        }
    }
    if (std::all_of(children.begin(), children.end(), [&](NodeRef c) { return c == children[0]; })) {
        return children[0];
    }
    const std::size_t mask = table_.size() - 1;
    std::size_t slot = hash_node(layer, children) & mask;
    while (table_[slot] != kFalse) {
        if (node_equals(table_[slot], layer, children)) return table_[slot];
        slot = (slot + 1) & mask;
    }
    auto id = static_cast<NodeRef>(nodes_.size());
    nodes_.push_back(NodeInfo{static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(child_pool_.size())});
    child_pool_.insert(child_pool_.end(), children.begin(), children.end());
    table_[slot] = id;
    if (++table_used_ * 2 > table_.size()) grow_table();
    return id;
}

std::size_t Manager::layer_of(NodeRef node) const {
    std::shared_lock lock(mutex_);
    check_ref(node);
    return nodes_[node].layer;
}

std::vector<NodeRef> Manager::children(NodeRef node) const {
    std::shared_lock lock(mutex_);
    check_ref(node);
    if (node <= kTrue) return {};
    auto k = kids(node);
    return {k.begin(), k.end()};
}

NodeRef Manager::child(NodeRef node, std::uint32_t value) const {
    std::shared_lock lock(mutex_);
    check_ref(node);
    if (node <= kTrue) return node;
    auto k = kids(node);
    if (value >= k.size()) {
        throw Error(ErrorCode::ValueOutOfDomain, "value " + std::to_string(value) + " out of domain", "value");
    }
    return k[value];
}

std::size_t Manager::stored_node_count() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
}

NodeRef Manager::apply(Op op, NodeRef a, NodeRef b) {
    std::unique_lock lock(mutex_);
    check_ref(a);
    check_ref(b);
    return apply_locked(op, a, b);
}

NodeRef Manager::apply_locked(Op op, NodeRef a, NodeRef b) {
    if (op == Op::Union) {
        if (a == kTrue || b == kTrue) return kTrue;
        if (a == kFalse) return b;
        if (b == kFalse) return a;
    } else {
        if (a == kFalse || b == kFalse) return kFalse;
        if (a == kTrue) return b;
        if (b == kTrue) return a;
    }
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    auto& cache = op == Op::Union ? union_cache_ : intersection_cache_;
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const std::uint32_t la = nodes_[a].layer;
    const std::uint32_t lb = nodes_[b].layer;
    const std::uint32_t top = std::min(la, lb);
    const std::size_t d = variables_[top].size();
    std::vector<NodeRef> out(d);
    for (std::uint32_t v = 0; v < d; ++v) {
        NodeRef ca = la == top ? kids(a)[v] : a;
        NodeRef cb = lb == top ? kids(b)[v] : b;
        out[v] = apply_locked(op, ca, cb);
    }
    NodeRef result = make_node_locked(top, out);
    cache.emplace(key, result);
    return result;
}

NodeRef Manager::negate(NodeRef a) {
    std::unique_lock lock(mutex_);
    check_ref(a);
    return negate_locked(a);
}

NodeRef Manager::negate_locked(NodeRef a) {
    if (a == kFalse) return kTrue;
    if (a == kTrue) return kFalse;
    if (auto it = negate_cache_.find(a); it != negate_cache_.end()) return it->second;
    const std::uint32_t layer = nodes_[a].layer;
    std::vector<NodeRef> out(variables_[layer].size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = negate_locked(kids(a)[v]);
    NodeRef result = make_node_locked(layer, out);
    negate_cache_.emplace(a, result);
    negate_cache_.emplace(result, a);
    return result;
}

NodeRef Manager::restrict(NodeRef a, std::size_t layer, std::uint32_t value) {
    std::unique_lock lock(mutex_);
    check_ref(a);
    if (layer >= variables_.size()) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " out of range", "layer");
    }
    if (value >= variables_[layer].size()) {
        throw Error(ErrorCode::ValueOutOfDomain,
                    "value " + std::to_string(value) + " outside the domain of '" + variables_[layer].name + "'",
                    "value");
    }
    std::unordered_map<NodeRef, NodeRef> memo;
    auto visit = [&](auto& self, NodeRef n) -> NodeRef {
        const std::uint32_t l = nodes_[n].layer;
        if (l > layer) return n;
        if (l == layer) return kids(n)[value];
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        std::vector<NodeRef> out(variables_[l].size());
        for (std::size_t v = 0; v < out.size(); ++v) out[v] = self(self, kids(n)[v]);
        NodeRef r = make_node_locked(l, out);
        memo.emplace(n, r);
        return r;
    };
    return visit(visit, a);
}

NodeRef Manager::import(const Manager& other, NodeRef root) {
    if (&other == this) return root;
    if (!same_order(other)) {
        throw Error(ErrorCode::OrderMismatch, "diagrams use different variable orders", "order");
    }
    struct Copied {
        std::uint32_t layer;
        std::vector<NodeRef> children;
    };
    std::unordered_map<NodeRef, Copied> snapshot;
    {
        std::shared_lock lock(other.mutex_);
        other.check_ref(root);
        std::vector<NodeRef> stack{root};
        while (!stack.empty()) {
            NodeRef n = stack.back();
            stack.pop_back();
            if (n <= kTrue || snapshot.contains(n)) continue;
            auto k = other.kids(n);
            snapshot.emplace(n, Copied{other.nodes_[n].layer, {k.begin(), k.end()}});
            stack.insert(stack.end(), k.begin(), k.end());
        }
    }
    std::unique_lock lock(mutex_);
    std::unordered_map<NodeRef, NodeRef> memo;
    auto visit = [&](auto& self, NodeRef n) -> NodeRef {
        if (n <= kTrue) return n;
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        const Copied& c = snapshot.at(n);
        std::vector<NodeRef> out(c.children.size());
        for (std::size_t v = 0; v < out.size(); ++v) out[v] = self(self, c.children[v]);
        NodeRef r = make_node_locked(c.layer, out);
        memo.emplace(n, r);
        return r;
    };
    return visit(visit, root);
}

Mdd Manager::wrap(NodeRef root) {
    check_ref(root);
    return Mdd(shared_from_this(), root, std::vector<std::optional<std::uint32_t>>(variables_.size()));
}

Mdd Manager::constant(bool value) {
    return wrap(value ? kTrue : kFalse);
}

Mdd Manager::literal(std::size_t layer, std::span<const std::uint32_t> accepted) {
    if (layer >= variables_.size()) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " out of range", "layer");
    }
    std::vector<NodeRef> children(variables_[layer].size(), kFalse);
    for (auto v : accepted) {
        if (v >= children.size()) {
            throw Error(ErrorCode::ValueOutOfDomain, "value " + std::to_string(v) + " out of domain", "value");
        }
        children[v] = kTrue;
    }
    return wrap(make_node(layer, children));
}

Mdd::Mdd(std::shared_ptr<Manager> manager, NodeRef root, std::vector<std::optional<std::uint32_t>> fixed)
    : manager_(std::move(manager)), root_(root), fixed_(std::move(fixed)) {
    if (!manager_) throw Error(ErrorCode::InvalidArgument, "diagram without manager", "manager");
    if (fixed_.size() != manager_->variable_count()) {
        throw Error(ErrorCode::InvalidArgument, "fixed-layer vector does not match the variable count", "fixed");
    }
}

std::vector<NodeRef> Mdd::reachable_nodes() const {
    std::shared_lock lock(manager_->mutex_);
    std::vector<char> seen(manager_->nodes_.size(), 0);
    std::vector<NodeRef> stack{root_};
    std::vector<NodeRef> out;
    while (!stack.empty()) {
        NodeRef n = stack.back();
        stack.pop_back();
        if (seen[n]) continue;
        seen[n] = 1;
        out.push_back(n);
        if (n <= kTrue) continue;
        for (NodeRef c : manager_->kids(n)) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Mdd::node_count() const {
    auto nodes = reachable_nodes();
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](NodeRef n) { return n > kTrue; }));
}

Mdd apply(Op op, const Mdd& a, const Mdd& b) {
    auto manager = a.manager();
    NodeRef rb = b.root();
    if (b.manager() != manager) rb = manager->import(*b.manager(), rb);

    std::vector<std::optional<std::uint32_t>> fixed = a.fixed();
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        const auto& fb = b.fixed()[i];
        if (fixed[i] && fb && *fixed[i] != *fb) {
            throw Error(ErrorCode::InvalidArgument,
                        "operands fix layer " + std::to_string(i) + " to different values", "fixed");
        }
        if (!fixed[i]) fixed[i] = fb;
    }
    NodeRef ra = a.root();
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (!fixed[i]) continue;
        if (!a.fixed()[i]) ra = manager->restrict(ra, i, *fixed[i]);
        if (!b.fixed()[i]) rb = manager->restrict(rb, i, *fixed[i]);
    }
    return Mdd(manager, manager->apply(op, ra, rb), std::move(fixed));
}

Mdd negate(const Mdd& a) {
    return Mdd(a.manager(), a.manager()->negate(a.root()), a.fixed());
}

Mdd restrict(const Mdd& m, std::size_t layer, std::uint32_t value) {
    if (layer >= m.variable_count()) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " out of range", "layer");
    }
    if (value >= m.manager()->variable(layer).size()) {
        throw Error(ErrorCode::ValueOutOfDomain,
                    "value " + std::to_string(value) + " outside the domain of '" +
                        m.manager()->variable(layer).name + "'",
                    "value");
    }
    if (m.fixed()[layer]) {
        if (*m.fixed()[layer] == value) return m;
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(layer) + " is already fixed", "layer");
    }
    auto fixed = m.fixed();
    fixed[layer] = value;
    return Mdd(m.manager(), m.manager()->restrict(m.root(), layer, value), std::move(fixed));
}

BigCount count_solutions(const Mdd& m) {
    const Manager& mgr = *m.manager();
    std::shared_lock lock(mgr.mutex_);
    const std::size_t k = mgr.variables_.size();
    // free_prefix[i] = product of free domain sizes over layers [0, i).
    std::vector<BigCount> free_prefix(k + 1, BigCount(1));
    for (std::size_t i = 0; i < k; ++i) {
        free_prefix[i + 1] = free_prefix[i] * (m.fixed()[i] ? 1u : mgr.variables_[i].size());
    }
    auto gap = [&](std::size_t from, std::size_t to) { return BigCount(free_prefix[to] / free_prefix[from]); };

    std::unordered_map<NodeRef, BigCount> memo;
    auto visit = [&](auto& self, NodeRef n) -> BigCount {
        if (n == kFalse) return 0;
        if (n == kTrue) return 1;
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        const std::size_t layer = mgr.nodes_[n].layer;
        auto kids = mgr.kids(n);
        BigCount total = 0;
        if (m.fixed()[layer]) {
            NodeRef c = kids[*m.fixed()[layer]];
            total = gap(layer + 1, mgr.nodes_[c].layer) * self(self, c);
        } else {
            for (NodeRef c : kids) {
                if (c == kFalse) continue;
                total += gap(layer + 1, mgr.nodes_[c].layer) * self(self, c);
            }
        }
        memo.emplace(n, total);
        return total;
    };
    return gap(0, mgr.nodes_[m.root()].layer) * visit(visit, m.root());
}

std::vector<Assignment> enumerate_paths(const Mdd& m, std::size_t limit) {
    const Manager& mgr = *m.manager();
    std::shared_lock lock(mgr.mutex_);
    const std::size_t k = mgr.variables_.size();
    std::vector<Assignment> out;
    if (limit == 0) return out;
    Assignment current(k, 0);
    auto visit = [&](auto& self, std::size_t layer, NodeRef n) -> void {
        if (n == kFalse || out.size() >= limit) return;
        if (layer == k) {
            out.push_back(current);
            return;
        }
        const bool decides = mgr.nodes_[n].layer == layer;
        auto step = [&](std::uint32_t v) {
            current[layer] = v;
            self(self, layer + 1, decides ? mgr.kids(n)[v] : n);
        };
        if (m.fixed()[layer]) {
            step(*m.fixed()[layer]);
        } else {
            const auto d = static_cast<std::uint32_t>(mgr.variables_[layer].size());
            for (std::uint32_t v = 0; v < d && out.size() < limit; ++v) step(v);
        }
    };
    visit(visit, 0, m.root());
    return out;
}

bool evaluate(const Mdd& m, std::span<const std::uint32_t> assignment) {
    const Manager& mgr = *m.manager();
    std::shared_lock lock(mgr.mutex_);
    if (assignment.size() != mgr.variables_.size()) {
        throw Error(ErrorCode::ArityMismatch, "assignment length differs from the variable count", "assignment");
    }
    NodeRef n = m.root();
    while (n > kTrue) {
        const std::size_t layer = mgr.nodes_[n].layer;
        std::uint32_t v = m.fixed()[layer] ? *m.fixed()[layer] : assignment[layer];
        if (v >= mgr.variables_[layer].size()) {
            throw Error(ErrorCode::ValueOutOfDomain, "assignment value out of domain", "assignment");
        }
        n = mgr.kids(n)[v];
    }
    return n == kTrue;
}

Mdd reduce(const std::shared_ptr<Manager>& manager, const RawMdd& raw) {
    const std::size_t k = manager->variable_count();
    auto is_terminal = [](std::size_t c) { return c == RawMdd::kFalse || c == RawMdd::kTrue; };
    auto layer_of = [&](std::size_t c) { return is_terminal(c) ? k : raw.nodes[c].layer; };
    if (!is_terminal(raw.root) && raw.root >= raw.nodes.size()) {
        throw Error(ErrorCode::NotLayered, "root index out of range", "root");
    }
    for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
        const auto& node = raw.nodes[i];
        if (node.layer >= k) throw Error(ErrorCode::NotLayered, "node " + std::to_string(i) + " has no variable layer", "layer");
        if (node.children.size() != manager->variable(node.layer).size()) {
            throw Error(ErrorCode::ArityMismatch, "node " + std::to_string(i) + " has a wrong child count", "children");
        }
        for (std::size_t c : node.children) {
            if (!is_terminal(c) && c >= raw.nodes.size()) {
                throw Error(ErrorCode::NotLayered, "node " + std::to_string(i) + " has a dangling child", "children");
            }
            if (layer_of(c) <= node.layer) {
                throw Error(ErrorCode::NotLayered, "node " + std::to_string(i) + " points upward or sideways", "children");
            }
        }
    }
    // Strictly increasing layers along edges, so deepest-first is a valid
    // bottom-up order.
    std::vector<std::size_t> order(raw.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw.nodes[a].layer > raw.nodes[b].layer; });
    std::vector<NodeRef> mapped(raw.nodes.size(), kFalse);
    auto resolve = [&](std::size_t c) {
        if (c == RawMdd::kFalse) return kFalse;
        if (c == RawMdd::kTrue) return kTrue;
        return mapped[c];
    };
    std::vector<NodeRef> children;
    for (std::size_t i : order) {
        children.clear();
        for (std::size_t c : raw.nodes[i].children) children.push_back(resolve(c));
        mapped[i] = manager->make_node(raw.nodes[i].layer, children);
    }
    return manager->wrap(resolve(raw.root));
}

RawMdd to_raw(const Mdd& m) {
    RawMdd raw;
    std::unordered_map<NodeRef, std::size_t> index;
    auto nodes = m.reachable_nodes();
    for (NodeRef n : nodes) {
        if (n > kTrue) {
            index[n] = raw.nodes.size();
            raw.nodes.push_back(RawMdd::Node{m.manager()->layer_of(n), {}});
        }
    }
    auto map_ref = [&](NodeRef n) {
        if (n == kFalse) return RawMdd::kFalse;
        if (n == kTrue) return RawMdd::kTrue;
        return index.at(n);
    };
    for (NodeRef n : nodes) {
        if (n <= kTrue) continue;
        for (NodeRef c : m.manager()->children(n)) raw.nodes[index[n]].children.push_back(map_ref(c));
    }
    raw.root = map_ref(m.root());
    return raw;
}

}  // namespace kgmdd::mdd
