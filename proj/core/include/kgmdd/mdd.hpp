#pragma once
// Reduced ordered multiple-valued decision diagrams.
//
// A Manager owns the variable order, the node store and the unique table.
// Nodes are hash-consed: make_node never stores a node whose children are
// all equal (that child is returned instead) and never stores two nodes on
// one layer with the same child array. Consequently two diagrams over the
// same manager represent the same function iff their roots are equal.
//
// Edges may skip layers; a skipped layer means the function does not depend
// on that variable along the edge. Layer k (one past the last variable)
// holds the two terminals FALSE (node 0) and TRUE (node 1).
//
// Threading: node creation takes an exclusive lock on the manager, queries
// take a shared lock. Finished diagrams can be queried from many threads.

#include "kgmdd/ids.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kgmdd::mdd {

using NodeRef = std::uint32_t;
inline constexpr NodeRef kFalse = 0;
inline constexpr NodeRef kTrue = 1;

using BigCount = boost::multiprecision::cpp_int;
using Assignment = std::vector<std::uint32_t>;

struct DomainValue {
    std::string label;
    std::optional<EntityId> entity;

    friend bool operator==(const DomainValue&, const DomainValue&) = default;
};

struct VariableSpec {
    std::string name;
    std::vector<DomainValue> values;
    std::optional<EntityId> entity;  // set when the variable itself stands for an entity

    [[nodiscard]] std::size_t size() const { return values.size(); }
    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Domain {0..size-1} with labels "0", "1", ...
VariableSpec plain_variable(std::string name, std::size_t size);
/// Domain {inactive, active}.
VariableSpec activity_variable(std::string name, std::optional<EntityId> entity = std::nullopt);

enum class Op { Union, Intersection };

class Mdd;

class Manager : public std::enable_shared_from_this<Manager> {
public:
    /// Throws InvalidArgument for an empty domain or repeated value labels.
    static std::shared_ptr<Manager> create(std::vector<VariableSpec> variables);

    [[nodiscard]] std::size_t variable_count() const { return variables_.size(); }
    [[nodiscard]] const VariableSpec& variable(std::size_t layer) const { return variables_.at(layer); }
    [[nodiscard]] std::span<const VariableSpec> variables() const { return variables_; }
    [[nodiscard]] bool same_order(const Manager& other) const;

    /// Reduction rules applied on insert. Throws ArityMismatch when the child
    /// count differs from the layer's domain size and NotLayered when a child
    /// is not strictly below `layer`.
    NodeRef make_node(std::size_t layer, std::span<const NodeRef> children);

    [[nodiscard]] std::size_t layer_of(NodeRef node) const;
    /// Copy of the child array (empty for terminals).
    [[nodiscard]] std::vector<NodeRef> children(NodeRef node) const;
    [[nodiscard]] NodeRef child(NodeRef node, std::uint32_t value) const;
    /// Every stored node including the two terminals.
    [[nodiscard]] std::size_t stored_node_count() const;

    NodeRef apply(Op op, NodeRef a, NodeRef b);
    NodeRef negate(NodeRef a);
    NodeRef restrict(NodeRef a, std::size_t layer, std::uint32_t value);
    /// Copies a diagram from a manager with the same variable order.
    NodeRef import(const Manager& other, NodeRef root);

    /// Wraps a root of this manager as a diagram with no fixed layers.
    Mdd wrap(NodeRef root);
    Mdd constant(bool value);
    /// TRUE iff x_layer is one of `accepted`.
    Mdd literal(std::size_t layer, std::span<const std::uint32_t> accepted);

private:
    friend class Mdd;
    friend BigCount count_solutions(const Mdd& m);
    friend std::vector<Assignment> enumerate_paths(const Mdd& m, std::size_t limit);
    friend bool evaluate(const Mdd& m, std::span<const std::uint32_t> assignment);

    explicit Manager(std::vector<VariableSpec> variables);

    struct NodeInfo {
        std::uint32_t layer;
        std::uint32_t offset;  // into child_pool_
    };

    NodeRef make_node_locked(std::size_t layer, std::span<const NodeRef> children);
    NodeRef apply_locked(Op op, NodeRef a, NodeRef b);
    NodeRef negate_locked(NodeRef a);
    [[nodiscard]] std::size_t hash_node(std::size_t layer, std::span<const NodeRef> children) const;
    [[nodiscard]] bool node_equals(NodeRef n, std::size_t layer, std::span<const NodeRef> children) const;
    void grow_table();
    [[nodiscard]] std::span<const NodeRef> kids(NodeRef n) const {
        return {child_pool_.data() + nodes_[n].offset, variables_[nodes_[n].layer].size()};
    }
    void check_ref(NodeRef n) const;

    std::vector<VariableSpec> variables_;
    std::vector<NodeInfo> nodes_;
    std::vector<NodeRef> child_pool_;
    std::vector<NodeRef> table_;  // open addressing; kFalse marks an empty slot
    std::size_t table_used_ = 0;
    std::unordered_map<std::uint64_t, NodeRef> union_cache_;
    std::unordered_map<std::uint64_t, NodeRef> intersection_cache_;
    std::unordered_map<NodeRef, NodeRef> negate_cache_;
    mutable std::shared_mutex mutex_;
};

/// A root in a manager plus the set of layers fixed by restriction. Fixed
/// layers are excluded from counting and always take their fixed value in
/// enumeration.
class Mdd {
public:
    Mdd(std::shared_ptr<Manager> manager, NodeRef root, std::vector<std::optional<std::uint32_t>> fixed);

    [[nodiscard]] const std::shared_ptr<Manager>& manager() const { return manager_; }
    [[nodiscard]] NodeRef root() const { return root_; }
    [[nodiscard]] std::size_t variable_count() const { return manager_->variable_count(); }
    [[nodiscard]] const std::vector<std::optional<std::uint32_t>>& fixed() const { return fixed_; }
    [[nodiscard]] bool is_false() const { return root_ == kFalse; }
    [[nodiscard]] bool is_true() const { return root_ == kTrue; }

    /// Non-terminal nodes reachable from the root.
    [[nodiscard]] std::size_t node_count() const;
    /// Reachable nodes in ascending order, terminals included.
    [[nodiscard]] std::vector<NodeRef> reachable_nodes() const;

    friend bool operator==(const Mdd& a, const Mdd& b) {
        return a.manager_ == b.manager_ && a.root_ == b.root_ && a.fixed_ == b.fixed_;
    }

private:
    std::shared_ptr<Manager> manager_;
    NodeRef root_;
    std::vector<std::optional<std::uint32_t>> fixed_;
};

/// Pointwise OR / AND. Operands must share a variable order (OrderMismatch
/// otherwise); a diagram from another manager with the same order is
/// imported first. Layers fixed in either operand are fixed in the result.
Mdd apply(Op op, const Mdd& a, const Mdd& b);
Mdd negate(const Mdd& a);

/// Cofactor x_layer = value. Throws ValueOutOfDomain.
Mdd restrict(const Mdd& m, std::size_t layer, std::uint32_t value);

/// Number of assignments to the free layers that reach TRUE.
BigCount count_solutions(const Mdd& m);
/// Satisfying assignments in lexicographic order, at most `limit`.
std::vector<Assignment> enumerate_paths(const Mdd& m, std::size_t limit);
/// Fixed layers use their fixed value whatever the assignment says.
bool evaluate(const Mdd& m, std::span<const std::uint32_t> assignment);

/// An unreduced layered diagram, e.g. a complete decision tree.
struct RawMdd {
    static constexpr std::size_t kFalse = static_cast<std::size_t>(-1);
    static constexpr std::size_t kTrue = static_cast<std::size_t>(-2);

    struct Node {
        std::size_t layer = 0;
        std::vector<std::size_t> children;  // node indices or kFalse / kTrue
    };
    std::vector<Node> nodes;
    std::size_t root = kFalse;
};

/// Canonical form of a raw diagram. Throws NotLayered when a child does not
/// lie on a deeper layer, ArityMismatch on a wrong child count.
Mdd reduce(const std::shared_ptr<Manager>& manager, const RawMdd& raw);
RawMdd to_raw(const Mdd& m);

/// Top-down construction from a state machine. `next(layer, state, value)`
/// returns the successor state or nullopt for FALSE; `accept(state)` decides
/// the terminal after the last layer. Equal states on a layer share a node.
template <class State, class Hash = std::hash<State>, class Next, class Accept>
Mdd build_top_down(const std::shared_ptr<Manager>& manager, const State& root, Next&& next, Accept&& accept) {
    const std::size_t k = manager->variable_count();
    std::vector<std::unordered_map<State, NodeRef, Hash>> memo(k + 1);
    auto visit = [&](auto& self, std::size_t layer, const State& state) -> NodeRef {
        if (layer == k) return accept(state) ? kTrue : kFalse;
        auto& seen = memo[layer];
        if (auto it = seen.find(state); it != seen.end()) return it->second;
        const std::size_t d = manager->variable(layer).size();
        std::vector<NodeRef> children(d, kFalse);
        for (std::uint32_t v = 0; v < d; ++v) {
            std::optional<State> succ = next(layer, state, v);
            if (succ) children[v] = self(self, layer + 1, *succ);
        }
        NodeRef node = manager->make_node(layer, children);
        seen.emplace(state, node);
        return node;
    };
    return manager->wrap(visit(visit, 0, root));
}

}  // namespace kgmdd::mdd
