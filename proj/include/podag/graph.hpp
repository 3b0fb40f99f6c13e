#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace podag {

/// Dense 0-based node index. Labels are metadata only.
using Node = int;

/// Sorted, duplicate-free list of nodes.
using NodeSet = std::vector<Node>;

/// Sorts and deduplicates.
NodeSet make_node_set(std::vector<Node> nodes);
bool contains(const NodeSet& set, Node v);
NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);
NodeSet set_without(const NodeSet& a, Node v);

struct Edge {
    Node from = 0;
    Node to = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Unordered node pair stored as (min, max).
struct NodePair {
    Node a = 0;
    Node b = 0;

    NodePair() = default;
    NodePair(Node x, Node y) : a(x < y ? x : y), b(x < y ? y : x) {}

    auto operator<=>(const NodePair&) const = default;
};

/// Default label for node i: "V<i+1>".
std::string default_label(Node i);

class Dag {
public:
    /// Throws ArgumentError on self-loops, duplicates, bad indices or a cycle.
    Dag(int n_nodes, std::vector<Edge> edges, std::vector<std::string> labels = {});

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(Node v) const;

    const NodeSet& parents(Node v) const;
    const NodeSet& children(Node v) const;
    NodeSet neighbors(Node v) const;
    bool has_edge(Node from, Node to) const;
    bool adjacent(Node a, Node b) const;

    /// One topological order, ties broken by ascending index.
    const std::vector<Node>& topological_order() const { return topo_; }

    void check_node(Node v) const;

private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::string> labels_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<std::uint8_t> adj_;  // adj_[from * n + to]
    std::vector<Node> topo_;
};

/// Partially directed graph. Between any pair there is no edge, a directed
/// edge, or an undirected edge.
class Pdag {
public:
    explicit Pdag(int n_nodes = 0);
    Pdag(int n_nodes, const std::vector<Edge>& directed,
         const std::vector<NodePair>& undirected);

    static Pdag from_dag(const Dag& g);
    /// Undirected skeleton of g.
    static Pdag skeleton_of(const Dag& g);

    int size() const { return n_; }
    bool adjacent(Node a, Node b) const;
    bool is_directed(Node from, Node to) const;
    bool is_undirected(Node a, Node b) const;

    std::vector<Edge> directed_edges() const;
    std::vector<NodePair> undirected_edges() const;
    NodeSet neighbors(Node v) const;
    std::size_t num_edges() const;

    /// Same adjacencies, all undirected.
    Pdag skeleton() const;
    bool same_skeleton(const Pdag& other) const;

    void add_undirected(Node a, Node b);
    void add_directed(Node from, Node to);
    /// Turns a–b (or b→a) into a→b.
    void orient(Node from, Node to);
    void remove(Node a, Node b);

    bool operator==(const Pdag& other) const = default;

    void check_node(Node v) const;

private:
    bool mark(Node a, Node b) const { return m_[static_cast<std::size_t>(a) * n_ + b] != 0; }
    void set_mark(Node a, Node b, bool v) { m_[static_cast<std::size_t>(a) * n_ + b] = v ? 1 : 0; }

    int n_;
    // m_[a*n+b] = 1 when the edge between a and b has a tail at a and may
    // point to b. a→b: m(a,b)=1, m(b,a)=0; a–b: both 1.
    std::vector<std::uint8_t> m_;
};

/// Separating sets recorded during a skeleton search.
class SepsetMap {
public:
    /// Throws ArgumentError if the pair already has a set or the set
    /// contains an endpoint.
    void record(Node a, Node b, NodeSet separator);
    bool contains(Node a, Node b) const;
    /// Throws ArgumentError when absent.
    const NodeSet& get(Node a, Node b) const;
    const NodeSet* find(Node a, Node b) const;
    std::size_t size() const { return map_.size(); }
    const std::map<NodePair, NodeSet>& entries() const { return map_; }

private:
    std::map<NodePair, NodeSet> map_;
};

/// Per-node sets of known predecessors and successors. Symmetric: a is in
/// before(b) iff b is in after(a).
class WeakOrdering {
public:
    WeakOrdering() = default;
    /// Closes the relation symmetrically and validates it. Throws
    /// ArgumentError when a node precedes itself or a pair is ordered both ways.
    WeakOrdering(int n_nodes, std::vector<NodeSet> before, std::vector<NodeSet> after);

    int size() const { return static_cast<int>(before_.size()); }
    const NodeSet& before(Node j) const { return before_.at(j); }
    const NodeSet& after(Node j) const { return after_.at(j); }
    /// Nodes with no ordering information relative to j (excluding j).
    NodeSet unordered_with(Node j) const;
    bool precedes(Node a, Node b) const;
    bool ordered(Node a, Node b) const { return precedes(a, b) || precedes(b, a); }

    bool operator==(const WeakOrdering&) const = default;

private:
    std::vector<NodeSet> before_;
    std::vector<NodeSet> after_;
};

/// Layering V1 ≺ … ≺ VL plus a set V′ of nodes without ordering information,
/// with optional per-node before/after overrides.
class PartialOrdering {
public:
    PartialOrdering() = default;
    PartialOrdering(int n_nodes, std::vector<NodeSet> layers, NodeSet unordered = {});

    int size() const { return n_; }
    int num_layers() const { return static_cast<int>(layers_.size()); }
    const std::vector<NodeSet>& layers() const { return layers_; }
    const NodeSet& unordered() const { return unordered_; }
    /// Layer index, or -1 for nodes in V′.
    int layer_of(Node v) const;
    bool is_layered(Node v) const { return layer_of(v) >= 0; }
    /// Union of layers strictly before v's layer (empty for V′ nodes).
    NodeSet earlier_than(Node v) const;
    /// Nodes in v's own layer excluding v (empty for V′ nodes).
    NodeSet same_layer(Node v) const;

    /// Replaces the before/after sets of node j. For a layered j the sets
    /// must lie in strictly earlier / strictly later layers.
    void set_override(Node j, NodeSet before, NodeSet after);
    bool has_overrides() const { return !overrides_.empty(); }

    /// Pairwise relation implied by the layers and overrides.
    WeakOrdering relation() const;

    /// True when every edge of g goes from an earlier layer or within a layer.
    bool consistent_with(const Dag& g) const;

private:
    int n_ = 0;
    std::vector<NodeSet> layers_;
    NodeSet unordered_;
    std::vector<int> layer_index_;
    std::map<Node, std::pair<NodeSet, NodeSet>> overrides_;
};

// ---------------------------------------------------------------------------
// Queries

/// s together with every strict ancestor of a member of s.
NodeSet ancestors(const Dag& g, const NodeSet& s);

/// d-separation of i and j given s, by reachability in the moralized
/// ancestral graph of {i, j} ∪ s.
bool is_dsep(const Dag& g, Node i, Node j, const NodeSet& s);

/// Reachability from `from` to `to` along directed edges.
bool has_directed_path(const Dag& g, Node from, Node to);

// ---------------------------------------------------------------------------
// Orientation

enum class ConflictPolicy {
    kError,  ///< throw InconsistencyError
    kSkip,   ///< keep the first orientation, count the conflict
};

struct OrientationStats {
    int conflicts = 0;
};

/// Orients i→j←k for every unshielded triple i–j–k with j outside the
/// recorded separating set of (i, k). Triples whose pair has no recorded set
/// are left alone. Existing directed edges are kept as background.
Pdag orient_v_structures(const Pdag& p, const SepsetMap& sepsets,
                         ConflictPolicy policy = ConflictPolicy::kError,
                         OrientationStats* stats = nullptr);

/// Closure of p under Meek's rules R1–R4 after applying the background
/// orientations. Edges are scanned lexicographically by (min, max).
Pdag apply_meek_rules(const Pdag& p, const std::vector<Edge>& background = {},
                      ConflictPolicy policy = ConflictPolicy::kError,
                      OrientationStats* stats = nullptr);

/// Unshielded colliders a→c←b (a < b) of a DAG.
std::vector<std::pair<NodePair, Node>> v_structures(const Dag& g);

}  // namespace podag
