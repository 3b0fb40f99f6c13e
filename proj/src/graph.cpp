#include "podag/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

#include "podag/errors.hpp"

namespace podag {

NodeSet make_node_set(std::vector<Node> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

bool contains(const NodeSet& set, Node v) {
    return std::binary_search(set.begin(), set.end(), v);
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet set_without(const NodeSet& a, Node v) {
    NodeSet out;
    out.reserve(a.size());
    for (Node x : a) {
        if (x != v) out.push_back(x);
    }
    return out;
}

std::string default_label(Node i) { return "V" + std::to_string(i + 1); }

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(int n_nodes, std::vector<Edge> edges, std::vector<std::string> labels)
    : n_(n_nodes), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (n_ < 0) throw ArgumentError("negative node count");
    if (labels_.empty()) {
        labels_.reserve(n_);
        for (int i = 0; i < n_; ++i) labels_.push_back(default_label(i));
    } else if (static_cast<int>(labels_.size()) != n_) {
        throw ArgumentError("label count does not match node count");
    }
    {
        std::vector<std::string> sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw ArgumentError("duplicate node label " + *dup);
    }
    std::sort(edges_.begin(), edges_.end());
    adj_.assign(static_cast<std::size_t>(n_) * n_, 0);
    parents_.assign(n_, {});
    children_.assign(n_, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [u, v] = edges_[e];
        if (u < 0 || v < 0 || u >= n_ || v >= n_) {
            throw ArgumentError("edge endpoint out of range");
        }
        if (u == v) throw ArgumentError("self-loop on node " + labels_[u]);
        if (e > 0 && edges_[e - 1] == edges_[e]) {
            throw ArgumentError("duplicate edge " + labels_[u] + "->" + labels_[v]);
        }
        adj_[static_cast<std::size_t>(u) * n_ + v] = 1;
        parents_[v].push_back(u);
        children_[u].push_back(v);
    }
    for (int v = 0; v < n_; ++v) {
        std::sort(parents_[v].begin(), parents_[v].end());
        std::sort(children_[v].begin(), children_[v].end());
        if (adj_[static_cast<std::size_t>(v) * n_ + v]) throw ArgumentError("self-loop");
    }

    // Kahn's algorithm with a min-heap so the order is canonical.
    std::vector<int> indeg(n_);
    for (int v = 0; v < n_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::priority_queue<Node, std::vector<Node>, std::greater<>> ready;
    for (int v = 0; v < n_; ++v) {
        if (indeg[v] == 0) ready.push(v);
    }
    topo_.reserve(n_);
    while (!ready.empty()) {
        Node v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (Node c : children_[v]) {
            if (--indeg[c] == 0) ready.push(c);
        }
    }
    if (static_cast<int>(topo_.size()) != n_) {
        throw ArgumentError("edge set contains a directed cycle");
    }
}

void Dag::check_node(Node v) const {
    if (v < 0 || v >= n_) {
        throw ArgumentError("node index " + std::to_string(v) + " out of range [0, " +
                            std::to_string(n_) + ")");
    }
}

const std::string& Dag::label(Node v) const {
    check_node(v);
    return labels_[v];
}

const NodeSet& Dag::parents(Node v) const {
    check_node(v);
    return parents_[v];
}

const NodeSet& Dag::children(Node v) const {
    check_node(v);
    return children_[v];
}

NodeSet Dag::neighbors(Node v) const { return set_union(parents(v), children(v)); }

bool Dag::has_edge(Node from, Node to) const {
    check_node(from);
    check_node(to);
    return adj_[static_cast<std::size_t>(from) * n_ + to] != 0;
}

bool Dag::adjacent(Node a, Node b) const { return has_edge(a, b) || has_edge(b, a); }

// ---------------------------------------------------------------------------
// Pdag

Pdag::Pdag(int n_nodes) : n_(n_nodes), m_(static_cast<std::size_t>(n_nodes) * n_nodes, 0) {
    if (n_nodes < 0) throw ArgumentError("negative node count");
}

Pdag::Pdag(int n_nodes, const std::vector<Edge>& directed, const std::vector<NodePair>& undirected)
    : Pdag(n_nodes) {
    for (const auto& e : directed) add_directed(e.from, e.to);
    for (const auto& e : undirected) add_undirected(e.a, e.b);
}

Pdag Pdag::from_dag(const Dag& g) { return Pdag(g.size(), g.edges(), {}); }

Pdag Pdag::skeleton_of(const Dag& g) { return from_dag(g).skeleton(); }

void Pdag::check_node(Node v) const {
    if (v < 0 || v >= n_) {
        throw ArgumentError("node index " + std::to_string(v) + " out of range");
    }
}

bool Pdag::adjacent(Node a, Node b) const {
    check_node(a);
    check_node(b);
    return mark(a, b) || mark(b, a);
}

bool Pdag::is_directed(Node from, Node to) const {
    check_node(from);
    check_node(to);
    return mark(from, to) && !mark(to, from);
}

bool Pdag::is_undirected(Node a, Node b) const {
    check_node(a);
    check_node(b);
    return mark(a, b) && mark(b, a);
}

std::vector<Edge> Pdag::directed_edges() const {
    std::vector<Edge> out;
    for (Node a = 0; a < n_; ++a) {
        for (Node b = 0; b < n_; ++b) {
            if (mark(a, b) && !mark(b, a)) out.push_back({a, b});
        }
    }
    return out;
}

std::vector<NodePair> Pdag::undirected_edges() const {
    std::vector<NodePair> out;
    for (Node a = 0; a < n_; ++a) {
        for (Node b = a + 1; b < n_; ++b) {
            if (mark(a, b) && mark(b, a)) out.emplace_back(a, b);
        }
    }
    return out;
}

NodeSet Pdag::neighbors(Node v) const {
    check_node(v);
    NodeSet out;
    for (Node u = 0; u < n_; ++u) {
        if (mark(u, v) || mark(v, u)) out.push_back(u);
    }
    return out;
}

std::size_t Pdag::num_edges() const {
    std::size_t count = 0;
    for (Node a = 0; a < n_; ++a) {
        for (Node b = a + 1; b < n_; ++b) {
            if (mark(a, b) || mark(b, a)) ++count;
        }
    }
    return count;
}

Pdag Pdag::skeleton() const {
    Pdag out(n_);
    for (Node a = 0; a < n_; ++a) {
        for (Node b = a + 1; b < n_; ++b) {
            if (mark(a, b) || mark(b, a)) out.add_undirected(a, b);
        }
    }
    return out;
}

bool Pdag::same_skeleton(const Pdag& other) const {
    if (other.n_ != n_) return false;
    for (Node a = 0; a < n_; ++a) {
        for (Node b = a + 1; b < n_; ++b) {
            if (adjacent(a, b) != other.adjacent(a, b)) return false;
        }
    }
    return true;
}

void Pdag::add_undirected(Node a, Node b) {
    check_node(a);
    check_node(b);
    if (a == b) throw ArgumentError("self-loop");
    if (adjacent(a, b)) throw ArgumentError("pair already adjacent");
    set_mark(a, b, true);
    set_mark(b, a, true);
}

void Pdag::add_directed(Node from, Node to) {
    check_node(from);
    check_node(to);
    if (from == to) throw ArgumentError("self-loop");
    if (adjacent(from, to)) throw ArgumentError("pair already adjacent");
    set_mark(from, to, true);
}

void Pdag::orient(Node from, Node to) {
    if (!adjacent(from, to)) throw ArgumentError("cannot orient a non-adjacent pair");
    set_mark(from, to, true);
    set_mark(to, from, false);
}

void Pdag::remove(Node a, Node b) {
    check_node(a);
    check_node(b);
    set_mark(a, b, false);
    set_mark(b, a, false);
}

// ---------------------------------------------------------------------------
// SepsetMap

void SepsetMap::record(Node a, Node b, NodeSet separator) {
    if (a == b) throw ArgumentError("separating set for a node with itself");
    separator = make_node_set(std::move(separator));
    if (podag::contains(separator, a) || podag::contains(separator, b)) {
        throw ArgumentError("separating set contains an endpoint");
    }
    auto [it, inserted] = map_.emplace(NodePair(a, b), std::move(separator));
    if (!inserted) throw ArgumentError("pair already has a separating set");
}

bool SepsetMap::contains(Node a, Node b) const { return map_.count(NodePair(a, b)) > 0; }

const NodeSet* SepsetMap::find(Node a, Node b) const {
    auto it = map_.find(NodePair(a, b));
    return it == map_.end() ? nullptr : &it->second;
}

const NodeSet& SepsetMap::get(Node a, Node b) const {
    const NodeSet* s = find(a, b);
    if (s == nullptr) {
        throw ArgumentError("no separating set for (" + std::to_string(a) + ", " +
                            std::to_string(b) + ")");
    }
    return *s;
}

// ---------------------------------------------------------------------------
// WeakOrdering

WeakOrdering::WeakOrdering(int n_nodes, std::vector<NodeSet> before, std::vector<NodeSet> after) {
    if (static_cast<int>(before.size()) != n_nodes || static_cast<int>(after.size()) != n_nodes) {
        throw ArgumentError("before/after sets must cover every node");
    }
    std::vector<std::vector<Node>> b(n_nodes), a(n_nodes);
    auto check = [&](Node v) {
        if (v < 0 || v >= n_nodes) throw ArgumentError("ordering node index out of range");
    };
    for (Node j = 0; j < n_nodes; ++j) {
        for (Node k : before[j]) {
            check(k);
            if (k == j) throw ArgumentError("node listed as its own predecessor");
            b[j].push_back(k);
            a[k].push_back(j);
        }
        for (Node k : after[j]) {
            check(k);
            if (k == j) throw ArgumentError("node listed as its own successor");
            a[j].push_back(k);
            b[k].push_back(j);
        }
    }
    before_.resize(n_nodes);
    after_.resize(n_nodes);
    for (Node j = 0; j < n_nodes; ++j) {
        before_[j] = make_node_set(std::move(b[j]));
        after_[j] = make_node_set(std::move(a[j]));
        if (!set_intersection(before_[j], after_[j]).empty()) {
            throw ArgumentError("node " + std::to_string(j) +
                                " has a neighbour ordered both before and after it");
        }
    }
}

NodeSet WeakOrdering::unordered_with(Node j) const {
    NodeSet out;
    const int n = size();
    const NodeSet& b = before_.at(j);
    const NodeSet& a = after_.at(j);
    for (Node v = 0; v < n; ++v) {
        if (v != j && !podag::contains(b, v) && !podag::contains(a, v)) out.push_back(v);
    }
    return out;
}

bool WeakOrdering::precedes(Node a, Node b) const { return podag::contains(before_.at(b), a); }

// ---------------------------------------------------------------------------
// PartialOrdering

PartialOrdering::PartialOrdering(int n_nodes, std::vector<NodeSet> layers, NodeSet unordered)
    : n_(n_nodes), unordered_(make_node_set(std::move(unordered))), layer_index_(n_nodes, -2) {
    for (auto& layer : layers) {
        NodeSet sorted = make_node_set(layer);
        if (sorted.size() != layer.size()) throw ArgumentError("layer lists a node twice");
        if (sorted.empty()) throw ArgumentError("empty layer");
        layers_.push_back(std::move(sorted));
    }
    auto claim = [&](Node v, int idx) {
        if (v < 0 || v >= n_) throw ArgumentError("ordering node index out of range");
        if (layer_index_[v] != -2) throw ArgumentError("node appears in two ordering blocks");
        layer_index_[v] = idx;
    };
    for (int l = 0; l < num_layers(); ++l) {
        for (Node v : layers_[l]) claim(v, l);
    }
    for (Node v : unordered_) claim(v, -1);
    for (Node v = 0; v < n_; ++v) {
        if (layer_index_[v] == -2) {
            throw ArgumentError("node " + std::to_string(v) + " missing from the ordering");
        }
    }
}

int PartialOrdering::layer_of(Node v) const {
    if (v < 0 || v >= n_) throw ArgumentError("node index out of range");
    return layer_index_[v];
}

NodeSet PartialOrdering::earlier_than(Node v) const {
    const int l = layer_of(v);
    NodeSet out;
    for (int i = 0; i < l; ++i) out.insert(out.end(), layers_[i].begin(), layers_[i].end());
    return make_node_set(std::move(out));
}

NodeSet PartialOrdering::same_layer(Node v) const {
    const int l = layer_of(v);
    if (l < 0) return {};
    return set_without(layers_[l], v);
}

void PartialOrdering::set_override(Node j, NodeSet before, NodeSet after) {
    const int l = layer_of(j);
    before = make_node_set(std::move(before));
    after = make_node_set(std::move(after));
    for (Node k : before) {
        const int lk = layer_of(k);
        if (k == j) throw ArgumentError("node listed as its own predecessor");
        if (l >= 0 && !(lk >= 0 && lk < l)) {
            throw ArgumentError("override predecessor not in a strictly earlier layer");
        }
    }
    for (Node k : after) {
        const int lk = layer_of(k);
        if (k == j) throw ArgumentError("node listed as its own successor");
        if (l >= 0 && !(lk > l)) {
            throw ArgumentError("override successor not in a strictly later layer");
        }
    }
    overrides_[j] = {std::move(before), std::move(after)};
}

WeakOrdering PartialOrdering::relation() const {
    std::vector<NodeSet> before(n_), after(n_);
    for (Node j = 0; j < n_; ++j) {
        auto it = overrides_.find(j);
        if (it != overrides_.end()) {
            before[j] = it->second.first;
            after[j] = it->second.second;
            continue;
        }
        const int l = layer_index_[j];
        if (l < 0) continue;
        auto plain = [&](Node v) { return !overrides_.contains(v); };
        for (int i = 0; i < num_layers(); ++i) {
            if (i == l) continue;
            for (Node v : layers_[i]) {
                if (plain(v)) (i < l ? before[j] : after[j]).push_back(v);
            }
        }
    }
    return WeakOrdering(n_, std::move(before), std::move(after));
}

bool PartialOrdering::consistent_with(const Dag& g) const {
    if (g.size() != n_) return false;
    for (const auto& e : g.edges()) {
        const int lf = layer_index_[e.from];
        const int lt = layer_index_[e.to];
        if (lf >= 0 && lt >= 0 && lf > lt) return false;
    }
    const WeakOrdering rel = relation();
    for (const auto& e : g.edges()) {
        if (rel.precedes(e.to, e.from)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Queries

NodeSet ancestors(const Dag& g, const NodeSet& s) {
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::deque<Node> queue;
    for (Node v : s) {
        g.check_node(v);
        if (!seen[v]) {
            seen[v] = 1;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        Node v = queue.front();
        queue.pop_front();
        for (Node p : g.parents(v)) {
            if (!seen[p]) {
                seen[p] = 1;
                queue.push_back(p);
            }
        }
    }
    NodeSet out;
    for (Node v = 0; v < g.size(); ++v) {
        if (seen[v]) out.push_back(v);
    }
    return out;
}

bool is_dsep(const Dag& g, Node i, Node j, const NodeSet& s) {
    g.check_node(i);
    g.check_node(j);
    if (i == j) throw ArgumentError("d-separation query with i == j");
    for (Node v : s) {
        g.check_node(v);
        if (v == i || v == j) throw ArgumentError("conditioning set contains an endpoint");
    }
    const int n = g.size();
    NodeSet seed = s;
    seed.push_back(i);
    seed.push_back(j);
    const NodeSet anc = ancestors(g, make_node_set(std::move(seed)));
    std::vector<std::uint8_t> in_anc(n, 0), blocked(n, 0);
    for (Node v : anc) in_anc[v] = 1;
    for (Node v : s) blocked[v] = 1;

    // Moral graph of the ancestral set: parent-child links plus marriages.
    std::vector<std::vector<Node>> moral(n);
    for (Node v : anc) {
        const NodeSet& pa = g.parents(v);
        for (Node p : pa) {
            moral[v].push_back(p);
            moral[p].push_back(v);
        }
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                moral[pa[a]].push_back(pa[b]);
                moral[pa[b]].push_back(pa[a]);
            }
        }
    }
    std::vector<std::uint8_t> seen(n, 0);
    std::deque<Node> queue{i};
    seen[i] = 1;
    while (!queue.empty()) {
        Node v = queue.front();
        queue.pop_front();
        for (Node u : moral[v]) {
            if (u == j) return false;
            if (!seen[u] && !blocked[u] && in_anc[u]) {
                seen[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return true;
}

bool has_directed_path(const Dag& g, Node from, Node to) {
    g.check_node(from);
    g.check_node(to);
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::deque<Node> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        Node v = queue.front();
        queue.pop_front();
        for (Node c : g.children(v)) {
            if (c == to) return true;
            if (!seen[c]) {
                seen[c] = 1;
                queue.push_back(c);
            }
        }
    }
    return false;
}

std::vector<std::pair<NodePair, Node>> v_structures(const Dag& g) {
    std::vector<std::pair<NodePair, Node>> out;
    for (Node c = 0; c < g.size(); ++c) {
        const NodeSet& pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x) {
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                if (!g.adjacent(pa[x], pa[y])) out.push_back({NodePair(pa[x], pa[y]), c});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Orientation

namespace {

std::string pair_text(Node a, Node b) {
    std::ostringstream os;
    os << "(" << a << ", " << b << ")";
    return os.str();
}

/// Orients from→to, honouring the conflict policy. Returns true if the graph
/// changed.
bool orient_checked(Pdag& p, Node from, Node to, ConflictPolicy policy, OrientationStats* stats,
                    const char* context) {
    if (p.is_directed(from, to)) return false;
    if (p.is_directed(to, from)) {
        if (policy == ConflictPolicy::kError) {
            throw InconsistencyError(std::string(context) + ": edge " + pair_text(from, to) +
                                         " already oriented the other way",
                                     from, to);
        }
        if (stats != nullptr) ++stats->conflicts;
        return false;
    }
    p.orient(from, to);
    return true;
}

// Each rule answers: does the current graph force a→b for the undirected a–b?

bool meek_r1(const Pdag& p, Node a, Node b) {
    // c→a, a–b, c and b non-adjacent.
    for (Node c = 0; c < p.size(); ++c) {
        if (c != b && p.is_directed(c, a) && !p.adjacent(c, b)) return true;
    }
    return false;
}

bool meek_r2(const Pdag& p, Node a, Node b) {
    // a→c→b, a–b.
    for (Node c = 0; c < p.size(); ++c) {
        if (p.is_directed(a, c) && p.is_directed(c, b)) return true;
    }
    return false;
}

bool meek_r3(const Pdag& p, Node a, Node b) {
    // a–c→b, a–d→b, c and d non-adjacent.
    NodeSet cands;
    for (Node c = 0; c < p.size(); ++c) {
        if (p.is_undirected(a, c) && p.is_directed(c, b)) cands.push_back(c);
    }
    for (std::size_t x = 0; x < cands.size(); ++x) {
        for (std::size_t y = x + 1; y < cands.size(); ++y) {
            if (!p.adjacent(cands[x], cands[y])) return true;
        }
    }
    return false;
}

bool meek_r4(const Pdag& p, Node a, Node b) {
    // a adj c, c→b, a–d, d→c, d and b non-adjacent.
    for (Node c = 0; c < p.size(); ++c) {
        if (c == a || c == b || !p.adjacent(a, c) || !p.is_directed(c, b)) continue;
        for (Node d = 0; d < p.size(); ++d) {
            if (d == a || d == b || d == c) continue;
            if (p.is_undirected(a, d) && p.is_directed(d, c) && !p.adjacent(d, b)) return true;
        }
    }
    return false;
}

bool meek_forces(const Pdag& p, Node a, Node b) {
    return meek_r1(p, a, b) || meek_r2(p, a, b) || meek_r3(p, a, b) || meek_r4(p, a, b);
}

}  // namespace

Pdag orient_v_structures(const Pdag& p, const SepsetMap& sepsets, ConflictPolicy policy,
                         OrientationStats* stats) {
    Pdag out = p;
    const int n = p.size();
    for (Node j = 0; j < n; ++j) {
        const NodeSet nb = p.neighbors(j);
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const Node i = nb[x];
                const Node k = nb[y];
                if (p.adjacent(i, k)) continue;
                const NodeSet* sep = sepsets.find(i, k);
                if (sep == nullptr || contains(*sep, j)) continue;
                orient_checked(out, i, j, policy, stats, "v-structure");
                orient_checked(out, k, j, policy, stats, "v-structure");
            }
        }
    }
    return out;
}

Pdag apply_meek_rules(const Pdag& p, const std::vector<Edge>& background, ConflictPolicy policy,
                      OrientationStats* stats) {
    Pdag out = p;
    for (const auto& e : background) {
        if (!out.adjacent(e.from, e.to)) {
            throw ArgumentError("background edge " + pair_text(e.from, e.to) +
                                " is not an adjacency of the graph");
        }
        orient_checked(out, e.from, e.to, policy, stats, "background");
    }
    const int n = out.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (Node a = 0; a < n; ++a) {
            for (Node b = a + 1; b < n; ++b) {
                if (!out.is_undirected(a, b)) continue;
                const bool forward = meek_forces(out, a, b);
                const bool backward = meek_forces(out, b, a);
                if (forward && backward) {
                    if (policy == ConflictPolicy::kError) {
                        throw InconsistencyError(
                            "Meek rules force edge " + pair_text(a, b) + " in both directions", a,
                            b);
                    }
                    if (stats != nullptr) ++stats->conflicts;
                    continue;
                }
                if (forward) {
                    out.orient(a, b);
                    changed = true;
                } else if (backward) {
                    out.orient(b, a);
                    changed = true;
                }
            }
        }
    }
    return out;
}

}  // namespace podag
