#include "podag/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>

#include "podag/errors.hpp"
#include "podag/subsets.hpp"

namespace podag {

namespace {

BaselineResult score_edges(CiEngine& engine, const WeakOrdering& rel, bool add_unordered) {
    if (engine.num_nodes() != rel.size()) throw ArgumentError("engine and ordering sizes differ");
    const int n = rel.size();
    BaselineResult r;
    r.graph = Pdag(n);
    const std::uint64_t before_calls = engine.calls();
    for (Node j = 0; j < n; ++j) {
        NodeSet pool = rel.before(j);
        if (add_unordered) pool = set_union(pool, rel.unordered_with(j));
        for (Node k : rel.before(j)) {
            NodeSet s = set_without(pool, k);
            if (engine.query(k, j, s).independent) {
                r.sepsets.record(k, j, std::move(s));
            } else {
                r.graph.add_directed(k, j);
            }
        }
    }
    r.ci_tests = engine.calls() - before_calls;
    return r;
}

/// Layer restriction for separator candidates of (x, y).
using Admit = std::function<bool(Node x, Node y, Node z)>;

BaselineResult pc_skeleton(CiEngine& engine, int n, const PcOptions& opt, const Admit& admit) {
    BaselineResult r;
    r.graph = Pdag(n);
    for (Node a = 0; a < n; ++a) {
        for (Node b = a + 1; b < n; ++b) r.graph.add_undirected(a, b);
    }
    std::uint64_t total = 0;
    for (int level = 0;; ++level) {
        if (opt.max_level && level > *opt.max_level) break;
        const Pdag frozen = r.graph;
        bool eligible = false;
        std::uint64_t level_tests = 0;
        std::map<NodePair, std::set<NodeSet>> tried;
        for (Node x = 0; x < n; ++x) {
            const NodeSet adj_now = r.graph.neighbors(x);
            for (Node y : adj_now) {
                if (!r.graph.adjacent(x, y)) continue;
                const NodeSet adj = opt.stable ? frozen.neighbors(x) : r.graph.neighbors(x);
                NodeSet pool;
                for (Node z : adj) {
                    if (z != y && (!admit || admit(x, y, z))) pool.push_back(z);
                }
                if (static_cast<int>(pool.size()) < level) continue;
                eligible = true;
                auto& seen = tried[NodePair(x, y)];
                for_each_subset(pool, level, [&](const NodeSet& s) {
                    if (!seen.insert(s).second) return false;
                    ++level_tests;
                    if (engine.query(std::min(x, y), std::max(x, y), s).independent) {
                        r.graph.remove(x, y);
                        r.sepsets.record(x, y, s);
                        return true;
                    }
                    return false;
                });
            }
        }
        if (!eligible) break;
        r.tests_per_level.push_back(level_tests);
        total += level_tests;
    }
    r.ci_tests = total;
    return r;
}

std::vector<Edge> ordering_background(const Pdag& g, const WeakOrdering& rel) {
    std::vector<Edge> out;
    const int n = g.size();
    for (Node a = 0; a < n; ++a) {
        for (Node b = 0; b < n; ++b) {
            if (a != b && g.adjacent(a, b) && rel.precedes(a, b)) out.push_back({a, b});
        }
    }
    return out;
}

void finish_orientation(BaselineResult& r, const std::vector<Edge>& background,
                        ConflictPolicy policy) {
    OrientationStats stats;
    Pdag p = r.graph.skeleton();
    for (const Edge& e : background) p.orient(e.from, e.to);
    p = orient_v_structures(p, r.sepsets, policy, &stats);
    p = apply_meek_rules(p, background, policy, &stats);
    r.orientation_conflicts = stats.conflicts;
    r.graph = std::move(p);
}

}  // namespace

BaselineResult estimate_h0(CiEngine& engine, const WeakOrdering& rel) {
    return score_edges(engine, rel, false);
}

BaselineResult estimate_h_minus_j(CiEngine& engine, const WeakOrdering& rel) {
    return score_edges(engine, rel, true);
}

BaselineResult pc(CiEngine& engine, int n_nodes, const PcOptions& options) {
    if (engine.num_nodes() != n_nodes) throw ArgumentError("engine size differs from n_nodes");
    const auto start = std::chrono::steady_clock::now();
    BaselineResult r = pc_skeleton(engine, n_nodes, options, nullptr);
    finish_orientation(r, {}, options.conflict_policy);
    if (options.timing) {
        r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
    return r;
}

BaselineResult pc_plus(CiEngine& engine, const PartialOrdering& ordering,
                       const PcOptions& options) {
    const int n = ordering.size();
    if (engine.num_nodes() != n) throw ArgumentError("engine and ordering sizes differ");
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> layer(n);
    for (Node v = 0; v < n; ++v) layer[v] = ordering.layer_of(v);
    Admit admit = [&layer](Node x, Node y, Node z) {
        if (layer[x] < 0 || layer[y] < 0 || layer[z] < 0) return true;
        return layer[z] <= std::max(layer[x], layer[y]);
    };
    BaselineResult r = pc_skeleton(engine, n, options, admit);
    finish_orientation(r, ordering_background(r.graph, ordering.relation()),
                       options.conflict_policy);
    if (options.timing) {
        r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
    return r;
}

BaselineResult orient_by_ordering(const BaselineResult& skeleton, const PartialOrdering& ordering,
                                  ConflictPolicy policy) {
    if (skeleton.graph.size() != ordering.size()) {
        throw ArgumentError("graph and ordering sizes differ");
    }
    BaselineResult r = skeleton;
    finish_orientation(r, ordering_background(r.graph, ordering.relation()), policy);
    return r;
}

}  // namespace podag
