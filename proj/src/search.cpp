#include "podag/search.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "podag/errors.hpp"
#include "podag/subsets.hpp"

namespace podag {

void PodagConfig::validate() const {
    screen.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (max_sepset_size && *max_sepset_size < 0) throw ConfigError("max_sepset_size < 0");
}

namespace {

struct Item {
    Node k;
    Node j;
};

std::string context(const char* stage, Node k, Node j, const NodeSet& s) {
    std::string out = std::string(stage) + " test (" + std::to_string(k) + ", " +
                      std::to_string(j) + " | {";
    for (std::size_t t = 0; t < s.size(); ++t) out += (t ? "," : "") + std::to_string(s[t]);
    return out + "}): ";
}

/// Queries the engine, re-raising errors with the query attached.
CiVerdict checked_query(CiEngine& engine, const char* stage, Node k, Node j, const NodeSet& s) {
    try {
        return engine.query(k, j, s);
    } catch (const SingularityError& e) {
        throw SingularityError(context(stage, k, j, s) + e.what());
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError(context(stage, k, j, s) + e.what());
    } catch (const DegenerateDataError& e) {
        throw DegenerateDataError(context(stage, k, j, s) + e.what());
    }
}

/// Size-d subsets T of cmb(j)\{k}; tests k ⫫ j | cross(j)\{k} ∪ T and
/// returns the first separator.
std::optional<NodeSet> try_level(CiEngine& engine, const ScreenSets& screen, Node k, Node j, int d,
                                 const char* stage, std::uint64_t& tests) {
    const NodeSet pool = set_without(screen.cmb(j), k);
    const NodeSet base = set_without(screen.cross(j), k);
    std::optional<NodeSet> found;
    for_each_subset(pool, d, [&](const NodeSet& t) {
        NodeSet s = set_union(base, t);
        ++tests;
        if (checked_query(engine, stage, k, j, s).independent) {
            found = std::move(s);
            return true;
        }
        return false;
    });
    return found;
}

/// Separator implied by the screen for an excluded pair, seen from side j.
std::optional<NodeSet> screen_separator(const ScreenSets& screen, Node k, Node j) {
    const WeakOrdering& rel = screen.relation();
    if (rel.precedes(k, j)) {
        if (!contains(screen.s0(j), k)) return set_without(rel.before(j), k);
        if (!contains(screen.s1(j), k)) {
            return set_without(set_union(screen.s0(j), screen.unordered(j)), k);
        }
        return std::nullopt;
    }
    if (!rel.ordered(k, j) && !contains(screen.s1(j), k)) {
        return set_without(set_union(screen.s0(j), screen.unordered(j)), k);
    }
    return std::nullopt;
}

/// Sides (k, j) from which an untested pair is examined.
std::vector<Item> sides(const WeakOrdering& rel, NodePair p) {
    if (rel.precedes(p.a, p.b)) return {{p.a, p.b}};
    if (rel.precedes(p.b, p.a)) return {{p.b, p.a}};
    return {{p.b, p.a}, {p.a, p.b}};
}

void orient(PodagResult& r, CiEngine& engine, const PodagConfig& cfg) {
    const ScreenSets& screen = r.screen;
    const WeakOrdering& rel = screen.relation();
    const int n = screen.size();
    Pdag& g = r.graph;

    // Non-adjacent pairs that sit in a triple with an unordered edge.
    std::set<NodePair> needed;
    for (Node j = 0; j < n; ++j) {
        const NodeSet nb = g.neighbors(j);
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const Node a = nb[x];
                const Node b = nb[y];
                if (g.adjacent(a, b)) continue;
                if (g.is_undirected(a, j) || g.is_undirected(b, j)) needed.emplace(a, b);
            }
        }
    }

    std::uint64_t tests = 0;
    for (const NodePair& p : needed) {
        if (r.sepsets.contains(p.a, p.b)) continue;
        const std::vector<Item> from = sides(rel, p);
        int top = 0;
        for (const Item& it : from) {
            top = std::max(top, static_cast<int>(set_without(screen.cmb(it.j), it.k).size()));
        }
        if (cfg.max_sepset_size) top = std::min(top, *cfg.max_sepset_size);
        std::optional<NodeSet> sep;
        for (int d = 0; d <= top && !sep; ++d) {
            for (const Item& it : from) {
                if (static_cast<int>(set_without(screen.cmb(it.j), it.k).size()) < d) continue;
                sep = try_level(engine, screen, it.k, it.j, d, "orientation", tests);
                if (sep) break;
            }
        }
        if (sep) {
            ++r.diagnostics.post_hoc_sepsets;
        } else {
            for (const Item& it : from) {
                sep = screen_separator(screen, it.k, it.j);
                if (sep) break;
            }
            if (!sep) continue;
            ++r.diagnostics.fallback_sepsets;
        }
        r.sepsets.record(p.a, p.b, std::move(*sep));
    }
    r.diagnostics.orientation_tests = tests;

    OrientationStats stats;
    Pdag oriented = orient_v_structures(g, r.sepsets, cfg.conflict_policy, &stats);
    oriented = apply_meek_rules(oriented, r.cross_edges, cfg.conflict_policy, &stats);
    r.diagnostics.orientation_conflicts = stats.conflicts;
    g = std::move(oriented);
}

}  // namespace

PodagResult podag_search(CiEngine& engine, const ScreenSets& screen, const PodagConfig& cfg) {
    cfg.validate();
    if (engine.num_nodes() != screen.size()) throw ArgumentError("engine and screen sizes differ");
    const auto start = std::chrono::steady_clock::now();
    const int n = screen.size();
    const WeakOrdering& rel = screen.relation();

    PodagResult r;
    r.screen = screen;
    r.within = Pdag(n);
    r.graph = Pdag(n);

    std::vector<Item> items;
    for (const Edge& e : screen.cross_candidates()) items.push_back({e.from, e.to});
    if (cfg.learn_within_layers) {
        for (const NodePair& p : screen.within_candidates()) {
            items.push_back({p.a, p.b});
            items.push_back({p.b, p.a});
        }
    }
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return std::tie(x.j, x.k) < std::tie(y.j, y.k); });

    std::set<NodePair> removed;
    std::uint64_t tests = 0;
    for (int d = 0;; ++d) {
        if (cfg.max_sepset_size && d > *cfg.max_sepset_size) break;
        bool eligible = false;
        int removals = 0;
        for (const Item& it : items) {
            const NodePair key(it.k, it.j);
            if (removed.count(key)) continue;
            if (static_cast<int>(set_without(screen.cmb(it.j), it.k).size()) < d) continue;
            eligible = true;
            auto sep = try_level(engine, screen, it.k, it.j, d, "search", tests);
            if (sep) {
                removed.insert(key);
                r.diagnostics.removals.push_back({it.k, it.j, *sep, d});
                r.sepsets.record(it.k, it.j, std::move(*sep));
                ++removals;
            }
        }
        if (!eligible) break;
        r.diagnostics.removals_per_level.push_back(removals);
    }
    r.diagnostics.skeleton_tests = tests;

    for (const Item& it : items) {
        if (removed.count(NodePair(it.k, it.j))) continue;
        if (rel.precedes(it.k, it.j)) {
            r.cross_edges.push_back({it.k, it.j});
            r.graph.add_directed(it.k, it.j);
        } else if (!r.graph.adjacent(it.k, it.j)) {
            r.graph.add_undirected(it.k, it.j);
        }
    }
    std::sort(r.cross_edges.begin(), r.cross_edges.end());

    if (cfg.learn_within_layers) orient(r, engine, cfg);

    for (const Edge& e : r.graph.directed_edges()) {
        if (!rel.precedes(e.from, e.to) && !rel.precedes(e.to, e.from)) {
            r.within.add_directed(e.from, e.to);
        }
    }
    for (const NodePair& p : r.graph.undirected_edges()) r.within.add_undirected(p.a, p.b);

    for (Node j = 0; j < n; ++j) {
        if (screen.entry(j).oversized) {
            r.diagnostics.warnings.push_back("node " + std::to_string(j) +
                                             ": |s0 ∩ s1| exceeds the sample size");
        }
        if (screen.entry(j).lasso_nonconverged) {
            r.diagnostics.warnings.push_back("node " + std::to_string(j) +
                                             ": lasso screen did not converge");
        }
    }
    if (r.diagnostics.orientation_conflicts > 0) {
        r.diagnostics.warnings.push_back(std::to_string(r.diagnostics.orientation_conflicts) +
                                         " orientation conflicts skipped");
    }
    r.diagnostics.ci_tests = r.diagnostics.skeleton_tests + r.diagnostics.orientation_tests;
    if (cfg.timing) {
        r.diagnostics.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - start)
                                       .count();
    }
    return r;
}

PodagResult podag_two_layer(CiEngine& engine, const ScreenSets& screen, const PodagConfig& cfg) {
    PodagConfig c = cfg;
    c.learn_within_layers = false;
    return podag_search(engine, screen, c);
}

PodagResult podag_multi_layer(CiEngine& engine, const PartialOrdering& ordering,
                              const ScreenSets& screen, const PodagConfig& cfg) {
    if (ordering.num_layers() < 1) throw ArgumentError("ordering has no layers");
    if (!(ordering.relation() == screen.relation())) {
        throw ArgumentError("screen was computed under a different ordering");
    }
    return podag_search(engine, screen, cfg);
}

PodagResult podag_weak_ordering(CiEngine& engine, const WeakOrdering& rel,
                                const ScreenSets& screen, const PodagConfig& cfg) {
    if (!(rel == screen.relation())) {
        throw ArgumentError("screen was computed under a different ordering");
    }
    return podag_search(engine, screen, cfg);
}

PodagResult learn(const Dataset& d, const PartialOrdering& ordering, const PodagConfig& cfg) {
    cfg.validate();
    if (d.m() != ordering.size()) {
        throw LabelMismatchError("dataset has " + std::to_string(d.m()) +
                                 " columns but the ordering covers " +
                                 std::to_string(ordering.size()) + " nodes");
    }
    const auto start = std::chrono::steady_clock::now();
    const WeakOrdering rel = ordering.relation();
    const ScreenReport report = screen_all(d, rel, cfg.screen);
    PartialCorrelationEngine engine = gaussian_engine(d, cfg.alpha);
    PodagResult r = podag_search(engine, report.sets, cfg);
    for (const auto& [node, msg] : report.failures) {
        r.diagnostics.warnings.push_back("screen failed for node " + std::to_string(node) + ": " +
                                         msg);
    }
    if (cfg.timing) {
        r.diagnostics.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - start)
                                       .count();
    }
    return r;
}

PodagResult learn(const Dag& g, const WeakOrdering& rel, const PodagConfig& cfg) {
    if (g.size() != rel.size()) throw ArgumentError("graph and ordering sizes differ");
    OracleEngine screen_engine(g);
    const ScreenSets sets = screen_with_engine(screen_engine, rel);
    OracleEngine engine(g);
    return podag_search(engine, sets, cfg);
}

PodagResult learn(const Dag& g, const PartialOrdering& ordering, const PodagConfig& cfg) {
    return learn(g, ordering.relation(), cfg);
}

}  // namespace podag
