#include <gtest/gtest.h>

#include "oracles.hpp"
#include "podag/errors.hpp"
#include "podag/graph.hpp"
#include "podag/rng.hpp"

using namespace podag;

namespace {

// 1→2, 1→3, 2→4, 3→4 with 0-based indices 0..3
Dag figure1() { return Dag(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

// X1→X2, X1→Y1, Y1→Y2, X2→Y2 with X1=0, X2=1, Y1=2, Y2=3
Dag figure2a() { return Dag(4, {{0, 1}, {0, 2}, {2, 3}, {1, 3}}); }

NodeSet all_but(int n, std::initializer_list<Node> skip) {
    NodeSet out;
    for (Node v = 0; v < n; ++v) {
        if (std::find(skip.begin(), skip.end(), v) == skip.end()) out.push_back(v);
    }
    return out;
}

}  // namespace

TEST(SetHelpers, Basics) {
    EXPECT_EQ(make_node_set({3, 1, 3, 2}), (NodeSet{1, 2, 3}));
    EXPECT_EQ(set_union({1, 3}, {2, 3}), (NodeSet{1, 2, 3}));
    EXPECT_EQ(set_intersection({1, 2, 3}, {2, 3, 4}), (NodeSet{2, 3}));
    EXPECT_EQ(set_difference({1, 2, 3}, {2}), (NodeSet{1, 3}));
    EXPECT_EQ(set_without({1, 2, 3}, 1), (NodeSet{2, 3}));
    EXPECT_TRUE(contains({1, 4}, 4));
    EXPECT_FALSE(contains({1, 4}, 2));
}

TEST(Dag, RejectsInvalidEdgeSets) {
    EXPECT_THROW(Dag(2, {{0, 0}}), ArgumentError);
    EXPECT_THROW(Dag(2, {{0, 1}, {0, 1}}), ArgumentError);
    EXPECT_THROW(Dag(2, {{0, 2}}), ArgumentError);
    EXPECT_THROW(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), ArgumentError);
    EXPECT_THROW(Dag(2, {}, {"a"}), ArgumentError);
    EXPECT_THROW(Dag(2, {}, {"a", "a"}), ArgumentError);
}

TEST(Dag, QueriesAndTopologicalOrder) {
    const Dag g = figure1();
    EXPECT_EQ(g.parents(3), (NodeSet{1, 2}));
    EXPECT_EQ(g.children(0), (NodeSet{1, 2}));
    EXPECT_EQ(g.neighbors(1), (NodeSet{0, 3}));
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_FALSE(g.has_edge(1, 0));
    EXPECT_TRUE(g.adjacent(1, 0));
    EXPECT_EQ(g.topological_order(), (std::vector<Node>{0, 1, 2, 3}));
    EXPECT_EQ(g.label(2), "V3");
    EXPECT_THROW(g.check_node(4), ArgumentError);
}

TEST(Ancestors, Examples) {
    EXPECT_EQ(ancestors(figure1(), {3}), (NodeSet{0, 1, 2, 3}));
    EXPECT_EQ(ancestors(figure1(), {}), NodeSet{});
    EXPECT_EQ(ancestors(figure2a(), {2}), (NodeSet{0, 2}));
}

TEST(Ancestors, MonotoneAndIdempotent) {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const Dag g = oracle::random_dag(8, 0.3, rng);
        NodeSet a, b;
        for (Node v = 0; v < 8; ++v) {
            if (rng.bernoulli(0.3)) a.push_back(v);
        }
        b = a;
        for (Node v = 0; v < 8; ++v) {
            if (rng.bernoulli(0.3)) b.push_back(v);
        }
        b = make_node_set(b);
        const NodeSet an_a = ancestors(g, a), an_b = ancestors(g, b);
        EXPECT_TRUE(set_difference(an_a, an_b).empty());
        EXPECT_EQ(ancestors(g, an_a), an_a);
    }
}

TEST(Dsep, Examples) {
    EXPECT_TRUE(is_dsep(figure1(), 1, 2, {0}));
    EXPECT_FALSE(is_dsep(figure1(), 1, 2, {0, 3}));
    EXPECT_TRUE(is_dsep(Dag(3, {}), 0, 1, {}));
    EXPECT_TRUE(is_dsep(figure2a(), 0, 3, {1, 2}));
    EXPECT_FALSE(is_dsep(figure2a(), 0, 3, {1}));
}

TEST(Dsep, ArgumentErrors) {
    EXPECT_THROW(is_dsep(figure1(), 1, 1, {}), ArgumentError);
    EXPECT_THROW(is_dsep(figure1(), 1, 2, {1}), ArgumentError);
    EXPECT_THROW(is_dsep(figure1(), 1, 7, {}), ArgumentError);
}

TEST(Dsep, AgreesWithPathEnumerationExhaustively) {
    Rng rng(5);
    for (int t = 0; t < 25; ++t) {
        const int n = 3 + t % 6;  // 3..8
        const Dag g = oracle::random_dag(n, 0.35, rng);
        for (Node i = 0; i < n; ++i) {
            for (Node j = i + 1; j < n; ++j) {
                const NodeSet rest = all_but(n, {i, j});
                const std::size_t m = rest.size();
                for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
                    NodeSet s;
                    for (std::size_t b = 0; b < m; ++b) {
                        if (mask >> b & 1U) s.push_back(rest[b]);
                    }
                    ASSERT_EQ(is_dsep(g, i, j, s), oracle::dsep_by_paths(g, i, j, s))
                        << "n=" << n << " i=" << i << " j=" << j << " mask=" << mask;
                    ASSERT_EQ(is_dsep(g, i, j, s), is_dsep(g, j, i, s));
                }
            }
        }
    }
}

TEST(DirectedPath, Reachability) {
    EXPECT_TRUE(has_directed_path(figure1(), 0, 3));
    EXPECT_FALSE(has_directed_path(figure1(), 3, 0));
    EXPECT_FALSE(has_directed_path(figure1(), 1, 2));
}

TEST(Pdag, EdgeOperations) {
    Pdag p(4);
    p.add_undirected(0, 1);
    p.add_directed(1, 2);
    EXPECT_TRUE(p.is_undirected(1, 0));
    EXPECT_TRUE(p.is_directed(1, 2));
    EXPECT_FALSE(p.is_directed(2, 1));
    EXPECT_EQ(p.num_edges(), 2u);
    EXPECT_THROW(p.add_directed(2, 1), ArgumentError);
    EXPECT_THROW(p.add_undirected(3, 3), ArgumentError);
    p.orient(1, 0);
    EXPECT_TRUE(p.is_directed(1, 0));
    EXPECT_EQ(p.neighbors(1), (NodeSet{0, 2}));
    p.remove(0, 1);
    EXPECT_FALSE(p.adjacent(0, 1));
    EXPECT_EQ(p.directed_edges(), (std::vector<Edge>{{1, 2}}));
    EXPECT_TRUE(p.skeleton().is_undirected(1, 2));
    EXPECT_TRUE(p.same_skeleton(p.skeleton()));
}

TEST(Pdag, FromDagAndSkeleton) {
    const Pdag d = Pdag::from_dag(figure1());
    EXPECT_EQ(d.directed_edges().size(), 4u);
    EXPECT_TRUE(d.undirected_edges().empty());
    const Pdag s = Pdag::skeleton_of(figure1());
    EXPECT_EQ(s.undirected_edges().size(), 4u);
    EXPECT_TRUE(d.same_skeleton(s));
}

TEST(SepsetMap, RecordAndLookup) {
    SepsetMap m;
    m.record(2, 0, {1});
    EXPECT_TRUE(m.contains(0, 2));
    EXPECT_EQ(m.get(0, 2), (NodeSet{1}));
    EXPECT_EQ(m.find(0, 3), nullptr);
    EXPECT_THROW(m.record(0, 2, {}), ArgumentError);
    EXPECT_THROW(m.record(0, 3, {3}), ArgumentError);
    EXPECT_THROW(m.get(1, 3), ArgumentError);
}

TEST(WeakOrdering, SymmetricClosureAndValidation) {
    const WeakOrdering w(3, {{}, {0}, {}}, {{}, {2}, {}});
    EXPECT_TRUE(w.precedes(0, 1));
    EXPECT_TRUE(w.precedes(1, 2));
    EXPECT_EQ(w.after(0), (NodeSet{1}));
    EXPECT_EQ(w.before(2), (NodeSet{1}));
    EXPECT_EQ(w.unordered_with(0), (NodeSet{2}));
    EXPECT_TRUE(w.ordered(1, 0));
    EXPECT_THROW(WeakOrdering(2, {{1}, {0}}, {{}, {}}), ArgumentError);
    EXPECT_THROW(WeakOrdering(2, {{0}, {}}, {{}, {}}), ArgumentError);
}

TEST(PartialOrdering, LayersUnorderedAndRelation) {
    const PartialOrdering o(5, {{0, 1}, {2}, {3}}, {4});
    EXPECT_EQ(o.num_layers(), 3);
    EXPECT_EQ(o.layer_of(2), 1);
    EXPECT_EQ(o.layer_of(4), -1);
    EXPECT_EQ(o.earlier_than(3), (NodeSet{0, 1, 2}));
    EXPECT_EQ(o.same_layer(0), (NodeSet{1}));
    EXPECT_TRUE(o.earlier_than(4).empty());
    const WeakOrdering r = o.relation();
    EXPECT_EQ(r.before(3), (NodeSet{0, 1, 2}));
    EXPECT_EQ(r.unordered_with(4), (NodeSet{0, 1, 2, 3}));
    EXPECT_EQ(r.unordered_with(0), (NodeSet{1, 4}));
    EXPECT_THROW(PartialOrdering(3, {{0, 1}}), ArgumentError);
    EXPECT_THROW(PartialOrdering(3, {{0, 1}, {1, 2}}), ArgumentError);
}

TEST(PartialOrdering, OverridesMustRespectLayers) {
    PartialOrdering o(4, {{0, 1}, {2, 3}});
    o.set_override(2, {0}, {});
    EXPECT_TRUE(o.has_overrides());
    const WeakOrdering r = o.relation();
    EXPECT_EQ(r.before(2), (NodeSet{0}));
    EXPECT_TRUE(r.precedes(1, 3));
    EXPECT_THROW(o.set_override(0, {1}, {}), ArgumentError);
}

TEST(PartialOrdering, ConsistencyWithDag) {
    const PartialOrdering good(4, {{0}, {1, 2}, {3}});
    EXPECT_TRUE(good.consistent_with(figure1()));
    const PartialOrdering bad(4, {{3}, {0, 1, 2}});
    EXPECT_FALSE(bad.consistent_with(figure1()));
}

TEST(VStructures, Examples) {
    const Pdag collider(3, {}, {{0, 2}, {1, 2}});
    SepsetMap empty_sep;
    empty_sep.record(0, 1, {});
    const Pdag o = orient_v_structures(collider, empty_sep);
    EXPECT_TRUE(o.is_directed(0, 2));
    EXPECT_TRUE(o.is_directed(1, 2));

    SepsetMap with_c;
    with_c.record(0, 1, {2});
    EXPECT_EQ(orient_v_structures(collider, with_c), collider);

    const Pdag complete(3, {}, {{0, 1}, {0, 2}, {1, 2}});
    EXPECT_EQ(orient_v_structures(complete, SepsetMap{}), complete);

    const auto vs = v_structures(figure1());
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].first, NodePair(1, 2));
    EXPECT_EQ(vs[0].second, 3);
}

TEST(VStructures, ConflictPolicy) {
    // a - c - b - d with c and b both colliders under the sepsets
    const Pdag p(4, {}, {{0, 2}, {1, 2}, {1, 3}});
    SepsetMap s;
    s.record(0, 1, {});
    s.record(2, 3, {});
    EXPECT_THROW(orient_v_structures(p, s), InconsistencyError);
    OrientationStats st;
    const Pdag o = orient_v_structures(p, s, ConflictPolicy::kSkip, &st);
    EXPECT_EQ(st.conflicts, 1);
    EXPECT_TRUE(o.is_directed(0, 2));
}

TEST(Meek, Examples) {
    // i - j - k with background i→j and no collider at j orients j→k.
    const Pdag chain(3, {}, {{0, 1}, {1, 2}});
    const Pdag r1 = apply_meek_rules(chain, {{0, 1}});
    EXPECT_TRUE(r1.is_directed(0, 1));
    EXPECT_TRUE(r1.is_directed(1, 2));

    const Pdag oriented = Pdag::from_dag(figure1());
    EXPECT_EQ(apply_meek_rules(oriented), oriented);

    // a→c←b plus c - d orients c→d.
    const Pdag p(4, {{0, 2}, {1, 2}}, {{2, 3}});
    const Pdag m = apply_meek_rules(p);
    EXPECT_TRUE(m.is_directed(2, 3));
}

TEST(Meek, RulesTwoThreeFour) {
    // R2: a→b→c with a - c orients a→c.
    const Pdag r2 = apply_meek_rules(Pdag(3, {{0, 1}, {1, 2}}, {{0, 2}}));
    EXPECT_TRUE(r2.is_directed(0, 2));
    // R3: a - b, a - c, a - d, c→b, d→b, c and d non-adjacent orients a→b.
    const Pdag r3 = apply_meek_rules(Pdag(4, {{2, 1}, {3, 1}}, {{0, 1}, {0, 2}, {0, 3}}));
    EXPECT_TRUE(r3.is_directed(0, 1));
    // R4: a - b, a - c, a - d, d→c→b, b and d non-adjacent orients a→b.
    const Pdag r4 = apply_meek_rules(Pdag(4, {{3, 2}, {2, 1}}, {{0, 1}, {0, 2}, {0, 3}}));
    EXPECT_TRUE(r4.is_directed(0, 1));
}

TEST(Meek, ConflictingBackground) {
    const Pdag p(3, {{0, 1}}, {{1, 2}});
    EXPECT_THROW(apply_meek_rules(p, {{1, 0}}), InconsistencyError);
    OrientationStats st;
    apply_meek_rules(p, {{1, 0}}, ConflictPolicy::kSkip, &st);
    EXPECT_GE(st.conflicts, 1);
    EXPECT_THROW(apply_meek_rules(p, {{0, 2}}), ArgumentError);
}

TEST(Meek, CpdagMatchesEnumerationIdempotentAndSkeletonPreserving) {
    Rng rng(21);
    for (int t = 0; t < 120; ++t) {
        const int n = 3 + t % 6;
        const Dag g = oracle::random_dag(n, 0.4, rng);
        Pdag p = Pdag::skeleton_of(g);
        for (const auto& [pair, c] : v_structures(g)) {
            p.orient(pair.a, c);
            p.orient(pair.b, c);
        }
        const Pdag m = apply_meek_rules(p);
        EXPECT_EQ(m, oracle::cpdag(g));
        EXPECT_EQ(apply_meek_rules(m), m);
        EXPECT_TRUE(m.same_skeleton(p));
    }
}

TEST(Meek, MaximalPdagWithLayeredBackground) {
    Rng rng(22);
    for (int t = 0; t < 100; ++t) {
        const int n = 4 + t % 6;
        const Dag g = oracle::random_dag(n, 0.4, rng);
        // Layers from a split of the topological order.
        const auto& topo = g.topological_order();
        const int cut = 1 + static_cast<int>(rng.below(n - 1));
        const PartialOrdering o(n, {make_node_set({topo.begin(), topo.begin() + cut}),
                                    make_node_set({topo.begin() + cut, topo.end()})});
        const WeakOrdering rel = o.relation();
        Pdag p = Pdag::skeleton_of(g);
        std::vector<Edge> background;
        for (const Edge& e : g.edges()) {
            if (rel.precedes(e.from, e.to)) background.push_back(e);
        }
        for (const auto& [pair, c] : v_structures(g)) {
            p.orient(pair.a, c);
            p.orient(pair.b, c);
        }
        EXPECT_EQ(apply_meek_rules(p, background), oracle::maximal_pdag(g, rel));
    }
}
