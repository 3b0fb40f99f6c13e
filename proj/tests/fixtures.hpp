#pragma once

#include "podag/graph.hpp"

namespace fixture {

// 1→2, 1→3, 2→4, 3→4 with 0-based indices 0..3
inline podag::Dag figure1() { return podag::Dag(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

// X1→X2, X1→Y1, Y1→Y2, X2→Y2 with X1=0, X2=1, Y1=2, Y2=3
inline podag::Dag figure2a() {
    return podag::Dag(4, {{0, 1}, {0, 2}, {2, 3}, {1, 3}}, {"X1", "X2", "Y1", "Y2"});
}
inline podag::PartialOrdering figure2a_layers() {
    return podag::PartialOrdering(4, {{0, 1}, {2, 3}});
}

// X=0 → Y'=1 → Y=3 and X → Y''=2 ← Y with layers {X}, {Y', Y'', Y}.
// X is screened in for Y but separated by {Y'} at level 1.
inline podag::Dag witness() { return podag::Dag(4, {{0, 1}, {1, 3}, {0, 2}, {3, 2}}); }
inline podag::PartialOrdering witness_layers() {
    return podag::PartialOrdering(4, {{0}, {1, 2, 3}});
}

}  // namespace fixture
