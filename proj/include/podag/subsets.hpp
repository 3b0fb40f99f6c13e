#pragma once

#include <vector>

#include "podag/graph.hpp"

namespace podag {

/// Calls fn(subset) for every size-d subset of pool in lexicographic order of
/// positions. Stops early and returns true once fn returns true.
template <class Fn>
bool for_each_subset(const NodeSet& pool, int d, Fn&& fn) {
    const int m = static_cast<int>(pool.size());
    if (d < 0 || d > m) return false;
    std::vector<int> idx(d);
    for (int t = 0; t < d; ++t) idx[t] = t;
    NodeSet subset(d);
    while (true) {
        for (int t = 0; t < d; ++t) subset[t] = pool[idx[t]];
        if (fn(static_cast<const NodeSet&>(subset))) return true;
        int t = d - 1;
        while (t >= 0 && idx[t] == m - d + t) --t;
        if (t < 0) return false;
        ++idx[t];
        for (int u = t + 1; u < d; ++u) idx[u] = idx[u - 1] + 1;
    }
}

}  // namespace podag
