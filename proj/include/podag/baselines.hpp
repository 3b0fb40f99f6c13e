#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "podag/graph.hpp"
#include "podag/stats.hpp"

namespace podag {

struct BaselineResult {
    Pdag graph;
    SepsetMap sepsets;
    std::uint64_t ci_tests = 0;
    /// Tests per level of the skeleton search (PC variants only).
    std::vector<std::uint64_t> tests_per_level;
    int orientation_conflicts = 0;
    std::int64_t elapsed_ms = 0;
};

/// (k→j) for k ordered before j whenever k ⫫̸ j | before(j)\{k}.
BaselineResult estimate_h0(CiEngine& engine, const WeakOrdering& rel);

/// (k→j) for k ordered before j whenever
/// k ⫫̸ j | (before(j) ∪ unordered(j))\{k}; with two layers this conditions
/// on every other variable.
BaselineResult estimate_h_minus_j(CiEngine& engine, const WeakOrdering& rel);

struct PcOptions {
    /// Freeze adjacencies at the start of each level.
    bool stable = false;
    std::optional<int> max_level;
    ConflictPolicy conflict_policy = ConflictPolicy::kError;
    bool timing = false;
};

/// Classic PC: complete graph, level-wise separator search over
/// adj(x)\{y} for ordered pairs (x, y) ascending, v-structures, Meek.
BaselineResult pc(CiEngine& engine, int n_nodes, const PcOptions& options = {});

/// PC with separator candidates restricted to layers no later than
/// max(layer(x), layer(y)) when both endpoints are layered, and edges between
/// layers oriented by the ordering before the v-structure and Meek steps.
BaselineResult pc_plus(CiEngine& engine, const PartialOrdering& ordering,
                       const PcOptions& options = {});

/// PC skeleton and sepsets, then every adjacency between ordered nodes oriented
/// by the ordering before v-structures and Meek.
BaselineResult orient_by_ordering(const BaselineResult& skeleton, const PartialOrdering& ordering,
                                  ConflictPolicy policy);

}  // namespace podag
