#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "podag/graph.hpp"
#include "podag/screening.hpp"
#include "podag/stats.hpp"

namespace podag {

struct PodagConfig {
    ScreenParams screen;
    /// Significance of the searching-loop tests.
    double alpha = 0.05;
    /// Largest |T| tried; unset means no cap.
    std::optional<int> max_sepset_size;
    /// Also learn and orient edges between nodes the ordering leaves unordered.
    bool learn_within_layers = false;
    ConflictPolicy conflict_policy = ConflictPolicy::kError;
    /// Record wall-clock time; off keeps results reproducible byte for byte.
    bool timing = false;

    void validate() const;
};

struct RemovalRecord {
    Node k = 0;
    Node j = 0;
    NodeSet sepset;
    int level = 0;
};

struct PodagDiagnostics {
    /// Searching-loop plus orientation-phase tests.
    std::uint64_t ci_tests = 0;
    std::uint64_t skeleton_tests = 0;
    std::uint64_t orientation_tests = 0;
    std::vector<int> removals_per_level;
    std::vector<RemovalRecord> removals;
    /// Separating sets found for untested pairs by the post-hoc search.
    int post_hoc_sepsets = 0;
    /// Untested pairs whose separating set came from the screening sets.
    int fallback_sepsets = 0;
    int orientation_conflicts = 0;
    std::vector<std::string> warnings;
    std::int64_t elapsed_ms = 0;
};

struct PodagResult {
    /// Surviving candidates k→j with k ordered before j.
    std::vector<Edge> cross_edges;
    /// Edges between pairs the ordering leaves unordered, after orientation.
    Pdag within;
    /// cross_edges and within together.
    Pdag graph;
    SepsetMap sepsets;
    ScreenSets screen;
    PodagDiagnostics diagnostics;
};

/// Searching loop over the screen's candidates. For level d = 0, 1, …, each
/// surviving candidate (k, j) is tested against k ⫫ j | cross(j)\{k} ∪ T for
/// every T ⊆ cmb(j)\{k} with |T| = d, in lexicographic order; the first
/// independent verdict removes it. Unordered pairs are tested from both
/// sides. Levels continue while some survivor has |cmb(j)\{k}| ≥ d.
PodagResult podag_search(CiEngine& engine, const ScreenSets& screen, const PodagConfig& cfg);

/// Cross-layer edges only.
PodagResult podag_two_layer(CiEngine& engine, const ScreenSets& screen, const PodagConfig& cfg);

/// Screen must have been computed under ordering.relation().
PodagResult podag_multi_layer(CiEngine& engine, const PartialOrdering& ordering,
                              const ScreenSets& screen, const PodagConfig& cfg);

/// Screen must have been computed under rel.
PodagResult podag_weak_ordering(CiEngine& engine, const WeakOrdering& rel,
                                const ScreenSets& screen, const PodagConfig& cfg);

/// Screens the data with cfg.screen, then searches with the Gaussian engine
/// at cfg.alpha.
PodagResult learn(const Dataset& d, const PartialOrdering& ordering, const PodagConfig& cfg);

/// Population run: screening and search by d-separation in g.
PodagResult learn(const Dag& g, const PartialOrdering& ordering, const PodagConfig& cfg);
PodagResult learn(const Dag& g, const WeakOrdering& rel, const PodagConfig& cfg);

}  // namespace podag
