#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "podag/baselines.hpp"
#include "podag/graph.hpp"
#include "podag/screening.hpp"
#include "podag/search.hpp"
#include "podag/sem.hpp"
#include "podag/stats.hpp"

namespace podag {

enum class Scope {
    kCrossOnly,  ///< ordered pairs (k, j) with k before j; positive = adjacent
    kSkeleton,   ///< unordered pairs; positive = adjacent
    kAllEdges,   ///< ordered pairs; a→b counts (a, b), a–b counts both
};

std::string scope_name(Scope s);
Scope parse_scope(const std::string& name);

struct EdgeMetrics {
    Scope scope = Scope::kSkeleton;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
    double tpr = 1.0;
    double fpr = 0.0;
    std::int64_t shd = 0;
};

/// Confusion counts over the scope's pair universe. kCrossOnly needs the
/// ordering. SHD counts, per unordered pair of the scope, one for a missing
/// or extra adjacency and one for a wrong or missing orientation (kAllEdges
/// only; the other scopes ignore orientation).
EdgeMetrics edge_metrics(const Pdag& estimated, const Dag& truth, Scope scope,
                         const WeakOrdering* rel = nullptr);

enum class Algorithm { kPc, kPcPlus, kPodag };

std::string algorithm_name(Algorithm a);

struct TupleCollection {
    /// Tuples issued until the skeleton was fixed.
    std::vector<CiQuery> skeleton;
    /// All tuples, orientation phase included.
    std::vector<CiQuery> full;
    std::uint64_t engine_count = 0;
};

/// Runs the algorithm against a recording d-separation oracle. PODAG screens
/// with a separate oracle and learns within-layer edges.
TupleCollection collect_test_tuples(Algorithm algorithm, const Dag& g,
                                    const PartialOrdering& ordering);

inline constexpr double kRhoZeroTolerance = 1e-10;

/// min |ρ(i, j | S)| over the tuples whose population value exceeds the zero
/// tolerance; +∞ when there is none.
double rho_min_star(const CovMatrix& population, const std::vector<CiQuery>& tuples);

struct FaithfulnessSpec {
    int replicates = 100;
    int n_nodes = 20;
    double expected_edges_per_node = 2.0;
    int layers = 5;
    double cross_edge_bias = 2.0;
    double weight_lo = 0.1;
    double weight_hi = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct FaithfulnessRecord {
    int replicate = 0;
    Algorithm algorithm = Algorithm::kPc;
    double rho_min_skeleton = 0.0;
    double rho_min_full = 0.0;
    std::uint64_t ci_tests = 0;
};

struct FaithfulnessReport {
    std::vector<FaithfulnessRecord> records;  // replicate-major, algorithm order PC, PC+, PODAG
    /// Faithfulness re-draws of SEM weights across all replicates.
    int weight_redraws = 0;

    double median_rho_skeleton(Algorithm a) const;
    double median_rho_full(Algorithm a) const;
    double median_tests(Algorithm a) const;
    /// Replicates where PODAG issued strictly fewer tests than PC.
    int podag_fewer_tests_than_pc() const;
};

FaithfulnessReport run_faithfulness(const FaithfulnessSpec& spec);

/// Random SEM whose population partial correlations vanish exactly on the
/// d-separations that the test tuples touch. Re-draws weights up to
/// `max_redraws` times; returns the count used.
int redraw_until_faithful(const Dag& g, const std::vector<CiQuery>& tuples, double lo, double hi,
                          Rng& rng, std::optional<Sem>& out, int max_redraws = 100);

struct BenchmarkSpec {
    std::vector<int> n_nodes{50};
    std::vector<int> layers{2, 5};
    std::vector<int> samples{500};
    std::vector<ScreenBackend> backends{ScreenBackend::kPcor};
    bool run_pc = true;
    bool run_pc_plus = true;
    int replicates = 20;
    std::uint64_t seed = 1;
    double expected_edges_per_node = 3.0;
    double cross_edge_bias = 2.0;
    double weight_lo = 0.1;
    double weight_hi = 1.0;
    double alpha = 0.05;
    /// Screen backend and alpha are overridden per run.
    PodagConfig podag = [] {
        PodagConfig c;
        c.learn_within_layers = true;
        return c;
    }();
    std::vector<Scope> scopes{Scope::kAllEdges, Scope::kSkeleton, Scope::kCrossOnly};
    int threads = 1;
    bool timing = false;

    void validate() const;
};

struct BenchmarkRow {
    int n_nodes = 0;
    int layers = 0;
    int n = 0;
    std::string algorithm;
    std::string backend;
    int replicate = 0;
    std::uint64_t seed = 0;
    EdgeMetrics metrics;
    std::uint64_t ci_tests = 0;
    std::int64_t elapsed_ms = 0;
};

struct BenchmarkFailure {
    int n_nodes = 0;
    int layers = 0;
    int n = 0;
    std::string algorithm;
    std::string backend;
    int replicate = 0;
    std::string message;
};

struct BenchmarkSummary {
    int n_nodes = 0;
    int layers = 0;
    int n = 0;
    std::string algorithm;
    std::string backend;
    Scope scope = Scope::kSkeleton;
    int count = 0;
    double tpr_mean = 0.0, tpr_se = 0.0;
    double fpr_mean = 0.0, fpr_se = 0.0;
    double shd_mean = 0.0, shd_se = 0.0;
    double tests_mean = 0.0;
};

struct BenchmarkTable {
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkFailure> failures;
    std::size_t attempted = 0;

    std::vector<BenchmarkSummary> summarize() const;
    /// Summary for one cell, or nullopt.
    std::optional<BenchmarkSummary> find(int n_nodes, int layers, int n,
                                         const std::string& algorithm, const std::string& backend,
                                         Scope scope) const;
};

BenchmarkTable run_benchmark(const BenchmarkSpec& spec);

/// Runs fn(i) for i in [0, count) over up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace podag
