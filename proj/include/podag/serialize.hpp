#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "podag/baselines.hpp"
#include "podag/eval.hpp"
#include "podag/screening.hpp"
#include "podag/search.hpp"
#include "podag/sem.hpp"

namespace podag {

using Json = nlohmann::ordered_json;

/// {cross_edges, within_directed, within_undirected, sepsets, diagnostics}
Json to_json(const PodagResult& r, const std::vector<std::string>& labels);

/// Same keys as a PODAG result. Edges between ordered nodes go to
/// cross_edges (or cross_undirected when unoriented); the rest to within_*.
/// Without an ordering everything is reported as within.
Json to_json(const BaselineResult& r, const std::vector<std::string>& labels,
             const WeakOrdering* rel = nullptr);

/// {label: {s0: [...], s1: [...]}}
Json to_json(const ScreenSets& s, const std::vector<std::string>& labels);

/// {nodes, layers, unordered?, edges: [[parent, child, weight]], noise_sd, rng, seed}
Json sem_to_json(const Sem& sem, const PartialOrdering& ordering, std::uint64_t seed);
/// Throws FormatError on schema violations.
std::pair<Sem, PartialOrdering> sem_from_json(const Json& j);

/// Reads a benchmark grid. Keys mirror BenchmarkSpec fields; any may be
/// omitted.
BenchmarkSpec benchmark_spec_from_json(const Json& j);

std::string benchmark_csv(const BenchmarkTable& t);
std::string benchmark_summary_csv(const BenchmarkTable& t);
std::string faithfulness_csv(const FaithfulnessReport& r);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace podag
