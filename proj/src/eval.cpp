#include "podag/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "podag/errors.hpp"

namespace podag {

std::string scope_name(Scope s) {
    switch (s) {
        case Scope::kCrossOnly: return "cross_only";
        case Scope::kSkeleton: return "skeleton";
        case Scope::kAllEdges: return "all_edges";
    }
    return "?";
}

Scope parse_scope(const std::string& name) {
    if (name == "cross_only") return Scope::kCrossOnly;
    if (name == "skeleton") return Scope::kSkeleton;
    if (name == "all_edges") return Scope::kAllEdges;
    throw ArgumentError("unknown scope '" + name + "'");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::kPc: return "pc";
        case Algorithm::kPcPlus: return "pc+";
        case Algorithm::kPodag: return "podag";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Metrics

EdgeMetrics edge_metrics(const Pdag& estimated, const Dag& truth, Scope scope,
                         const WeakOrdering* rel) {
    const int n = truth.size();
    if (estimated.size() != n) throw ArgumentError("estimate and truth cover different nodes");
    if (scope == Scope::kCrossOnly && (rel == nullptr || rel->size() != n)) {
        throw ArgumentError("cross-only metrics need an ordering over the same nodes");
    }
    EdgeMetrics m;
    m.scope = scope;
    auto tally = [&m](bool est, bool tru) {
        if (est && tru) ++m.tp;
        else if (est) ++m.fp;
        else if (tru) ++m.fn;
        else ++m.tn;
    };
    switch (scope) {
        case Scope::kCrossOnly:
            for (Node k = 0; k < n; ++k) {
                for (Node j = 0; j < n; ++j) {
                    if (k != j && rel->precedes(k, j)) {
                        tally(estimated.adjacent(k, j), truth.has_edge(k, j));
                    }
                }
            }
            m.shd = m.fp + m.fn;
            break;
        case Scope::kSkeleton:
            for (Node a = 0; a < n; ++a) {
                for (Node b = a + 1; b < n; ++b) tally(estimated.adjacent(a, b), truth.adjacent(a, b));
            }
            m.shd = m.fp + m.fn;
            break;
        case Scope::kAllEdges:
            for (Node a = 0; a < n; ++a) {
                for (Node b = 0; b < n; ++b) {
                    if (a == b) continue;
                    const bool est = estimated.is_directed(a, b) || estimated.is_undirected(a, b);
                    tally(est, truth.has_edge(a, b));
                }
            }
            for (Node a = 0; a < n; ++a) {
                for (Node b = a + 1; b < n; ++b) {
                    const bool ea = estimated.adjacent(a, b);
                    const bool ta = truth.adjacent(a, b);
                    if (ea != ta) {
                        ++m.shd;
                    } else if (ea) {
                        const bool same = truth.has_edge(a, b) ? estimated.is_directed(a, b)
                                                               : estimated.is_directed(b, a);
                        if (!same) ++m.shd;
                    }
                }
            }
            break;
    }
    m.tpr = (m.tp + m.fn) == 0 ? 1.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.fpr = (m.fp + m.tn) == 0 ? 0.0 : static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
    return m;
}

// ---------------------------------------------------------------------------
// Faithfulness

TupleCollection collect_test_tuples(Algorithm algorithm, const Dag& g,
                                    const PartialOrdering& ordering) {
    OracleEngine oracle(g);
    RecordingEngine rec(oracle);
    TupleCollection out;
    switch (algorithm) {
        case Algorithm::kPc: {
            pc(rec, g.size());
            out.full = rec.queries();
            out.skeleton = out.full;
            break;
        }
        case Algorithm::kPcPlus: {
            pc_plus(rec, ordering);
            out.full = rec.queries();
            out.skeleton = out.full;
            break;
        }
        case Algorithm::kPodag: {
            const WeakOrdering rel = ordering.relation();
            OracleEngine screen_engine(g);
            const ScreenSets sets = screen_with_engine(screen_engine, rel);
            PodagConfig cfg;
            cfg.learn_within_layers = true;
            const PodagResult r = podag_search(rec, sets, cfg);
            out.full = rec.queries();
            out.skeleton.assign(out.full.begin(),
                                out.full.begin() + static_cast<std::ptrdiff_t>(
                                                       r.diagnostics.skeleton_tests));
            break;
        }
    }
    out.engine_count = rec.calls();
    return out;
}

double rho_min_star(const CovMatrix& population, const std::vector<CiQuery>& tuples) {
    double best = std::numeric_limits<double>::infinity();
    for (const CiQuery& q : tuples) {
        double rho;
        try {
            rho = std::abs(partial_correlation(population, q.i, q.j, q.s));
        } catch (const SingularityError&) {
            continue;
        }
        if (rho > kRhoZeroTolerance) best = std::min(best, rho);
    }
    return best;
}

int redraw_until_faithful(const Dag& g, const std::vector<CiQuery>& tuples, double lo, double hi,
                          Rng& rng, std::optional<Sem>& out, int max_redraws) {
    std::vector<bool> sep;
    sep.reserve(tuples.size());
    for (const CiQuery& q : tuples) sep.push_back(is_dsep(g, q.i, q.j, q.s));
    for (int attempt = 0; attempt <= max_redraws; ++attempt) {
        Sem sem = random_weights(g, lo, hi, rng);
        const CovMatrix cov = population_covariance(sem);
        bool ok = true;
        for (std::size_t t = 0; t < tuples.size() && ok; ++t) {
            const double rho = std::abs(partial_correlation(cov, tuples[t].i, tuples[t].j, tuples[t].s));
            ok = sep[t] ? rho <= 1e-8 : rho > 1e-8;
        }
        if (ok) {
            out.emplace(std::move(sem));
            return attempt;
        }
    }
    throw Error("could not draw faithful weights in " + std::to_string(max_redraws) + " tries");
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

constexpr Algorithm kAlgorithms[] = {Algorithm::kPc, Algorithm::kPcPlus, Algorithm::kPodag};

}  // namespace

double FaithfulnessReport::median_rho_skeleton(Algorithm a) const {
    std::vector<double> v;
    for (const auto& r : records) {
        if (r.algorithm == a) v.push_back(r.rho_min_skeleton);
    }
    return median(std::move(v));
}

double FaithfulnessReport::median_rho_full(Algorithm a) const {
    std::vector<double> v;
    for (const auto& r : records) {
        if (r.algorithm == a) v.push_back(r.rho_min_full);
    }
    return median(std::move(v));
}

double FaithfulnessReport::median_tests(Algorithm a) const {
    std::vector<double> v;
    for (const auto& r : records) {
        if (r.algorithm == a) v.push_back(static_cast<double>(r.ci_tests));
    }
    return median(std::move(v));
}

int FaithfulnessReport::podag_fewer_tests_than_pc() const {
    std::map<int, std::uint64_t> pc_tests, podag_tests;
    for (const auto& r : records) {
        if (r.algorithm == Algorithm::kPc) pc_tests[r.replicate] = r.ci_tests;
        if (r.algorithm == Algorithm::kPodag) podag_tests[r.replicate] = r.ci_tests;
    }
    int count = 0;
    for (const auto& [rep, t] : podag_tests) {
        auto it = pc_tests.find(rep);
        if (it != pc_tests.end() && t < it->second) ++count;
    }
    return count;
}

FaithfulnessReport run_faithfulness(const FaithfulnessSpec& spec) {
    if (spec.replicates < 1) throw ConfigError("replicates must be positive");
    GenConfig gen;
    gen.n_nodes = spec.n_nodes;
    gen.expected_edges_per_node = spec.expected_edges_per_node;
    gen.layers = spec.layers;
    gen.cross_edge_bias = spec.cross_edge_bias;
    gen.weight_lo = spec.weight_lo;
    gen.weight_hi = spec.weight_hi;
    gen.validate();

    std::vector<std::vector<FaithfulnessRecord>> per(spec.replicates);
    std::vector<int> redraws(spec.replicates, 0);
    parallel_for(spec.replicates, spec.threads, [&](int rep) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(rep)));
        const LayeredDag ld = generate_layered_dag(gen, rng);
        std::vector<TupleCollection> tuples;
        std::vector<CiQuery> all;
        for (Algorithm a : kAlgorithms) {
            tuples.push_back(collect_test_tuples(a, ld.dag, ld.ordering));
            all.insert(all.end(), tuples.back().full.begin(), tuples.back().full.end());
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        std::optional<Sem> sem;
        redraws[rep] = redraw_until_faithful(ld.dag, all, spec.weight_lo, spec.weight_hi, rng, sem);
        const CovMatrix cov = population_covariance(*sem);
        for (std::size_t a = 0; a < tuples.size(); ++a) {
            FaithfulnessRecord r;
            r.replicate = rep;
            r.algorithm = kAlgorithms[a];
            r.rho_min_skeleton = rho_min_star(cov, tuples[a].skeleton);
            r.rho_min_full = rho_min_star(cov, tuples[a].full);
            r.ci_tests = tuples[a].full.size();
            per[rep].push_back(r);
        }
    });
    FaithfulnessReport report;
    for (int rep = 0; rep < spec.replicates; ++rep) {
        report.records.insert(report.records.end(), per[rep].begin(), per[rep].end());
        report.weight_redraws += redraws[rep];
    }
    return report;
}

// ---------------------------------------------------------------------------
// Benchmark

void BenchmarkSpec::validate() const {
    if (replicates < 1) throw ConfigError("replicates must be positive");
    if (n_nodes.empty() || layers.empty() || samples.empty()) throw ConfigError("empty grid");
    for (int v : n_nodes) {
        if (v < 2) throw ConfigError("n_nodes must be at least 2");
    }
    for (int v : samples) {
        if (v < 4) throw ConfigError("sample size must be at least 4");
    }
    for (int v : layers) {
        if (v < 1) throw ConfigError("layers must be positive");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (scopes.empty()) throw ConfigError("no metric scopes");
    podag.validate();
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(count, 1));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

struct Task {
    int n_nodes;
    int layers;
    int n;
    int replicate;
    std::uint64_t seed;
};

struct TaskOutput {
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkFailure> failures;
    std::size_t attempted = 0;
};

std::int64_t ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

TaskOutput run_task(const BenchmarkSpec& spec, const Task& task) {
    TaskOutput out;
    GenConfig gen;
    gen.n_nodes = task.n_nodes;
    gen.layers = task.layers;
    gen.expected_edges_per_node = spec.expected_edges_per_node;
    gen.cross_edge_bias = spec.cross_edge_bias;
    gen.weight_lo = spec.weight_lo;
    gen.weight_hi = spec.weight_hi;

    auto fail = [&](const std::string& alg, const std::string& backend, const std::string& msg) {
        out.failures.push_back(
            {task.n_nodes, task.layers, task.n, alg, backend, task.replicate, msg});
    };

    Rng rng(task.seed);
    std::optional<LayeredDag> ld;
    std::optional<Dataset> data;
    try {
        ld.emplace(generate_layered_dag(gen, rng));
        const Sem sem = random_weights(ld->dag, spec.weight_lo, spec.weight_hi, rng);
        data.emplace(sample(sem, task.n, rng));
    } catch (const Error& e) {
        ++out.attempted;
        fail("generate", "", e.what());
        return out;
    }
    const WeakOrdering rel = ld->ordering.relation();

    auto emit = [&](const std::string& alg, const std::string& backend, const Pdag& g,
                    std::uint64_t tests, std::int64_t ms) {
        for (Scope s : spec.scopes) {
            BenchmarkRow row;
            row.n_nodes = task.n_nodes;
            row.layers = task.layers;
            row.n = task.n;
            row.algorithm = alg;
            row.backend = backend;
            row.replicate = task.replicate;
            row.seed = task.seed;
            row.metrics = edge_metrics(g, ld->dag, s, &rel);
            row.ci_tests = tests;
            row.elapsed_ms = spec.timing ? ms : 0;
            out.rows.push_back(row);
        }
    };

    PcOptions pco;
    pco.conflict_policy = ConflictPolicy::kSkip;
    if (spec.run_pc) {
        ++out.attempted;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            PartialCorrelationEngine engine = gaussian_engine(*data, spec.alpha);
            const BaselineResult r = pc(engine, task.n_nodes, pco);
            emit("pc", "", r.graph, r.ci_tests, ms_since(t0));
        } catch (const Error& e) {
            fail("pc", "", e.what());
        }
    }
    if (spec.run_pc_plus) {
        ++out.attempted;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            PartialCorrelationEngine engine = gaussian_engine(*data, spec.alpha);
            const BaselineResult r = pc_plus(engine, ld->ordering, pco);
            emit("pc+", "", r.graph, r.ci_tests, ms_since(t0));
        } catch (const Error& e) {
            fail("pc+", "", e.what());
        }
    }
    for (ScreenBackend b : spec.backends) {
        ++out.attempted;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            PodagConfig cfg = spec.podag;
            cfg.screen.backend = b;
            cfg.alpha = spec.alpha;
            cfg.conflict_policy = ConflictPolicy::kSkip;
            cfg.timing = false;
            const PodagResult r = learn(*data, ld->ordering, cfg);
            emit("podag", backend_name(b), r.graph, r.diagnostics.ci_tests, ms_since(t0));
        } catch (const Error& e) {
            fail("podag", backend_name(b), e.what());
        }
    }
    return out;
}

}  // namespace

BenchmarkTable run_benchmark(const BenchmarkSpec& spec) {
    spec.validate();
    std::vector<Task> tasks;
    std::uint64_t cell = 0;
    for (int nn : spec.n_nodes) {
        for (int l : spec.layers) {
            for (int n : spec.samples) {
                const std::uint64_t cell_seed = derive_seed(spec.seed, cell++);
                for (int r = 0; r < spec.replicates; ++r) {
                    tasks.push_back({nn, l, n, r, derive_seed(cell_seed, static_cast<std::uint64_t>(r))});
                }
            }
        }
    }
    std::vector<TaskOutput> outputs(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), spec.threads,
                 [&](int i) { outputs[i] = run_task(spec, tasks[i]); });
    BenchmarkTable table;
    for (auto& o : outputs) {
        table.rows.insert(table.rows.end(), o.rows.begin(), o.rows.end());
        table.failures.insert(table.failures.end(), o.failures.begin(), o.failures.end());
        table.attempted += o.attempted;
    }
    return table;
}

std::vector<BenchmarkSummary> BenchmarkTable::summarize() const {
    using Key = std::tuple<int, int, int, std::string, std::string, int>;
    std::vector<Key> order;
    std::map<Key, std::vector<const BenchmarkRow*>> groups;
    for (const auto& row : rows) {
        Key k{row.n_nodes, row.layers, row.n, row.algorithm, row.backend,
              static_cast<int>(row.metrics.scope)};
        auto [it, inserted] = groups.try_emplace(k);
        if (inserted) order.push_back(k);
        it->second.push_back(&row);
    }
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
        const double m = static_cast<double>(v.size());
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= m;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = v.size() > 1 ? std::sqrt(ss / (m - 1.0)) / std::sqrt(m) : 0.0;
    };
    std::vector<BenchmarkSummary> out;
    for (const Key& k : order) {
        const auto& g = groups[k];
        BenchmarkSummary s;
        s.n_nodes = std::get<0>(k);
        s.layers = std::get<1>(k);
        s.n = std::get<2>(k);
        s.algorithm = std::get<3>(k);
        s.backend = std::get<4>(k);
        s.scope = static_cast<Scope>(std::get<5>(k));
        s.count = static_cast<int>(g.size());
        std::vector<double> tpr, fpr, shd;
        double tests = 0.0;
        for (const BenchmarkRow* r : g) {
            tpr.push_back(r->metrics.tpr);
            fpr.push_back(r->metrics.fpr);
            shd.push_back(static_cast<double>(r->metrics.shd));
            tests += static_cast<double>(r->ci_tests);
        }
        mean_se(tpr, s.tpr_mean, s.tpr_se);
        mean_se(fpr, s.fpr_mean, s.fpr_se);
        mean_se(shd, s.shd_mean, s.shd_se);
        s.tests_mean = tests / static_cast<double>(g.size());
        out.push_back(s);
    }
    return out;
}

std::optional<BenchmarkSummary> BenchmarkTable::find(int n_nodes, int layers, int n,
                                                     const std::string& algorithm,
                                                     const std::string& backend,
                                                     Scope scope) const {
    for (const auto& s : summarize()) {
        if (s.n_nodes == n_nodes && s.layers == layers && s.n == n && s.algorithm == algorithm &&
            s.backend == backend && s.scope == scope) {
            return s;
        }
    }
    return std::nullopt;
}

}  // namespace podag
