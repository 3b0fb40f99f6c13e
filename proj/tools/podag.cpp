// podag: simulate layered SEMs, learn DAGs from data and a layering, and run
// the benchmark and faithfulness studies.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "podag/baselines.hpp"
#include "podag/errors.hpp"
#include "podag/eval.hpp"
#include "podag/io.hpp"
#include "podag/screening.hpp"
#include "podag/search.hpp"
#include "podag/sem.hpp"
#include "podag/serialize.hpp"

namespace fs = std::filesystem;
using namespace podag;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitNumerical = 4;

struct UsageError : Error {
    using Error::Error;
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
}

void ensure_parent(const std::string& file) {
    const fs::path parent = fs::path(file).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
}

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw UsageError("input file '" + path + "' does not exist");
}

ConflictPolicy parse_policy(const std::string& s) {
    if (s == "error") return ConflictPolicy::kError;
    if (s == "skip") return ConflictPolicy::kSkip;
    throw UsageError("--conflicts must be 'error' or 'skip'");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    int nodes = 50;
    int layers = 2;
    double epn = 3.0;
    int n = 500;
    std::uint64_t seed = 1;
    double bias = 2.0;
    double lo = 0.1;
    double hi = 1.0;
    std::string sem_file;
    std::string out = ".";
    int threads = 1;
};

int cmd_simulate(const SimulateArgs& a) {
    ensure_dir(a.out);
    Rng rng(a.seed);
    std::optional<Sem> sem;
    std::optional<PartialOrdering> ordering;
    if (!a.sem_file.empty()) {
        require_file(a.sem_file);
        auto parsed = sem_from_json(Json::parse(read_file(a.sem_file)));
        sem.emplace(std::move(parsed.first));
        ordering.emplace(std::move(parsed.second));
    } else {
        GenConfig gen;
        gen.n_nodes = a.nodes;
        gen.layers = a.layers;
        gen.expected_edges_per_node = a.epn;
        gen.cross_edge_bias = a.bias;
        gen.weight_lo = a.lo;
        gen.weight_hi = a.hi;
        gen.seed = a.seed;
        try {
            gen.validate();
        } catch (const ConfigError& e) {
            throw UsageError(e.what());
        }
        LayeredDag ld = generate_layered_dag(gen, rng);
        sem.emplace(random_weights(ld.dag, a.lo, a.hi, rng));
        ordering.emplace(std::move(ld.ordering));
    }
    if (a.n < 1) throw UsageError("--n must be positive");
    const Dataset d = sample(*sem, a.n, rng);
    const auto& labels = sem->dag().labels();
    write_file((fs::path(a.out) / "data.csv").string(), format_dataset(d));
    write_file((fs::path(a.out) / "truth.tsv").string(),
               format_edge_list(Pdag::from_dag(sem->dag()), labels));
    write_file((fs::path(a.out) / "sem.json").string(), dump(sem_to_json(*sem, *ordering, a.seed)));
    write_file((fs::path(a.out) / "layering.txt").string(), format_layering(*ordering, labels));
    std::cerr << "simulate: " << sem->size() << " nodes, " << sem->dag().edges().size()
              << " edges, " << a.n << " samples -> " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct LearnArgs {
    std::string data;
    std::string layering;
    std::string algorithm = "podag";
    std::string backend = "pcor";
    double alpha = 0.05;
    double pcor_alpha = 0.5;
    std::optional<double> pcor_threshold;
    std::optional<double> sis_t;
    double sis_alpha = 0.5;
    std::optional<double> lambda0;
    std::optional<double> lambda1;
    std::optional<int> max_sepset;
    bool within = false;
    bool orient_by_ordering = false;
    bool pc_stable = false;
    bool screen_only = false;
    bool keep_going = false;
    std::string conflicts = "skip";
    std::string out = ".";
    bool to_stdout = false;
    bool timing = false;
    std::uint64_t seed = 1;
    int threads = 1;
};

int cmd_learn(const LearnArgs& a) {
    require_file(a.data);
    require_file(a.layering);
    ensure_dir(a.out);
    const std::vector<std::string> algorithms{"podag", "pc", "pc+", "h0", "h-minus-j"};
    if (std::find(algorithms.begin(), algorithms.end(), a.algorithm) == algorithms.end()) {
        throw UsageError("unknown --algorithm '" + a.algorithm + "'");
    }
    const ConflictPolicy policy = parse_policy(a.conflicts);

    PodagConfig cfg;
    try {
        cfg.screen.backend = parse_backend(a.backend);
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }
    cfg.screen.pcor_alpha = a.pcor_alpha;
    cfg.screen.pcor_threshold = a.pcor_threshold;
    cfg.screen.sis_t = a.sis_t;
    cfg.screen.sis_alpha = a.sis_alpha;
    cfg.screen.lambda0 = a.lambda0;
    cfg.screen.lambda1 = a.lambda1;
    cfg.screen.keep_going = a.keep_going;
    cfg.alpha = a.alpha;
    cfg.max_sepset_size = a.max_sepset;
    cfg.learn_within_layers = a.within;
    cfg.conflict_policy = policy;
    cfg.timing = a.timing;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }

    const Dataset d = read_dataset(a.data);
    const PartialOrdering ordering = parse_layering(read_file(a.layering), d.labels());
    const WeakOrdering rel = ordering.relation();
    const auto& labels = d.labels();

    Json result;
    std::optional<Pdag> graph;
    if (a.screen_only) {
        const ScreenReport rep = screen_all(d, rel, cfg.screen);
        result = to_json(rep.sets, labels);
        for (const auto& [node, msg] : rep.failures) {
            std::cerr << "warning: screen failed for " << labels[node] << ": " << msg << "\n";
        }
    } else if (a.algorithm == "podag") {
        const PodagResult r = learn(d, ordering, cfg);
        result = to_json(r, labels);
        graph = r.graph;
        for (const auto& w : r.diagnostics.warnings) std::cerr << "warning: " << w << "\n";
    } else {
        PartialCorrelationEngine engine = gaussian_engine(d, a.alpha);
        PcOptions pco;
        pco.stable = a.pc_stable;
        pco.conflict_policy = policy;
        pco.timing = a.timing;
        BaselineResult r;
        if (a.algorithm == "pc") {
            r = pc(engine, d.m(), pco);
            if (a.orient_by_ordering) r = orient_by_ordering(r, ordering, policy);
        } else if (a.algorithm == "pc+") {
            r = pc_plus(engine, ordering, pco);
        } else if (a.algorithm == "h0") {
            r = estimate_h0(engine, rel);
        } else {
            r = estimate_h_minus_j(engine, rel);
        }
        result = to_json(r, labels, &rel);
        graph = r.graph;
        if (r.orientation_conflicts > 0) {
            std::cerr << "warning: " << r.orientation_conflicts << " orientation conflicts skipped\n";
        }
    }
    const std::string text = dump(result);
    write_file((fs::path(a.out) / "result.json").string(), text);
    if (graph) write_file((fs::path(a.out) / "edges.tsv").string(), format_edge_list(*graph, labels));
    if (a.to_stdout) std::cout << text;
    std::cerr << "learn: " << a.algorithm << " finished -> " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
    std::string spec;
    std::vector<int> nodes{50};
    std::vector<int> layers{2, 5};
    std::vector<int> samples{500};
    std::vector<std::string> backends{"pcor"};
    int replicates = 20;
    double epn = 3.0;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out = "benchmark.csv";
    std::string summary;
    bool timing = false;
};

int cmd_benchmark(const BenchmarkArgs& a, const CLI::App& sub) {
    BenchmarkSpec spec;
    if (!a.spec.empty()) {
        require_file(a.spec);
        spec = benchmark_spec_from_json(Json::parse(read_file(a.spec)));
    }
    // Inline flags given explicitly override the spec file.
    if (a.spec.empty() || sub.count("--nodes")) spec.n_nodes = a.nodes;
    if (a.spec.empty() || sub.count("--layers")) spec.layers = a.layers;
    if (a.spec.empty() || sub.count("--n")) spec.samples = a.samples;
    if (a.spec.empty() || sub.count("--backends")) {
        spec.backends.clear();
        for (const auto& b : a.backends) {
            try {
                spec.backends.push_back(parse_backend(b));
            } catch (const ArgumentError& e) {
                throw UsageError(e.what());
            }
        }
    }
    if (a.spec.empty() || sub.count("--replicates")) spec.replicates = a.replicates;
    if (a.spec.empty() || sub.count("--epn")) spec.expected_edges_per_node = a.epn;
    if (a.spec.empty() || sub.count("--alpha")) spec.alpha = a.alpha;
    if (a.spec.empty() || sub.count("--seed")) spec.seed = a.seed;
    if (a.spec.empty() || sub.count("--threads")) spec.threads = a.threads;
    spec.timing = a.timing;
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    ensure_parent(a.out);
    if (!a.summary.empty()) ensure_parent(a.summary);

    const BenchmarkTable table = run_benchmark(spec);
    write_file(a.out, benchmark_csv(table));
    if (!a.summary.empty()) write_file(a.summary, benchmark_summary_csv(table));
    for (const auto& f : table.failures) {
        std::cerr << "failure: nodes=" << f.n_nodes << " layers=" << f.layers << " n=" << f.n
                  << " " << f.algorithm << (f.backend.empty() ? "" : "/" + f.backend)
                  << " replicate " << f.replicate << ": " << f.message << "\n";
    }
    std::cerr << "benchmark: " << table.attempted - table.failures.size() << "/" << table.attempted
              << " runs succeeded -> " << a.out << "\n";
    return table.failures.size() == table.attempted ? 1 : 0;
}

// ---------------------------------------------------------------------------

struct FaithfulnessArgs {
    int replicates = 100;
    int nodes = 20;
    double epn = 2.0;
    int layers = 5;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out = "faithfulness.csv";
};

int cmd_faithfulness(const FaithfulnessArgs& a) {
    FaithfulnessSpec spec;
    spec.replicates = a.replicates;
    spec.n_nodes = a.nodes;
    spec.expected_edges_per_node = a.epn;
    spec.layers = a.layers;
    spec.seed = a.seed;
    spec.threads = a.threads;
    if (spec.replicates < 1) throw UsageError("--replicates must be positive");
    ensure_parent(a.out);
    FaithfulnessReport rep;
    try {
        rep = run_faithfulness(spec);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    write_file(a.out, faithfulness_csv(rep));
    for (Algorithm alg : {Algorithm::kPc, Algorithm::kPcPlus, Algorithm::kPodag}) {
        std::cerr << algorithm_name(alg) << ": median rho_min skeleton "
                  << rep.median_rho_skeleton(alg) << ", full " << rep.median_rho_full(alg)
                  << ", median tests " << rep.median_tests(alg) << "\n";
    }
    std::cerr << "faithfulness: " << spec.replicates << " replicates -> " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn DAGs from data and a partial ordering of the variables."};
    app.require_subcommand(1);
    app.footer(
        "Formats:\n"
        "  data CSV      header of labels, one observation per row (TSV if the header has tabs)\n"
        "  edge list     parent<TAB>child per directed edge, a<TAB>b<TAB>u per undirected edge\n"
        "  layering      one comma-separated line of labels per layer, earliest first;\n"
        "                optional final line 'unordered: a,b,...'\n"
        "  SEM JSON      {nodes, layers, edges: [[parent, child, weight]], noise_sd, rng, seed}\n"
        "  result JSON   {cross_edges, within_directed, within_undirected, sepsets, diagnostics}\n"
        "Exit codes: 0 success, 2 usage, 3 label or format mismatch, 4 numerical failure.");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Sample a random layered linear Gaussian SEM");
    s->add_option("--nodes", sim.nodes, "Number of nodes")->check(CLI::PositiveNumber);
    s->add_option("--layers", sim.layers, "Number of equal-size layers")->check(CLI::PositiveNumber);
    s->add_option("--epn", sim.epn, "Expected edges per node")->check(CLI::NonNegativeNumber);
    s->add_option("--n", sim.n, "Sample size")->check(CLI::PositiveNumber);
    s->add_option("--seed", sim.seed, "Random seed");
    s->add_option("--cross-bias", sim.bias, "Edge probability multiplier between layers")
        ->check(CLI::PositiveNumber);
    s->add_option("--weight-lo", sim.lo, "Smallest weight magnitude")->check(CLI::PositiveNumber);
    s->add_option("--weight-hi", sim.hi, "Largest weight magnitude")->check(CLI::PositiveNumber);
    s->add_option("--sem", sim.sem_file, "Sample from this SEM JSON instead of generating one");
    s->add_option("-o,--out", sim.out, "Output directory (data.csv, truth.tsv, sem.json, layering.txt)");
    s->add_option("--threads", sim.threads, "Worker threads (sampling is sequential)");

    LearnArgs lrn;
    auto* l = app.add_subcommand("learn", "Learn a graph from a dataset and a layering");
    l->add_option("--data", lrn.data, "Dataset CSV")->required();
    l->add_option("--layering", lrn.layering, "Layering file")->required();
    l->add_option("--algorithm", lrn.algorithm, "podag | pc | pc+ | h0 | h-minus-j");
    l->add_option("--backend", lrn.backend, "Screening backend: pcor | sis | lasso");
    l->add_option("--alpha", lrn.alpha, "Significance level of the search tests");
    l->add_option("--pcor-alpha", lrn.pcor_alpha, "Fisher z level of the pcor screen");
    l->add_option("--pcor-threshold", lrn.pcor_threshold, "Absolute |rho| threshold for the pcor screen");
    l->add_option("--sis-t", lrn.sis_t, "Keep the top ceil(t n) SIS scores");
    l->add_option("--sis-alpha", lrn.sis_alpha, "Marginal Fisher z level of the SIS screen");
    l->add_option("--lambda0", lrn.lambda0, "Lasso penalty for s0 (AIC when omitted)");
    l->add_option("--lambda1", lrn.lambda1, "Lasso penalty for s1 (AIC when omitted)");
    l->add_option("--max-sepset", lrn.max_sepset, "Largest conditioning subset tried");
    l->add_flag("--within-layers", lrn.within, "Learn and orient edges inside layers");
    l->add_flag("--orient-by-ordering", lrn.orient_by_ordering, "pc: orient by the layering afterwards");
    l->add_flag("--pc-stable", lrn.pc_stable, "pc/pc+: order-independent skeleton");
    l->add_flag("--screen-only", lrn.screen_only, "Write the screening sets and stop");
    l->add_flag("--keep-going", lrn.keep_going, "Continue past per-node screening failures");
    l->add_option("--conflicts", lrn.conflicts, "Orientation conflicts: error | skip");
    l->add_option("-o,--out", lrn.out, "Output directory (result.json, edges.tsv)");
    l->add_flag("--stdout", lrn.to_stdout, "Also print the result JSON on stdout");
    l->add_flag("--timing", lrn.timing, "Record elapsed_ms (otherwise 0)");
    l->add_option("--seed", lrn.seed, "Unused; accepted for symmetry");
    l->add_option("--threads", lrn.threads, "Worker threads");

    BenchmarkArgs bm;
    auto* b = app.add_subcommand("benchmark", "Compare PC, PC+ and PODAG on simulated data");
    b->add_option("--spec", bm.spec, "JSON grid spec");
    b->add_option("--nodes", bm.nodes, "Graph sizes")->check(CLI::PositiveNumber);
    b->add_option("--layers", bm.layers, "Layer counts")->check(CLI::PositiveNumber);
    b->add_option("--n", bm.samples, "Sample sizes")->check(CLI::PositiveNumber);
    b->add_option("--backends", bm.backends, "Screening backends");
    b->add_option("--replicates", bm.replicates, "Replicates per cell")->check(CLI::PositiveNumber);
    b->add_option("--epn", bm.epn, "Expected edges per node")->check(CLI::NonNegativeNumber);
    b->add_option("--alpha", bm.alpha, "Significance level");
    b->add_option("--seed", bm.seed, "Root seed");
    b->add_option("--threads", bm.threads, "Worker threads (0 = hardware)");
    b->add_option("-o,--out", bm.out, "Per-replicate CSV");
    b->add_option("--summary", bm.summary, "Aggregated CSV (mean and standard error)");
    b->add_flag("--timing", bm.timing, "Record elapsed_ms (otherwise 0)");

    FaithfulnessArgs fa;
    auto* f = app.add_subcommand("faithfulness", "Minimum detectable partial correlation per algorithm");
    f->add_option("--replicates", fa.replicates, "Random DAGs")->check(CLI::PositiveNumber);
    f->add_option("--nodes", fa.nodes, "Nodes per DAG")->check(CLI::PositiveNumber);
    f->add_option("--epn", fa.epn, "Expected edges per node")->check(CLI::NonNegativeNumber);
    f->add_option("--layers", fa.layers, "Layer count")->check(CLI::PositiveNumber);
    f->add_option("--seed", fa.seed, "Root seed");
    f->add_option("--threads", fa.threads, "Worker threads (0 = hardware)");
    f->add_option("-o,--out", fa.out, "Report CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim);
        if (l->parsed()) return cmd_learn(lrn);
        if (b->parsed()) return cmd_benchmark(bm, *b);
        if (f->parsed()) return cmd_faithfulness(fa);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LabelMismatchError& e) {
        std::cerr << "label mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const Json::exception& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const SingularityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InsufficientDataError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DegenerateDataError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InconsistencyError& e) {
        std::cerr << "orientation conflict: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
