#include "podag/serialize.hpp"

#include <cmath>

#include "podag/errors.hpp"
#include "podag/io.hpp"
#include "podag/rng.hpp"

namespace podag {

namespace {

Json label_list(const NodeSet& s, const std::vector<std::string>& labels) {
    Json a = Json::array();
    for (Node v : s) a.push_back(labels.at(v));
    return a;
}

Json sepsets_json(const SepsetMap& m, const std::vector<std::string>& labels) {
    Json o = Json::object();
    for (const auto& [pair, set] : m.entries()) {
        o[labels.at(pair.a) + "," + labels.at(pair.b)] = label_list(set, labels);
    }
    return o;
}

Json edge_pair(Node a, Node b, const std::vector<std::string>& labels) {
    return Json::array({labels.at(a), labels.at(b)});
}

void check_labels(int n, const std::vector<std::string>& labels) {
    if (static_cast<int>(labels.size()) != n) throw ArgumentError("label count mismatch");
}

}  // namespace

Json to_json(const PodagResult& r, const std::vector<std::string>& labels) {
    check_labels(r.graph.size(), labels);
    Json j;
    j["cross_edges"] = Json::array();
    for (const Edge& e : r.cross_edges) j["cross_edges"].push_back(edge_pair(e.from, e.to, labels));
    j["within_directed"] = Json::array();
    for (const Edge& e : r.within.directed_edges()) {
        j["within_directed"].push_back(edge_pair(e.from, e.to, labels));
    }
    j["within_undirected"] = Json::array();
    for (const NodePair& p : r.within.undirected_edges()) {
        j["within_undirected"].push_back(edge_pair(p.a, p.b, labels));
    }
    j["sepsets"] = sepsets_json(r.sepsets, labels);
    const PodagDiagnostics& d = r.diagnostics;
    Json diag;
    diag["ci_tests"] = d.ci_tests;
    diag["elapsed_ms"] = d.elapsed_ms;
    diag["skeleton_tests"] = d.skeleton_tests;
    diag["orientation_tests"] = d.orientation_tests;
    diag["removals_per_level"] = d.removals_per_level;
    diag["post_hoc_sepsets"] = d.post_hoc_sepsets;
    diag["fallback_sepsets"] = d.fallback_sepsets;
    diag["orientation_conflicts"] = d.orientation_conflicts;
    diag["warnings"] = d.warnings;
    j["diagnostics"] = diag;
    return j;
}

Json to_json(const BaselineResult& r, const std::vector<std::string>& labels,
             const WeakOrdering* rel) {
    check_labels(r.graph.size(), labels);
    Json j;
    Json cross = Json::array(), cross_u = Json::array(), wd = Json::array(), wu = Json::array();
    auto ordered = [&](Node a, Node b) { return rel != nullptr && rel->ordered(a, b); };
    for (const Edge& e : r.graph.directed_edges()) {
        (ordered(e.from, e.to) ? cross : wd).push_back(edge_pair(e.from, e.to, labels));
    }
    for (const NodePair& p : r.graph.undirected_edges()) {
        (ordered(p.a, p.b) ? cross_u : wu).push_back(edge_pair(p.a, p.b, labels));
    }
    j["cross_edges"] = cross;
    j["cross_undirected"] = cross_u;
    j["within_directed"] = wd;
    j["within_undirected"] = wu;
    j["sepsets"] = sepsets_json(r.sepsets, labels);
    Json diag;
    diag["ci_tests"] = r.ci_tests;
    diag["elapsed_ms"] = r.elapsed_ms;
    diag["tests_per_level"] = r.tests_per_level;
    diag["orientation_conflicts"] = r.orientation_conflicts;
    j["diagnostics"] = diag;
    return j;
}

Json to_json(const ScreenSets& s, const std::vector<std::string>& labels) {
    check_labels(s.size(), labels);
    Json j = Json::object();
    for (Node v = 0; v < s.size(); ++v) {
        Json e;
        e["s0"] = label_list(s.s0(v), labels);
        e["s1"] = label_list(s.s1(v), labels);
        j[labels[v]] = e;
    }
    return j;
}

Json sem_to_json(const Sem& sem, const PartialOrdering& ordering, std::uint64_t seed) {
    const auto& labels = sem.dag().labels();
    check_labels(ordering.size(), labels);
    Json j;
    j["nodes"] = labels;
    j["layers"] = Json::array();
    for (const auto& l : ordering.layers()) j["layers"].push_back(label_list(l, labels));
    if (!ordering.unordered().empty()) j["unordered"] = label_list(ordering.unordered(), labels);
    j["edges"] = Json::array();
    for (const Edge& e : sem.dag().edges()) {
        j["edges"].push_back(Json::array({labels[e.from], labels[e.to], sem.weight(e.from, e.to)}));
    }
    j["noise_sd"] = Json::array();
    for (Eigen::Index v = 0; v < sem.noise_sd().size(); ++v) j["noise_sd"].push_back(sem.noise_sd()(v));
    j["rng"] = std::string(Rng::kAlgorithm);
    j["seed"] = seed;
    return j;
}

std::pair<Sem, PartialOrdering> sem_from_json(const Json& j) {
    try {
        const auto labels = j.at("nodes").get<std::vector<std::string>>();
        const int n = static_cast<int>(labels.size());
        std::vector<Edge> edges;
        std::vector<double> weights;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw FormatError("SEM edge must be [parent, child, weight]");
            const auto ids = resolve_labels({e[0].get<std::string>(), e[1].get<std::string>()}, labels);
            edges.push_back({ids[0], ids[1]});
            weights.push_back(e[2].get<double>());
        }
        Dag dag(n, edges, labels);
        Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t t = 0; t < edges.size(); ++t) theta(edges[t].to, edges[t].from) = weights[t];
        Eigen::VectorXd sd = Eigen::VectorXd::Ones(n);
        if (j.contains("noise_sd")) {
            const auto v = j.at("noise_sd").get<std::vector<double>>();
            if (static_cast<int>(v.size()) != n) throw FormatError("noise_sd length mismatch");
            for (int i = 0; i < n; ++i) sd(i) = v[i];
        }
        std::vector<NodeSet> layers;
        if (j.contains("layers")) {
            for (const auto& l : j.at("layers")) {
                layers.push_back(make_node_set(resolve_labels(l.get<std::vector<std::string>>(), labels)));
            }
        }
        NodeSet unordered;
        if (j.contains("unordered")) {
            unordered = make_node_set(
                resolve_labels(j.at("unordered").get<std::vector<std::string>>(), labels));
        }
        if (layers.empty() && unordered.empty()) {
            NodeSet all(n);
            for (int i = 0; i < n; ++i) all[i] = i;
            layers.push_back(all);
        }
        PartialOrdering ordering(n, std::move(layers), std::move(unordered));
        return {Sem(std::move(dag), std::move(theta), std::move(sd)), std::move(ordering)};
    } catch (const Json::exception& e) {
        throw FormatError(std::string("SEM JSON: ") + e.what());
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("SEM JSON: ") + e.what());
    }
}

BenchmarkSpec benchmark_spec_from_json(const Json& j) {
    BenchmarkSpec s;
    try {
        if (j.contains("n_nodes")) s.n_nodes = j.at("n_nodes").get<std::vector<int>>();
        if (j.contains("layers")) s.layers = j.at("layers").get<std::vector<int>>();
        if (j.contains("samples")) s.samples = j.at("samples").get<std::vector<int>>();
        if (j.contains("backends")) {
            s.backends.clear();
            for (const auto& b : j.at("backends")) s.backends.push_back(parse_backend(b.get<std::string>()));
        }
        if (j.contains("run_pc")) s.run_pc = j.at("run_pc").get<bool>();
        if (j.contains("run_pc_plus")) s.run_pc_plus = j.at("run_pc_plus").get<bool>();
        if (j.contains("replicates")) s.replicates = j.at("replicates").get<int>();
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("epn")) s.expected_edges_per_node = j.at("epn").get<double>();
        if (j.contains("cross_edge_bias")) s.cross_edge_bias = j.at("cross_edge_bias").get<double>();
        if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
        if (j.contains("pcor_alpha")) s.podag.screen.pcor_alpha = j.at("pcor_alpha").get<double>();
        if (j.contains("sis_alpha")) s.podag.screen.sis_alpha = j.at("sis_alpha").get<double>();
        if (j.contains("max_sepset_size")) s.podag.max_sepset_size = j.at("max_sepset_size").get<int>();
        if (j.contains("within_layers")) s.podag.learn_within_layers = j.at("within_layers").get<bool>();
        if (j.contains("scopes")) {
            s.scopes.clear();
            for (const auto& x : j.at("scopes")) s.scopes.push_back(parse_scope(x.get<std::string>()));
        }
        if (j.contains("threads")) s.threads = j.at("threads").get<int>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("benchmark spec: ") + e.what());
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("benchmark spec: ") + e.what());
    }
    return s;
}

std::string benchmark_csv(const BenchmarkTable& t) {
    std::string out =
        "n_nodes,layers,n,algorithm,backend,replicate,seed,scope,tp,fp,tn,fn,tpr,fpr,shd,ci_tests,"
        "elapsed_ms\n";
    for (const auto& r : t.rows) {
        const EdgeMetrics& m = r.metrics;
        out += std::to_string(r.n_nodes) + "," + std::to_string(r.layers) + "," +
               std::to_string(r.n) + "," + r.algorithm + "," + r.backend + "," +
               std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," +
               scope_name(m.scope) + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
               std::to_string(m.tn) + "," + std::to_string(m.fn) + "," + format_double(m.tpr) +
               "," + format_double(m.fpr) + "," + std::to_string(m.shd) + "," +
               std::to_string(r.ci_tests) + "," + std::to_string(r.elapsed_ms) + "\n";
    }
    return out;
}

std::string benchmark_summary_csv(const BenchmarkTable& t) {
    std::string out =
        "n_nodes,layers,n,algorithm,backend,scope,count,tpr_mean,tpr_se,fpr_mean,fpr_se,shd_mean,"
        "shd_se,ci_tests_mean\n";
    for (const auto& s : t.summarize()) {
        out += std::to_string(s.n_nodes) + "," + std::to_string(s.layers) + "," +
               std::to_string(s.n) + "," + s.algorithm + "," + s.backend + "," +
               scope_name(s.scope) + "," + std::to_string(s.count) + "," +
               format_double(s.tpr_mean) + "," + format_double(s.tpr_se) + "," +
               format_double(s.fpr_mean) + "," + format_double(s.fpr_se) + "," +
               format_double(s.shd_mean) + "," + format_double(s.shd_se) + "," +
               format_double(s.tests_mean) + "\n";
    }
    return out;
}

std::string faithfulness_csv(const FaithfulnessReport& r) {
    std::string out = "replicate,algorithm,rho_min_skeleton,rho_min_full,ci_tests\n";
    auto num = [](double v) { return std::isinf(v) ? std::string("inf") : format_double(v); };
    for (const auto& rec : r.records) {
        out += std::to_string(rec.replicate) + "," + algorithm_name(rec.algorithm) + "," +
               num(rec.rho_min_skeleton) + "," + num(rec.rho_min_full) + "," +
               std::to_string(rec.ci_tests) + "\n";
    }
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace podag
