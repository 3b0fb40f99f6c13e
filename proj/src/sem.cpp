#include "podag/sem.hpp"

#include <cmath>
#include <numeric>

#include "podag/errors.hpp"

namespace podag {

void GenConfig::validate() const {
    if (n_nodes < 1) throw ConfigError("n_nodes must be positive");
    if (!(expected_edges_per_node >= 0.0) || !std::isfinite(expected_edges_per_node)) {
        throw ConfigError("expected_edges_per_node must be non-negative");
    }
    if (layers < 1 || layers > n_nodes) throw ConfigError("layers must lie in [1, n_nodes]");
    if (!(cross_edge_bias > 0.0)) throw ConfigError("cross_edge_bias must be positive");
    if (!(weight_lo > 0.0 && weight_lo < weight_hi)) {
        throw ConfigError("weight range needs 0 < lo < hi");
    }
}

double expected_edge_count(const GenConfig& cfg) {
    return cfg.n_nodes * cfg.expected_edges_per_node / 2.0;
}

LayeredDag generate_layered_dag(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.n_nodes;
    const int L = cfg.layers;
    std::vector<Node> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    // Block l covers positions [l·n/L, (l+1)·n/L).
    std::vector<int> layer_at(n);
    std::vector<NodeSet> layers(L);
    for (int pos = 0; pos < n; ++pos) {
        const int l = static_cast<int>((static_cast<long long>(pos) * L) / n);
        layer_at[pos] = l;
        layers[l].push_back(order[pos]);
    }

    double n_within = 0.0;
    double n_cross = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) (layer_at[a] == layer_at[b] ? n_within : n_cross) += 1.0;
    }
    const double target = expected_edge_count(cfg);
    const double denom = n_within + cfg.cross_edge_bias * n_cross;
    double p_within = 0.0;
    if (target > 0.0) {
        if (denom <= 0.0) throw ConfigError("no eligible node pairs for the requested edges");
        p_within = target / denom;
    }
    const double p_cross = cfg.cross_edge_bias * p_within;
    if ((n_within > 0 && p_within > 1.0) || (n_cross > 0 && p_cross > 1.0)) {
        throw ConfigError("expected degree infeasible: edge probability exceeds 1");
    }

    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double p = layer_at[a] == layer_at[b] ? p_within : p_cross;
            if (rng.bernoulli(p)) edges.push_back({order[a], order[b]});
        }
    }
    for (auto& layer : layers) layer = make_node_set(layer);
    return {Dag(n, std::move(edges)), PartialOrdering(n, std::move(layers))};
}

Sem::Sem(Dag dag, Eigen::MatrixXd theta, Eigen::VectorXd noise_sd)
    : dag_(std::move(dag)), theta_(std::move(theta)), noise_sd_(std::move(noise_sd)) {
    const int n = dag_.size();
    if (theta_.rows() != n || theta_.cols() != n || noise_sd_.size() != n) {
        throw ArgumentError("SEM parameter shapes do not match the graph");
    }
    for (Node j = 0; j < n; ++j) {
        if (!(noise_sd_(j) > 0.0) || !std::isfinite(noise_sd_(j))) {
            throw ArgumentError("noise standard deviations must be positive");
        }
        for (Node k = 0; k < n; ++k) {
            const bool edge = dag_.has_edge(k, j);
            if (edge != (theta_(j, k) != 0.0) || !std::isfinite(theta_(j, k))) {
                throw ArgumentError("weights must be nonzero exactly on graph edges");
            }
        }
    }
}

Sem random_weights(const Dag& dag, double lo, double hi, Rng& rng) {
    if (!(lo > 0.0 && lo < hi)) throw ArgumentError("weight range needs 0 < lo < hi");
    const int n = dag.size();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : dag.edges()) {
        double mag;
        do {
            mag = rng.uniform(lo, hi);
        } while (mag <= lo);
        theta(e.to, e.from) = rng.bernoulli(0.5) ? mag : -mag;
    }
    return Sem(dag, std::move(theta), Eigen::VectorXd::Ones(n));
}

Sem constant_weights(const Dag& dag, double w) {
    if (w == 0.0) throw ArgumentError("constant weight must be nonzero");
    const int n = dag.size();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : dag.edges()) theta(e.to, e.from) = w;
    return Sem(dag, std::move(theta), Eigen::VectorXd::Ones(n));
}

Dataset sample(const Sem& sem, int n, Rng& rng) {
    if (n < 1) throw ArgumentError("sample size must be positive");
    const int m = sem.size();
    Eigen::MatrixXd w(n, m);
    for (Node v : sem.dag().topological_order()) {
        const double sd = sem.noise_sd()(v);
        for (int r = 0; r < n; ++r) w(r, v) = sd * rng.normal();
        for (Node p : sem.dag().parents(v)) w.col(v) += sem.weight(p, v) * w.col(p);
    }
    return Dataset(std::move(w), sem.dag().labels());
}

CovMatrix population_covariance(const Sem& sem) {
    const int m = sem.size();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - sem.theta();
    const Eigen::MatrixXd inv = a.partialPivLu().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::VectorXd var = sem.noise_sd().array().square();
    Eigen::MatrixXd sigma = inv * var.asDiagonal() * inv.transpose();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return CovMatrix(std::move(sigma), CovSource::kPopulation);
}

}  // namespace podag
