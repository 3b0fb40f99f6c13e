#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "podag/graph.hpp"
#include "podag/rng.hpp"
#include "podag/stats.hpp"

namespace podag {

struct GenConfig {
    int n_nodes = 20;
    double expected_edges_per_node = 2.0;
    int layers = 1;
    /// Probability multiplier for pairs in different layers.
    double cross_edge_bias = 2.0;
    double weight_lo = 0.1;
    double weight_hi = 1.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

struct LayeredDag {
    Dag dag;
    PartialOrdering ordering;
};

/// Expected number of edges for a configuration: n · epn / 2.
double expected_edge_count(const GenConfig& cfg);

/// Random topological order split into `layers` blocks of near-equal size;
/// each forward pair gets an edge with probability p (within a layer) or
/// cross_edge_bias · p (between layers), with p chosen to hit the expected
/// edge count.
LayeredDag generate_layered_dag(const GenConfig& cfg, Rng& rng);

/// Linear Gaussian SEM W = ΘW + ε with Θ(j, k) the weight of k→j.
class Sem {
public:
    Sem(Dag dag, Eigen::MatrixXd theta, Eigen::VectorXd noise_sd);

    const Dag& dag() const { return dag_; }
    const Eigen::MatrixXd& theta() const { return theta_; }
    const Eigen::VectorXd& noise_sd() const { return noise_sd_; }
    double weight(Node parent, Node child) const { return theta_(child, parent); }
    int size() const { return dag_.size(); }

private:
    Dag dag_;
    Eigen::MatrixXd theta_;
    Eigen::VectorXd noise_sd_;
};

/// Weights uniform on (−hi, −lo) ∪ (lo, hi); unit noise.
Sem random_weights(const Dag& dag, double lo, double hi, Rng& rng);

/// Sem with every edge weight equal to w and unit noise.
Sem constant_weights(const Dag& dag, double w);

Dataset sample(const Sem& sem, int n, Rng& rng);

/// (I − Θ)⁻¹ D (I − Θ)⁻ᵀ with D = diag(noise_sd²).
CovMatrix population_covariance(const Sem& sem);

}  // namespace podag
