#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "podag/graph.hpp"

namespace podag {

/// n×m observation matrix with one label per column.
class Dataset {
public:
    Dataset() = default;
    /// Throws DegenerateDataError on non-finite entries, ArgumentError on
    /// shape or label problems.
    Dataset(Eigen::MatrixXd data, std::vector<std::string> labels = {});

    const Eigen::MatrixXd& data() const { return data_; }
    const std::vector<std::string>& labels() const { return labels_; }
    int n() const { return static_cast<int>(data_.rows()); }
    int m() const { return static_cast<int>(data_.cols()); }
    /// Column index of a label, or -1.
    int index_of(const std::string& label) const;

private:
    Eigen::MatrixXd data_;
    std::vector<std::string> labels_;
};

enum class CovSource { kSample, kPopulation };

class CovMatrix {
public:
    CovMatrix() = default;
    /// sample_size is the n behind a sample covariance (0 for population).
    CovMatrix(Eigen::MatrixXd sigma, CovSource source, int sample_size = 0);

    const Eigen::MatrixXd& matrix() const { return sigma_; }
    double operator()(int a, int b) const { return sigma_(a, b); }
    int size() const { return static_cast<int>(sigma_.rows()); }
    CovSource source() const { return source_; }
    int sample_size() const { return sample_size_; }

private:
    Eigen::MatrixXd sigma_;
    CovSource source_ = CovSource::kPopulation;
    int sample_size_ = 0;
};

/// Centered covariance with divisor n.
CovMatrix sample_covariance(const Dataset& d);

/// Smallest reciprocal condition number accepted for a conditioning block.
inline constexpr double kMinRcond = 1e-12;

/// ρ(i, j | s) by Schur complement on the (s ∪ {i, j}) block.
double partial_correlation(const CovMatrix& cov, Node i, Node j, const NodeSet& s);

/// Partial correlation of every pair in `nodes` given the rest of `nodes`,
/// from the inverse of that block. Entry (a, b) refers to nodes[a], nodes[b].
Eigen::MatrixXd partial_correlations_given_rest(const CovMatrix& cov, const NodeSet& nodes);

struct CiVerdict {
    bool independent = false;
    double statistic = 0.0;
    std::optional<double> p_value;
};

double normal_cdf(double x);
double normal_quantile(double p);

/// Fisher z verdict for an already computed ρ̂ with |s| = cond_size.
CiVerdict fisher_z_verdict(double rho, int n, int cond_size, double alpha);

CiVerdict fisher_z_test(const CovMatrix& cov, int n, Node i, Node j, const NodeSet& s,
                        double alpha);

struct CiQuery {
    Node i = 0;
    Node j = 0;
    NodeSet s;

    auto operator<=>(const CiQuery&) const = default;
};

/// Conditional independence test contract. query() validates the arguments,
/// bumps the counter and delegates to evaluate().
class CiEngine {
public:
    virtual ~CiEngine() = default;

    CiVerdict query(Node i, Node j, const NodeSet& s);
    std::uint64_t calls() const { return calls_.load(); }
    virtual int num_nodes() const = 0;

protected:
    virtual CiVerdict evaluate(Node i, Node j, const NodeSet& s) = 0;

private:
    std::atomic<std::uint64_t> calls_{0};
};

/// Population test: independent iff d-separated in g.
class OracleEngine : public CiEngine {
public:
    explicit OracleEngine(Dag g) : g_(std::move(g)) {}
    int num_nodes() const override { return g_.size(); }
    const Dag& dag() const { return g_; }

protected:
    CiVerdict evaluate(Node i, Node j, const NodeSet& s) override;

private:
    Dag g_;
};

/// Partial-correlation test over a covariance matrix, either Fisher z at
/// level alpha or an absolute threshold on |ρ|. Verdicts are memoized.
class PartialCorrelationEngine : public CiEngine {
public:
    enum class Mode { kFisher, kThreshold };

    static PartialCorrelationEngine fisher(CovMatrix cov, int n, double alpha);
    static PartialCorrelationEngine threshold(CovMatrix cov, double tau);

    PartialCorrelationEngine(PartialCorrelationEngine&& other) noexcept;

    int num_nodes() const override { return cov_.size(); }
    const CovMatrix& covariance() const { return cov_; }
    Mode mode() const { return mode_; }
    double level() const { return level_; }
    int sample_size() const { return n_; }

protected:
    CiVerdict evaluate(Node i, Node j, const NodeSet& s) override;

private:
    PartialCorrelationEngine(CovMatrix cov, Mode mode, int n, double level);

    CovMatrix cov_;
    Mode mode_;
    int n_;
    double level_;
    std::mutex mu_;
    std::map<std::tuple<Node, Node, NodeSet>, CiVerdict> cache_;
};

/// Sample Gaussian engine: Fisher z over the sample covariance of d.
PartialCorrelationEngine gaussian_engine(const Dataset& d, double alpha);

/// Forwards to another engine and keeps every query in order.
class RecordingEngine : public CiEngine {
public:
    explicit RecordingEngine(CiEngine& inner) : inner_(inner) {}
    int num_nodes() const override { return inner_.num_nodes(); }
    std::vector<CiQuery> queries() const;
    void clear();

protected:
    CiVerdict evaluate(Node i, Node j, const NodeSet& s) override;

private:
    CiEngine& inner_;
    mutable std::mutex mu_;
    std::vector<CiQuery> log_;
};

}  // namespace podag
