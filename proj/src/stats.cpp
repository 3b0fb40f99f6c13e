#include "podag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <boost/math/distributions/normal.hpp>

#include "podag/errors.hpp"

namespace podag {

namespace {

std::string query_text(Node i, Node j, const NodeSet& s) {
    std::ostringstream os;
    os << "(" << i << ", " << j << " | {";
    for (std::size_t t = 0; t < s.size(); ++t) os << (t ? "," : "") << s[t];
    os << "})";
    return os.str();
}

Eigen::MatrixXd sub_matrix(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd out(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) out(a, b) = m(idx[a], idx[b]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset / covariance

Dataset::Dataset(Eigen::MatrixXd data, std::vector<std::string> labels)
    : data_(std::move(data)), labels_(std::move(labels)) {
    if (data_.rows() < 1) throw ArgumentError("dataset has no observations");
    if (data_.cols() < 2) throw ArgumentError("dataset needs at least two columns");
    if (labels_.empty()) {
        for (int c = 0; c < m(); ++c) labels_.push_back(default_label(c));
    } else if (static_cast<int>(labels_.size()) != m()) {
        throw ArgumentError("label count does not match column count");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw ArgumentError("duplicate label " + l);
    }
    if (!data_.allFinite()) {
        for (int c = 0; c < m(); ++c) {
            if (!data_.col(c).allFinite()) {
                throw DegenerateDataError("column " + labels_[c] + " has non-finite entries");
            }
        }
    }
}

int Dataset::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

CovMatrix::CovMatrix(Eigen::MatrixXd sigma, CovSource source, int sample_size)
    : sigma_(std::move(sigma)), source_(source), sample_size_(sample_size) {
    if (sigma_.rows() != sigma_.cols()) throw ArgumentError("covariance must be square");
    const double scale = sigma_.cwiseAbs().maxCoeff();
    for (Eigen::Index a = 0; a < sigma_.rows(); ++a) {
        if (!(sigma_(a, a) > 0.0)) {
            throw DegenerateDataError("covariance diagonal entry " + std::to_string(a) +
                                      " is not positive");
        }
        for (Eigen::Index b = a + 1; b < sigma_.cols(); ++b) {
            if (std::abs(sigma_(a, b) - sigma_(b, a)) > 1e-12 * scale) {
                throw ArgumentError("covariance is not symmetric");
            }
        }
    }
}

CovMatrix sample_covariance(const Dataset& d) {
    if (d.n() < 2) throw InsufficientDataError("sample covariance needs at least 2 rows");
    const Eigen::MatrixXd centered = d.data().rowwise() - d.data().colwise().mean();
    Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(d.n());
    s = 0.5 * (s + s.transpose()).eval();
    for (int c = 0; c < d.m(); ++c) {
        if (!(s(c, c) > 0.0)) {
            throw DegenerateDataError("column " + d.labels()[c] + " is constant");
        }
    }
    return CovMatrix(std::move(s), CovSource::kSample, d.n());
}

// ---------------------------------------------------------------------------
// Partial correlation

double partial_correlation(const CovMatrix& cov, Node i, Node j, const NodeSet& s) {
    const int m = cov.size();
    if (i < 0 || j < 0 || i >= m || j >= m) throw ArgumentError("node index out of range");
    if (i == j) throw ArgumentError("partial correlation of a node with itself");
    for (Node v : s) {
        if (v < 0 || v >= m) throw ArgumentError("conditioning index out of range");
        if (v == i || v == j) throw ArgumentError("conditioning set contains an endpoint");
    }
    const Eigen::MatrixXd& sig = cov.matrix();
    double cii = sig(i, i);
    double cjj = sig(j, j);
    double cij = sig(i, j);
    if (!s.empty()) {
        const auto k = static_cast<Eigen::Index>(s.size());
        const Eigen::MatrixXd sss = sub_matrix(sig, s);
        Eigen::MatrixXd rhs(k, 2);
        for (Eigen::Index a = 0; a < k; ++a) {
            rhs(a, 0) = sig(s[a], i);
            rhs(a, 1) = sig(s[a], j);
        }
        // Scale to unit diagonal so rcond reflects correlation structure.
        const Eigen::VectorXd dinv = sss.diagonal().cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd r = dinv.asDiagonal() * sss * dinv.asDiagonal();
        Eigen::LLT<Eigen::MatrixXd> llt(r);
        if (llt.info() != Eigen::Success || llt.rcond() < kMinRcond) {
            throw SingularityError("singular conditioning block for " + query_text(i, j, s));
        }
        const Eigen::MatrixXd w = dinv.asDiagonal() * rhs;
        const Eigen::MatrixXd sol = llt.solve(w);
        const Eigen::Matrix2d corr = w.transpose() * sol;
        cii -= corr(0, 0);
        cjj -= corr(1, 1);
        cij -= corr(0, 1);
    }
    if (cii <= kMinRcond * sig(i, i) || cjj <= kMinRcond * sig(j, j)) {
        throw SingularityError("endpoint determined by the conditioning set in " +
                               query_text(i, j, s));
    }
    return std::clamp(cij / std::sqrt(cii * cjj), -1.0, 1.0);
}

Eigen::MatrixXd partial_correlations_given_rest(const CovMatrix& cov, const NodeSet& nodes) {
    for (Node v : nodes) {
        if (v < 0 || v >= cov.size()) throw ArgumentError("node index out of range");
    }
    const Eigen::MatrixXd block = sub_matrix(cov.matrix(), nodes);
    const Eigen::VectorXd dinv = block.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd r = dinv.asDiagonal() * block * dinv.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success || llt.rcond() < kMinRcond) {
        throw SingularityError("singular covariance block of size " +
                               std::to_string(nodes.size()));
    }
    const auto k = static_cast<Eigen::Index>(nodes.size());
    const Eigen::MatrixXd omega = llt.solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd out(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            out(a, b) = a == b ? 1.0
                               : std::clamp(-omega(a, b) / std::sqrt(omega(a, a) * omega(b, b)),
                                            -1.0, 1.0);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fisher z

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

CiVerdict fisher_z_verdict(double rho, int n, int cond_size, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    const int df = n - cond_size - 3;
    if (df <= 0) {
        throw InsufficientDataError("Fisher z needs n - |S| - 3 > 0 (n = " + std::to_string(n) +
                                    ", |S| = " + std::to_string(cond_size) + ")");
    }
    CiVerdict v;
    if (std::abs(rho) >= 1.0) {
        v.independent = false;
        v.statistic = rho > 0 ? HUGE_VAL : -HUGE_VAL;
        v.p_value = 0.0;
        return v;
    }
    const double z = std::sqrt(static_cast<double>(df)) * std::atanh(rho);
    v.statistic = z;
    v.p_value = std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
    v.independent = std::abs(z) <= normal_quantile(1.0 - alpha / 2.0);
    return v;
}

CiVerdict fisher_z_test(const CovMatrix& cov, int n, Node i, Node j, const NodeSet& s,
                        double alpha) {
    if (n - static_cast<int>(s.size()) - 3 <= 0) {
        throw InsufficientDataError("Fisher z needs n - |S| - 3 > 0 for " + query_text(i, j, s));
    }
    return fisher_z_verdict(partial_correlation(cov, i, j, s), n, static_cast<int>(s.size()),
                            alpha);
}

// ---------------------------------------------------------------------------
// Engines

CiVerdict CiEngine::query(Node i, Node j, const NodeSet& s) {
    calls_.fetch_add(1);
    const int m = num_nodes();
    if (i < 0 || j < 0 || i >= m || j >= m) throw ArgumentError("query index out of range");
    if (i == j) throw ArgumentError("query with i == j");
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (s[t] < 0 || s[t] >= m) throw ArgumentError("conditioning index out of range");
        if (s[t] == i || s[t] == j) throw ArgumentError("conditioning set contains an endpoint");
        if (t > 0 && s[t - 1] >= s[t]) throw ArgumentError("conditioning set must be sorted");
    }
    return evaluate(i, j, s);
}

CiVerdict OracleEngine::evaluate(Node i, Node j, const NodeSet& s) {
    CiVerdict v;
    v.independent = is_dsep(g_, i, j, s);
    v.statistic = v.independent ? 0.0 : 1.0;
    return v;
}

PartialCorrelationEngine::PartialCorrelationEngine(CovMatrix cov, Mode mode, int n, double level)
    : cov_(std::move(cov)), mode_(mode), n_(n), level_(level) {}

PartialCorrelationEngine::PartialCorrelationEngine(PartialCorrelationEngine&& other) noexcept
    : cov_(std::move(other.cov_)),
      mode_(other.mode_),
      n_(other.n_),
      level_(other.level_),
      cache_(std::move(other.cache_)) {}

PartialCorrelationEngine PartialCorrelationEngine::fisher(CovMatrix cov, int n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    if (n < 4) throw InsufficientDataError("Gaussian engine needs at least 4 observations");
    return PartialCorrelationEngine(std::move(cov), Mode::kFisher, n, alpha);
}

PartialCorrelationEngine PartialCorrelationEngine::threshold(CovMatrix cov, double tau) {
    if (!(tau >= 0.0)) throw ArgumentError("threshold must be non-negative");
    return PartialCorrelationEngine(std::move(cov), Mode::kThreshold, 0, tau);
}

CiVerdict PartialCorrelationEngine::evaluate(Node i, Node j, const NodeSet& s) {
    auto key = std::make_tuple(std::min(i, j), std::max(i, j), s);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    CiVerdict v;
    if (mode_ == Mode::kFisher) {
        v = fisher_z_test(cov_, n_, std::get<0>(key), std::get<1>(key), s, level_);
    } else {
        const double rho = partial_correlation(cov_, std::get<0>(key), std::get<1>(key), s);
        v.statistic = rho;
        v.independent = std::abs(rho) <= level_;
    }
    std::lock_guard lock(mu_);
    cache_.emplace(std::move(key), v);
    return v;
}

PartialCorrelationEngine gaussian_engine(const Dataset& d, double alpha) {
    if (d.n() < 4) throw InsufficientDataError("Gaussian engine needs at least 4 observations");
    return PartialCorrelationEngine::fisher(sample_covariance(d), d.n(), alpha);
}

CiVerdict RecordingEngine::evaluate(Node i, Node j, const NodeSet& s) {
    {
        std::lock_guard lock(mu_);
        log_.push_back({i, j, s});
    }
    return inner_.query(i, j, s);
}

std::vector<CiQuery> RecordingEngine::queries() const {
    std::lock_guard lock(mu_);
    return log_;
}

void RecordingEngine::clear() {
    std::lock_guard lock(mu_);
    log_.clear();
}

}  // namespace podag
