#include "podag/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "podag/errors.hpp"

namespace podag {

namespace {

struct Problem {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd mean;   // column means (zero when not standardizing)
    Eigen::VectorXd scale;  // column sds, 0 for constant columns
    double y_mean = 0.0;
    Eigen::VectorXd col_sq;  // ‖x_k‖² / n
};

Problem prepare(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const LassoOptions& opt) {
    if (y.size() != x.rows()) throw ArgumentError("lasso: y and X row counts differ");
    if (y.size() < 1) throw InsufficientDataError("lasso: no observations");
    if (!y.allFinite() || !x.allFinite()) throw DegenerateDataError("lasso: non-finite input");
    const double n = static_cast<double>(y.size());
    Problem p;
    const auto m = x.cols();
    if (opt.standardize) {
        p.mean = x.colwise().mean().transpose();
        p.y_mean = y.mean();
        p.x = x.rowwise() - p.mean.transpose();
        p.y = y.array() - p.y_mean;
        p.scale.resize(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double sd = std::sqrt(p.x.col(k).squaredNorm() / n);
            p.scale(k) = sd > 1e-12 * (1.0 + std::abs(p.mean(k))) ? sd : 0.0;
            if (p.scale(k) > 0.0) {
                p.x.col(k) /= p.scale(k);
            } else {
                p.x.col(k).setZero();
            }
        }
    } else {
        p.x = x;
        p.y = y;
        p.mean = Eigen::VectorXd::Zero(m);
        p.scale = Eigen::VectorXd::Ones(m);
    }
    p.col_sq = p.x.colwise().squaredNorm().transpose() / n;
    return p;
}

double soft(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

Eigen::VectorXd to_internal(const Problem& p, const Eigen::VectorXd& beta) {
    Eigen::VectorXd b = beta.cwiseProduct(p.scale);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        if (p.col_sq(k) == 0.0) b(k) = 0.0;
    }
    return b;
}

double internal_objective(const Problem& p, const Eigen::VectorXd& r, const Eigen::VectorXd& b,
                          double lambda) {
    const double n = static_cast<double>(p.y.size());
    return r.squaredNorm() / (2.0 * n) + lambda * b.lpNorm<1>();
}

}  // namespace

LassoFit lasso_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double lambda,
                   const LassoOptions& options, const Eigen::VectorXd* warm) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("lasso: lambda < 0");
    const Problem p = prepare(y, x, options);
    const auto m = x.cols();
    const double n = static_cast<double>(y.size());

    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    if (warm != nullptr) {
        if (warm->size() != m) throw ArgumentError("lasso: warm start has the wrong size");
        b = to_internal(p, *warm);
    }
    Eigen::VectorXd r = p.y - p.x * b;

    LassoFit fit;
    fit.lambda = lambda;
    if (options.trace) fit.objective_trace.push_back(internal_objective(p, r, b, lambda));

    auto update = [&](Eigen::Index k) {
        if (p.col_sq(k) == 0.0) return 0.0;
        const double old = b(k);
        const double z = p.x.col(k).dot(r) / n + p.col_sq(k) * old;
        const double nb = soft(z, lambda) / p.col_sq(k);
        if (nb != old) {
            r -= (nb - old) * p.x.col(k);
            b(k) = nb;
        }
        return std::abs(nb - old);
    };

    int sweeps = 0;
    bool converged = false;
    while (sweeps < options.max_sweeps) {
        double change = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) change = std::max(change, update(k));
        ++sweeps;
        if (options.trace) fit.objective_trace.push_back(internal_objective(p, r, b, lambda));
        if (change < options.tolerance) {
            converged = true;
            break;
        }
        std::vector<Eigen::Index> active;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (b(k) != 0.0) active.push_back(k);
        }
        while (sweeps < options.max_sweeps) {
            double ac = 0.0;
            for (Eigen::Index k : active) ac = std::max(ac, update(k));
            ++sweeps;
            if (options.trace) fit.objective_trace.push_back(internal_objective(p, r, b, lambda));
            if (ac < options.tolerance) break;
        }
    }

    fit.iterations = sweeps;
    fit.converged = converged;
    fit.coefficients = Eigen::VectorXd::Zero(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        if (b(k) != 0.0) {
            fit.coefficients(k) = b(k) / p.scale(k);
            fit.active_set.push_back(static_cast<Node>(k));
        }
    }
    fit.intercept = options.standardize ? p.y_mean - p.mean.dot(fit.coefficients) : 0.0;
    return fit;
}

double lasso_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& coefficients, double intercept, double lambda,
                       const LassoOptions& options) {
    (void)intercept;
    const Problem p = prepare(y, x, options);
    const Eigen::VectorXd b = to_internal(p, coefficients);
    const Eigen::VectorXd r = p.y - p.x * b;
    return internal_objective(p, r, b, lambda);
}

double lasso_kkt_violation(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           const LassoFit& fit, const LassoOptions& options) {
    const Problem p = prepare(y, x, options);
    const double n = static_cast<double>(y.size());
    const Eigen::VectorXd b = to_internal(p, fit.coefficients);
    const Eigen::VectorXd g = p.x.transpose() * (p.y - p.x * b) / n;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        if (p.col_sq(k) == 0.0) continue;
        if (b(k) != 0.0) {
            worst = std::max(worst, std::abs(g(k) - fit.lambda * (b(k) > 0 ? 1.0 : -1.0)));
        } else {
            worst = std::max(worst, std::abs(g(k)) - fit.lambda);
        }
    }
    return std::max(worst, 0.0);
}

double lasso_lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        const LassoOptions& options) {
    const Problem p = prepare(y, x, options);
    if (x.cols() == 0) return 0.0;
    return (p.x.transpose() * p.y).cwiseAbs().maxCoeff() / static_cast<double>(y.size());
}

std::vector<double> lasso_lambda_grid(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                      int size, double min_ratio, const LassoOptions& options) {
    if (size < 1) throw ArgumentError("lambda grid size must be positive");
    if (!(min_ratio > 0.0 && min_ratio <= 1.0)) throw ArgumentError("min_ratio must lie in (0, 1]");
    double top = lasso_lambda_max(y, x, options);
    if (!(top > 0.0)) top = 1e-12;
    std::vector<double> grid(size);
    for (int i = 0; i < size; ++i) {
        const double frac = size == 1 ? 0.0 : static_cast<double>(i) / (size - 1);
        grid[i] = top * std::pow(min_ratio, frac);
    }
    return grid;
}

double lasso_aic(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const LassoFit& fit) {
    const double n = static_cast<double>(y.size());
    const Eigen::VectorXd resid = (y - x * fit.coefficients).array() - fit.intercept;
    const double rss = std::max(resid.squaredNorm(), 1e-300);
    return n * std::log(rss / n) + 2.0 * static_cast<double>(fit.active_set.size());
}

AicSelection select_lambda_aic(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                               const std::vector<double>& grid, const LassoOptions& options) {
    if (grid.empty()) throw ArgumentError("empty lambda grid");
    for (double l : grid) {
        if (!(l > 0.0)) throw ArgumentError("lambda grid values must be positive");
    }
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    AicSelection out;
    out.aic.assign(grid.size(), HUGE_VAL);
    bool any = false;
    double best = HUGE_VAL;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t idx : order) {
        LassoFit fit = lasso_fit(y, x, grid[idx], options, &warm);
        warm = fit.coefficients;
        if (!fit.converged) continue;
        const double aic = lasso_aic(y, x, fit);
        out.aic[idx] = aic;
        if (!any || aic < best) {
            any = true;
            best = aic;
            out.lambda = grid[idx];
            out.fit = std::move(fit);
        }
    }
    if (!any) throw SelectionError("no lasso fit on the grid converged");
    return out;
}

}  // namespace podag
