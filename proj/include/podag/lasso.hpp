#pragma once

#include <vector>

#include <Eigen/Dense>

#include "podag/graph.hpp"

namespace podag {

struct LassoOptions {
    /// Center y, center and scale X to unit variance, map coefficients back.
    bool standardize = true;
    double tolerance = 1e-7;
    int max_sweeps = 100000;
    /// Record the objective after every sweep.
    bool trace = false;
};

struct LassoFit {
    /// Coefficients on the original column scale.
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    double lambda = 0.0;
    /// Column indices with nonzero coefficient.
    NodeSet active_set;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

/// Coordinate-descent minimizer of (1/2n)‖y − Xβ‖² + λ‖β‖₁ (on the
/// standardized problem when options.standardize is set). `warm` seeds the
/// coefficients on the original scale.
LassoFit lasso_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, double lambda,
                   const LassoOptions& options = {}, const Eigen::VectorXd* warm = nullptr);

/// Largest KKT violation of a fit on the problem it solved: for active k,
/// |g_k − λ·sign(β_k)|; for inactive k, max(|g_k| − λ, 0), where g is the
/// gradient of the smooth part with the sign flipped.
double lasso_kkt_violation(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           const LassoFit& fit, const LassoOptions& options = {});

/// (1/2n)‖y − Xβ‖² + λ‖β‖₁ on the problem the options describe.
double lasso_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& coefficients, double intercept, double lambda,
                       const LassoOptions& options = {});

/// Smallest λ giving the all-zero solution.
double lasso_lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        const LassoOptions& options = {});

/// `size` log-spaced values from λ_max down to min_ratio·λ_max.
std::vector<double> lasso_lambda_grid(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                                      int size = 50, double min_ratio = 0.01,
                                      const LassoOptions& options = {});

/// n·log(RSS/n) + 2·|active|.
double lasso_aic(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const LassoFit& fit);

struct AicSelection {
    double lambda = 0.0;
    LassoFit fit;
    std::vector<double> aic;  // per grid value, in the order given
};

/// Grid value minimizing AIC among converged fits; fits are warm-started in
/// decreasing λ order. Throws SelectionError when no fit converged.
AicSelection select_lambda_aic(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                               const std::vector<double>& grid, const LassoOptions& options = {});

}  // namespace podag
