#pragma once

// Independent reference implementations used only by tests: a proximal
// gradient solver for the weighted elastic net (Gaussian and binomial), a
// from-the-formula penalty evaluation, and finite differences. These must not
// call the coordinate-descent solver or the analytic gradient they certify.

#include "fwelnet/types.hpp"

namespace fwelnet::oracle {

/// 0.5 ||y - X b||^2 + lambda sum_j w_j (alpha |b_j| + (1-alpha)/2 b_j^2),
/// no intercept (callers pass centered data).
double elnet_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                       double alpha, double lambda, const VectorXd& beta);

/// FISTA with restart, run until the relative objective change stays below
/// `tol`; returns the minimizer of elnet_objective.
VectorXd prox_grad_elnet(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                         double alpha, double lambda, double tol, int max_iter,
                         const VectorXd* warm = nullptr);

struct LogisticSolution {
    VectorXd beta;
    double intercept = 0.0;
    double objective = 0.0;  // NLL + penalty
    double deviance = 0.0;   // 2 * NLL
};

/// Proximal gradient on the exact binomial negative log-likelihood with an
/// unpenalized intercept.
LogisticSolution prox_grad_logistic(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                                    double alpha, double lambda, double tol, int max_iter);

/// Eq.-style penalty evaluated directly from the weight formula; independent
/// of the library's penalty_weights/penalty_value.
double penalty_from_scores(const MatrixXd& z, const VectorXd& theta, const VectorXd& beta,
                           double lambda, double alpha);

/// Central finite differences of penalty_from_scores in theta.
VectorXd fd_theta_gradient(const MatrixXd& z, const VectorXd& theta, const VectorXd& beta,
                           double lambda, double alpha, double step);

}  // namespace fwelnet::oracle
