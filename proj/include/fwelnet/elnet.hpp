#pragma once

#include "fwelnet/types.hpp"

#include <optional>

namespace fwelnet {

/// sign(u) * max(|u| - t, 0).
inline double soft_threshold(double u, double t) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

/// log(1 + exp(x)) without overflow.
double log1p_exp(double x);

/// Gaussian: 0.5 * sum (y_i - eta_i)^2. Binomial: sum log(1+e^eta_i) - y_i eta_i.
double negative_log_likelihood(Family family, const VectorXd& y, const VectorXd& eta);

/// Penalty term of the weighted elastic-net objective:
///   lambda * sum_j w_j (alpha |beta_j| + (1-alpha)/2 beta_j^2).
double penalty_value(const VectorXd& beta, const PenaltyFactors& factors,
                     double lambda, double alpha);

/// Full objective (loss + penalty) at (intercept, beta).
double objective_value(const Dataset& data, const PenaltyFactors& factors,
                       double lambda, double alpha, double intercept,
                       const VectorXd& beta);

/// Warm start for fit_path: coefficients at the first path point.
struct WarmStart {
    VectorXd beta;
    double intercept = 0.0;
};

/// Weighted elastic-net path by cyclic coordinate descent with warm starts,
/// largest lambda first. After each full pass the nonzero set is cycled until
/// converged, then a full pass re-checks. The intercept is unpenalized and
/// updated in closed form. Gaussian family.
ElnetFit fit_path(const Dataset& data, const PenaltyFactors& factors,
                  const SolverConfig& config, const LambdaSequence& lambda_seq,
                  const std::optional<WarmStart>& warm = std::nullopt);

/// Binomial path: outer iteratively-reweighted quadratic approximation around
/// the current linear predictor, inner weighted coordinate descent. Fitted
/// probabilities are clamped to [1e-5, 1-1e-5]; coefficient blow-up sets the
/// saturation flag and stops.
ElnetFit fit_path_binomial(const Dataset& data, const PenaltyFactors& factors,
                           const SolverConfig& config, const LambdaSequence& lambda_seq,
                           const std::optional<WarmStart>& warm = std::nullopt);

/// Dispatches on config.family.
ElnetFit fit_path_any(const Dataset& data, const PenaltyFactors& factors,
                      const SolverConfig& config, const LambdaSequence& lambda_seq,
                      const std::optional<WarmStart>& warm = std::nullopt);

/// Per-lambda maximum residual of the subgradient optimality conditions:
///   beta_j != 0:  |x_j'r - lambda w_j ((1-alpha) beta_j + alpha sign(beta_j))|
///   beta_j  = 0:  max(0, |x_j'r| - lambda w_j alpha)
/// with r = y - eta for the Gaussian family and r = y - sigmoid(eta) for the
/// binomial family.
VectorXd kkt_violation(const ElnetFit& fit, const Dataset& data,
                       const PenaltyFactors& factors, double alpha);

struct PredictResult {
    VectorXd eta;
    VectorXd prob;  // binomial only, 1/(1+exp(-eta))
    double lambda = 0.0;
    Eigen::Index lambda_index = 0;
};

/// Linear predictor (and probabilities for binomial) at one path point,
/// selected by index.
PredictResult predict(const ElnetFit& fit, const MatrixXd& x_new,
                      Eigen::Index lambda_index);

/// Same, selecting the path point whose lambda matches `lambda_value` within
/// relative 1e-9. Throws DataError if no path point matches.
PredictResult predict(const ElnetFit& fit, const MatrixXd& x_new,
                      double lambda_value);

/// n x m matrix of linear predictors over the whole path.
MatrixXd predict_path_eta(const ElnetFit& fit, const MatrixXd& x_new);

}  // namespace fwelnet
