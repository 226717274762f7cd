#pragma once

#include "fwelnet/types.hpp"

#include <utility>

namespace fwelnet {

/// Centers every column of x and rescales it to squared norm n. For the
/// Gaussian family y is centered as well. Zero-variance columns are centered,
/// flagged, and left at scale 1; callers pin their coefficients to zero.
std::pair<Dataset, StandardizationInfo> standardize(const Dataset& data);

/// Maps coefficients fitted on standardized data back to the original scale.
std::pair<VectorXd, double> destandardize(const VectorXd& beta_std,
                                          double intercept_std,
                                          const StandardizationInfo& info);

/// Decreasing log-spaced lambda grid. lambda_max is the smallest value at
/// which every penalized coefficient is zero:
///   lambda_max = max_j |x_j' y_work| / (max(alpha, 0.001) * w_j)
/// over features with w_j > 0. y_work is the residual at the null model
/// (y minus its mean, for both families). min_ratio <= 0 selects the default
/// 0.01 (n < p) or 1e-4.
LambdaSequence make_lambda_sequence(const MatrixXd& x_std, const VectorXd& y_work,
                                    const PenaltyFactors& weights, double alpha,
                                    int n_lambda, double min_ratio);

/// Defaults shared by every caller.
inline constexpr int kDefaultNLambda = 100;

inline double default_min_ratio(Eigen::Index n, Eigen::Index p) {
    return n < p ? 0.01 : 1e-4;
}

}  // namespace fwelnet
