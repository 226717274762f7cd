#pragma once

#include "fwelnet/elnet.hpp"
#include "fwelnet/types.hpp"

#include <functional>
#include <vector>

namespace fwelnet {

enum class Aggregate { mean, median };

inline const char* aggregate_name(Aggregate a) {
    return a == Aggregate::mean ? "mean" : "median";
}

/// Penalty weights from feature scores s_j = z_j' theta:
///   w_j = sum_l exp(s_l) / (p * exp(s_j)),
/// computed after subtracting max_j s_j (w is invariant to the shift).
/// Always w_j >= 1/p, and theta = 0 gives w_j = 1 for all j.
PenaltyFactors penalty_weights(const FeatureInfo& zmat, const ThetaVector& theta);

/// Raw scores z_j' theta (unshifted).
VectorXd feature_scores(const FeatureInfo& zmat, const ThetaVector& theta);

/// Gradient wrt theta of the penalty term of the objective at fixed beta:
///   d/d theta_k = lambda * sum_j C_j(beta) * w_j(theta) * (zbar_k - z_jk),
/// where C_j = alpha |beta_j| + (1-alpha)/2 beta_j^2 and zbar_k is the
/// softmax-weighted mean of Z column k. A constant Z column therefore has an
/// exactly zero gradient component.
ThetaVector theta_gradient(const FeatureInfo& zmat, const ThetaVector& theta,
                           const VectorXd& beta, double lambda, double alpha);

/// Component-wise mean or median of per-lambda gradients.
ThetaVector aggregate_gradient(const std::vector<ThetaVector>& per_lambda_grads,
                               Aggregate mode);

struct BacktrackResult {
    ThetaVector theta;
    double eta = 0.0;
    bool accepted = false;
    double objective = 0.0;  // aggregate objective at the returned theta
};

/// Backtracking line search along -delta: tries eta = 1, 1/2, 1/4, ... with
/// at most 20 halvings and accepts the first candidate whose aggregate
/// objective is strictly below the value at theta.
BacktrackResult backtracking_step(
    const ThetaVector& theta, const ThetaVector& delta,
    const std::function<double(const ThetaVector&)>& eval_aggregate_objective);

struct FwelnetConfig {
    double alpha = 1.0;
    int n_iter = 1;
    Aggregate aggregate = Aggregate::mean;
    SolverConfig solver;
    int n_lambda = 100;
    double lambda_min_ratio = 0.0;  // <= 0: default by n vs p
};

struct FwelnetModel {
    ThetaVector theta;
    ElnetFit fit;             // final path at the learned theta
    PenaltyFactors weights;   // at the learned theta
    std::vector<double> history;  // aggregate objective, strictly decreasing
    int accepted_iterations = 0;
    double alpha = 1.0;
    int n_iter = 0;
    Aggregate aggregate = Aggregate::mean;
};

/// The descent scheme over a shared theta:
///   1. lambda sequence with unit weights;
///   2. beta path initialized at the plain elastic net, theta = 0;
///   3. n_iter times: aggregate the per-lambda theta-gradients, take a
///      backtracking step on the shared theta, re-solve the path (warm
///      started) with the new weights. A rejected line search stops early.
/// Gaussian family; `lambda_override` fixes the sequence externally.
FwelnetModel fwelnet_fit(const Dataset& data, const FeatureInfo& zmat,
                         const FwelnetConfig& config,
                         const LambdaSequence* lambda_override = nullptr);

/// Same scheme with the RSS term replaced by the binomial negative
/// log-likelihood. The theta-gradient is unchanged (theta only enters the
/// penalty).
FwelnetModel fwelnet_fit_glm(const Dataset& data, const FeatureInfo& zmat,
                             const FwelnetConfig& config,
                             const LambdaSequence* lambda_override = nullptr);

/// Dispatches on data.family.
FwelnetModel fwelnet_fit_any(const Dataset& data, const FeatureInfo& zmat,
                             const FwelnetConfig& config,
                             const LambdaSequence* lambda_override = nullptr);

struct PerLambdaResult {
    LambdaSequence lambda_seq;
    std::vector<ThetaVector> thetas;  // one per lambda
    MatrixXd betas;                   // p x m
    VectorXd intercepts;
    std::vector<int> iterations;      // alternations used per lambda
};

/// Comparison mode: an independent theta per lambda, alternating a
/// backtracking theta step with an elastic-net re-solve at that lambda until
/// the objective decrease falls below 1e-6 relative or 50 alternations.
PerLambdaResult fwelnet_fit_per_lambda(const Dataset& data, const FeatureInfo& zmat,
                                       const FwelnetConfig& config,
                                       const LambdaSequence* lambda_override = nullptr);

}  // namespace fwelnet
