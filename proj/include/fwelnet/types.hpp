#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwelnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Family { gaussian, binomial };

inline const char* family_name(Family f) {
    return f == Family::gaussian ? "gaussian" : "binomial";
}

/// Invalid or inconsistent input data (bad CSV cell, dimension mismatch, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown (non-finite values where finite ones are required).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Response, design matrix and optional per-observation grouping.
struct Dataset {
    MatrixXd x;  // n x p
    VectorXd y;  // length n
    std::optional<std::vector<long long>> obs_group_ids;  // CV grouping, length n
    Family family = Family::gaussian;

    Eigen::Index n_obs() const { return x.rows(); }
    Eigen::Index n_features() const { return x.cols(); }
};

/// Throws DataError if the dataset violates its invariants.
void validate_dataset(const Dataset& data);

/// Centering/scaling applied to a Dataset; maps coefficients back to the
/// original scale. Scales are chosen so a standardized column has squared
/// norm n. Zero-variance columns keep scale 1 and are flagged.
struct StandardizationInfo {
    VectorXd col_means;
    VectorXd col_scales;
    double y_mean = 0.0;
    std::vector<bool> zero_variance;

    static StandardizationInfo identity(Eigen::Index p);
};

/// Decreasing lambda grid; values[0] is lambda_max.
struct LambdaSequence {
    VectorXd values;
    int n_lambda = 0;
    double min_ratio = 0.0;
    bool degenerate = false;  // lambda_max was 0

    Eigen::Index size() const { return values.size(); }
};

void validate_lambda_sequence(const LambdaSequence& seq);

/// Per-feature multipliers on the elastic-net penalty. w_j = 0 means
/// feature j is unpenalized; entries must be finite and nonnegative.
struct PenaltyFactors {
    VectorXd w;

    static PenaltyFactors ones(Eigen::Index p) {
        PenaltyFactors f;
        f.w = VectorXd::Ones(p);
        return f;
    }
};

void validate_penalty_factors(const PenaltyFactors& factors, Eigen::Index p);

struct SolverConfig {
    double alpha = 1.0;
    double tol = 1e-7;        // max scaled coefficient change per full pass
    int max_passes = 100000;
    Family family = Family::gaussian;
    // Optimality safeguard: after the coefficient-change criterion is met,
    // keep cycling until the KKT residual drops below
    // kkt_tol + kkt_tol_rel * max_j |x_j' y|.
    double kkt_tol = 1e-6;
    double kkt_tol_rel = 1e-12;
    // Binomial outer loop.
    int max_irls_iters = 25;
    double irls_tol_ratio = 1e-8;  // deviance change relative to null deviance
    // Features whose coefficient is pinned to zero (e.g. zero-variance columns).
    std::vector<bool> excluded;
    // Record the objective after every coordinate-descent pass (diagnostics).
    bool track_objective = false;
};

/// Solution path over a lambda sequence.
struct ElnetFit {
    LambdaSequence lambda_seq;
    VectorXd intercepts;       // length m
    MatrixXd betas;            // p x m, column i = solution at lambda_i
    VectorXd objective;        // length m
    long long n_passes = 0;
    Family family = Family::gaussian;
    std::vector<bool> converged;      // per lambda
    bool saturated = false;           // binomial separation guard tripped
    std::vector<std::vector<double>> objective_trace;  // per lambda, if tracked

    Eigen::Index n_features() const { return betas.rows(); }
    Eigen::Index path_length() const { return betas.cols(); }
};

/// "Features of features": one row of side information per feature.
struct FeatureInfo {
    MatrixXd z;  // p x K
    std::vector<std::string> column_names;  // optional, empty or length K

    Eigen::Index n_features() const { return z.rows(); }
    Eigen::Index n_sources() const { return z.cols(); }
};

void validate_feature_info(const FeatureInfo& zmat, Eigen::Index p);

/// Score coefficients over the K feature-information sources.
using ThetaVector = VectorXd;

}  // namespace fwelnet
