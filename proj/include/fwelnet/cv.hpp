#pragma once

#include "fwelnet/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fwelnet {

enum class Metric { mse, deviance, auc };

const char* metric_name(Metric m);

struct FoldAssignment {
    std::vector<int> fold_of;  // length n, values in [0, k)
    int k = 0;
};

/// Seeded grouped k-fold assignment: distinct groups (or observations, when
/// no grouping is given) are shuffled and dealt round-robin, so observations
/// sharing a group ID always share a fold.
FoldAssignment make_folds(Eigen::Index n, int k,
                          const std::optional<std::vector<long long>>& obs_group_ids,
                          std::uint64_t seed);

struct CvResult {
    VectorXd lambda;
    VectorXd mean_metric;
    VectorXd se_metric;
    MatrixXd fold_metric;  // k x m, NaN where a fold's metric is undefined
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    Eigen::Index index_min = 0;
    Eigen::Index index_1se = 0;
    Metric metric = Metric::mse;
    std::vector<std::string> warnings;
};

/// A fitted path's predictions on new rows: n_new x m linear predictors.
using PathPredictor = std::function<MatrixXd(const MatrixXd&)>;

/// Trains on a fold complement and returns a predictor over the shared path.
using FitCallback = std::function<PathPredictor(const Dataset& train)>;

/// K-fold cross-validation over a fixed lambda sequence: fit on each fold
/// complement, score held-out rows per lambda, then mean and standard error
/// over folds. lambda_min optimizes the mean (minimum for mse/deviance,
/// maximum for auc); lambda_1se is the most regularized value within one
/// standard error of it. An AUC fold with a single class is excluded from the
/// aggregation with a warning.
CvResult cross_validate(const Dataset& data, const FitCallback& fit, Metric metric,
                        const FoldAssignment& folds, const LambdaSequence& lambda_seq,
                        int n_threads = 1);

/// Mann-Whitney AUC; ties contribute 1/2. Throws DataError unless both
/// classes are present.
double auc(const VectorXd& scores, const VectorXd& labels);

/// Checks that each group's observations occupy exactly one fold.
bool folds_respect_groups(const FoldAssignment& folds,
                          const std::vector<long long>& obs_group_ids);

}  // namespace fwelnet
