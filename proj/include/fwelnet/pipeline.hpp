#pragma once

#include "fwelnet/cv.hpp"
#include "fwelnet/data_model.hpp"
#include "fwelnet/fwelnet.hpp"

#include <optional>

namespace fwelnet {

/// Coefficient path mapped back to the original data scale.
struct OriginalScalePath {
    LambdaSequence lambda_seq;
    VectorXd intercepts;  // length m
    MatrixXd betas;       // p x m
    Family family = Family::gaussian;
};

MatrixXd path_eta_original(const OriginalScalePath& path, const MatrixXd& x_new);

struct ElnetPipelineResult {
    OriginalScalePath path;
    ElnetFit fit_std;  // on the standardized scale
    StandardizationInfo info;
};

/// Standardize (optionally), build or reuse a lambda sequence, fit the path,
/// map coefficients back to the original scale.
ElnetPipelineResult fit_elnet_pipeline(const Dataset& raw, const PenaltyFactors& factors,
                                       const SolverConfig& solver, int n_lambda,
                                       double min_ratio, bool do_standardize = true,
                                       const LambdaSequence* lambda_override = nullptr);

struct FwelnetPipelineResult {
    OriginalScalePath path;
    FwelnetModel model;
    StandardizationInfo info;
};

FwelnetPipelineResult fit_fwelnet_pipeline(const Dataset& raw, const FeatureInfo& zmat,
                                           const FwelnetConfig& config,
                                           bool do_standardize = true,
                                           const LambdaSequence* lambda_override = nullptr);

/// CV-selected model: full-data path plus the CvResult used to pick lambda.
/// theta (for fwelnet) is re-learned inside every training fold.
struct CvSelection {
    OriginalScalePath path;
    CvResult cv;
    VectorXd beta_min;        // original scale, at lambda_min
    double intercept_min = 0.0;
    std::optional<FwelnetModel> model;  // populated for fwelnet fits
};

CvSelection cv_elnet(const Dataset& raw, const PenaltyFactors& factors,
                     const SolverConfig& solver, int n_lambda, double min_ratio,
                     Metric metric, const FoldAssignment& folds, int n_threads = 1,
                     bool do_standardize = true);

CvSelection cv_fwelnet(const Dataset& raw, const FeatureInfo& zmat,
                       const FwelnetConfig& config, Metric metric,
                       const FoldAssignment& folds, int n_threads = 1,
                       bool do_standardize = true);

}  // namespace fwelnet
