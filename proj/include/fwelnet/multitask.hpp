#pragma once

#include "fwelnet/cv.hpp"
#include "fwelnet/fwelnet.hpp"
#include "fwelnet/pipeline.hpp"

#include <cstdint>

namespace fwelnet {

struct MultitaskConfig {
    int n_outer = 3;
    double alpha = 1.0;
    int n_iter = 1;
    Aggregate aggregate = Aggregate::mean;
    SolverConfig solver;
    int n_lambda = 100;
    double lambda_min_ratio = 0.0;
    int n_folds = 10;
    std::uint64_t seed = 0;
    int n_threads = 1;
};

struct MultitaskSnapshot {
    VectorXd beta1;
    VectorXd beta2;
};

struct MultitaskResult {
    VectorXd beta1;
    VectorXd beta2;
    double intercept1 = 0.0;
    double intercept2 = 0.0;
    double lambda1 = 0.0;  // lambda_min of the final update per response
    double lambda2 = 0.0;
    std::vector<MultitaskSnapshot> snapshots;  // n_outer + 1, incl. initialization
    CvResult cv1;
    CvResult cv2;
};

/// Alternating scheme for two Gaussian responses sharing one design matrix:
/// initialize both coefficient vectors at CV-selected (lambda_min) elastic-net
/// solutions; each outer iteration builds Z for one response from the other's
/// current |coefficients| (plus a constant column), runs a CV-selected fit for
/// that response, then updates the other symmetrically. Folds are built once
/// from the seed and reused, so the procedure is deterministic.
MultitaskResult multitask_fit(const MatrixXd& x, const VectorXd& y1, const VectorXd& y2,
                              const MultitaskConfig& config);

/// One response update given side information built from the partner's
/// coefficients; exposed for the zero-coefficient reduction property.
CvSelection multitask_update(const MatrixXd& x, const VectorXd& y,
                             const VectorXd& partner_beta_abs,
                             const MultitaskConfig& config,
                             const FoldAssignment& folds);

}  // namespace fwelnet
