#pragma once

#include "fwelnet/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fwelnet {

enum class SimSetting {
    setting1,
    setting2_one_group,
    setting2_four_groups,
    setting3,
    fig1,
    multitask
};

/// Parses "1", "2a", "2b", "3", "fig1", "mt". Throws DataError otherwise.
SimSetting parse_sim_setting(const std::string& name);
const char* sim_setting_name(SimSetting s);

struct SimConfig {
    SimSetting setting = SimSetting::setting1;
    double snr_y = 2.0;
    double snr_z = 10.0;  // setting1 only
    int n_runs = 30;
    std::uint64_t seed = 1;
    int n_test = 10000;
    // Method hyperparameters (fixed across runs).
    double alpha = 1.0;
    int n_iter = 1;
    int n_folds = 10;
    int n_threads = 1;
};

/// One generated instance: training data, side information, and the test-set
/// ground truth. For the multitask setting y2/beta2 are populated and zmat is
/// unused (side information comes from coefficients during fitting).
struct SimInstance {
    Dataset train;          // y = first response
    VectorXd y2;            // multitask only
    FeatureInfo zmat;
    MatrixXd x_test;
    VectorXd mu_test;       // E[y | x_test] for the first response
    VectorXd mu2_test;      // multitask only
    VectorXd beta_true;
    VectorXd beta2_true;    // multitask only
    std::vector<int> group_of;  // settings with grouped features
};

/// Deterministic instance for (config.seed, run_index).
SimInstance generate(const SimConfig& config, int run_index);

/// Mean of (yhat_i - mu_i)^2 over the test set.
double test_mse(const VectorXd& y_hat, const VectorXd& mu);

struct TprFpr {
    double tpr = 0.0;
    double fpr = 0.0;
};

/// Support recovery against the true coefficients; "nonzero" is exact
/// inequality with 0.
TprFpr tpr_fpr(const VectorXd& beta_hat, const VectorXd& beta_true);

struct SimRunResult {
    int run = 0;
    std::string method;
    double mse = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    double lambda = 0.0;
    VectorXd theta;            // fwelnet methods
    VectorXd learned_weights;  // fig1: per-feature penalty weights
    bool failed = false;
    std::string error;
};

struct MethodSummary {
    std::string method;
    int n_ok = 0;
    double median_mse = 0.0;
    double q1_mse = 0.0;
    double q3_mse = 0.0;
    double median_tpr = 0.0;
    double median_fpr = 0.0;
};

struct ExperimentResult {
    SimConfig config;
    std::vector<SimRunResult> runs;  // ordered by (run, method)
    std::vector<MethodSummary> summaries;
    int n_failed = 0;
};

/// Runs the configured battery: per run, generate an instance, fit the lasso
/// baseline and fwelnet with CV-selected lambda (the multitask setting fits
/// the individual lasso, a small-scale multi-response reference and the
/// alternating scheme), then aggregate medians and quartiles per method.
/// Fully deterministic for a fixed seed; per-run failures are recorded and
/// skipped.
ExperimentResult run_experiment(const SimConfig& config);

/// Median with linear interpolation (quartiles likewise).
double quantile(std::vector<double> values, double q);

/// Harness-internal reference: multi-response lasso (joint l2 penalty across
/// the two responses per feature) solved by proximal gradient on a shared
/// path; returns p x 2 coefficients at the CV-selected lambda.
struct MultiResponseFit {
    MatrixXd beta;  // p x 2, original scale
    VectorXd intercept;  // length 2
    double lambda = 0.0;
};

MultiResponseFit multiresponse_lasso_cv(const MatrixXd& x, const VectorXd& y1,
                                        const VectorXd& y2, int n_lambda,
                                        int n_folds, std::uint64_t fold_seed,
                                        int n_threads = 1);

/// Single-lambda multi-response solve on standardized/centered inputs
/// (FISTA); returns p x 2 coefficients on that scale.
MatrixXd multiresponse_lasso_solve(const MatrixXd& x_std, const MatrixXd& y_centered,
                                   double lambda, double tol, int max_iter,
                                   const MatrixXd* warm = nullptr);

}  // namespace fwelnet
