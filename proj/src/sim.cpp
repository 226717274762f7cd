#include "fwelnet/sim.hpp"

#include "fwelnet/data_model.hpp"
#include "fwelnet/elnet.hpp"
#include "fwelnet/group_bridge.hpp"
#include "fwelnet/multitask.hpp"
#include "fwelnet/parallel.hpp"
#include "fwelnet/pipeline.hpp"
#include "fwelnet/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fwelnet {

SimSetting parse_sim_setting(const std::string& name) {
    if (name == "1") return SimSetting::setting1;
    if (name == "2a") return SimSetting::setting2_one_group;
    if (name == "2b") return SimSetting::setting2_four_groups;
    if (name == "3") return SimSetting::setting3;
    if (name == "fig1") return SimSetting::fig1;
    if (name == "mt") return SimSetting::multitask;
    throw DataError("unknown setting '" + name + "'; valid values: 1, 2a, 2b, 3, fig1, mt");
}

const char* sim_setting_name(SimSetting s) {
    switch (s) {
        case SimSetting::setting1: return "1";
        case SimSetting::setting2_one_group: return "2a";
        case SimSetting::setting2_four_groups: return "2b";
        case SimSetting::setting3: return "3";
        case SimSetting::fig1: return "fig1";
        case SimSetting::multitask: return "mt";
    }
    return "?";
}

namespace {

MatrixXd draw_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

VectorXd draw_vector(Rng& rng, Eigen::Index size, double sd) {
    VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.normal(0.0, sd);
    return v;
}

std::vector<int> contiguous_groups(Eigen::Index p, int group_size) {
    std::vector<int> group_of(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        group_of[static_cast<std::size_t>(j)] = static_cast<int>(j) / group_size;
    }
    return group_of;
}

double population_variance(const VectorXd& v) {
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

}  // namespace

SimInstance generate(const SimConfig& config, int run_index) {
    if (config.snr_y <= 0.0 || config.snr_z <= 0.0) throw DataError("SNRs must be positive");
    if (config.n_runs < 1) throw DataError("n_runs must be at least 1");
    Rng rng = Rng::keyed(config.seed, static_cast<std::uint64_t>(run_index));

    SimInstance inst;
    Eigen::Index n = 0, p = 0;

    switch (config.setting) {
        case SimSetting::setting1: {
            n = 100;
            p = 50;
            inst.beta_true = VectorXd::Zero(p);
            inst.beta_true.segment(0, 5).setConstant(2.0);
            inst.beta_true.segment(5, 5).setConstant(-1.0);
            inst.train.x = draw_matrix(rng, n, p);
            const double sigma_y = std::sqrt(inst.beta_true.squaredNorm() / config.snr_y);
            inst.train.y = inst.train.x * inst.beta_true + draw_vector(rng, n, sigma_y);
            const VectorXd abs_beta = inst.beta_true.cwiseAbs();
            const double sigma_z = std::sqrt(population_variance(abs_beta) / config.snr_z);
            inst.zmat.z.resize(p, 2);
            inst.zmat.z.col(0) = abs_beta + draw_vector(rng, p, sigma_z);
            inst.zmat.z.col(1).setOnes();
            break;
        }
        case SimSetting::setting2_one_group:
        case SimSetting::setting2_four_groups: {
            n = 100;
            p = 150;
            const int active_features =
                config.setting == SimSetting::setting2_one_group ? 10 : 40;
            inst.group_of = contiguous_groups(p, 10);
            inst.zmat = grouped_indicator_z(make_group_structure(inst.group_of));
            inst.beta_true = VectorXd::Zero(p);
            for (int j = 0; j < active_features; ++j) {
                inst.beta_true[j] = rng.flip() ? 3.0 : -3.0;
            }
            inst.train.x = draw_matrix(rng, n, p);
            const double sigma_y = std::sqrt(inst.beta_true.squaredNorm() / config.snr_y);
            inst.train.y = inst.train.x * inst.beta_true + draw_vector(rng, n, sigma_y);
            break;
        }
        case SimSetting::setting3: {
            n = 100;
            p = 100;
            inst.beta_true = VectorXd::Zero(p);
            inst.beta_true.segment(0, 10).setConstant(2.0);
            inst.train.x = draw_matrix(rng, n, p);
            const double sigma_y = std::sqrt(inst.beta_true.squaredNorm() / config.snr_y);
            inst.train.y = inst.train.x * inst.beta_true + draw_vector(rng, n, sigma_y);
            inst.zmat.z.resize(p, 11);
            inst.zmat.z.leftCols(10) = draw_matrix(rng, p, 10);
            inst.zmat.z.col(10).setOnes();
            break;
        }
        case SimSetting::fig1: {
            n = 200;
            p = 100;
            inst.group_of = contiguous_groups(p, 10);
            inst.zmat = grouped_indicator_z(make_group_structure(inst.group_of));
            inst.beta_true = VectorXd::Zero(p);
            inst.beta_true.segment(0, 10).setConstant(4.0);
            inst.beta_true.segment(10, 10).setConstant(-2.0);
            inst.train.x = draw_matrix(rng, n, p);
            const double sigma_y = std::sqrt(inst.beta_true.squaredNorm() / config.snr_y);
            inst.train.y = inst.train.x * inst.beta_true + draw_vector(rng, n, sigma_y);
            break;
        }
        case SimSetting::multitask: {
            n = 150;
            p = 50;
            inst.beta_true = VectorXd::Zero(p);
            inst.beta2_true = VectorXd::Zero(p);
            for (int j = 0; j < 5; ++j) inst.beta_true[j] = rng.flip() ? 5.0 : -5.0;
            for (int j = 5; j < 10; ++j) inst.beta_true[j] = rng.flip() ? 2.0 : -2.0;
            for (int j = 0; j < 5; ++j) inst.beta2_true[j] = rng.flip() ? 5.0 : -5.0;
            for (int j = 10; j < 15; ++j) inst.beta2_true[j] = rng.flip() ? 2.0 : -2.0;
            inst.train.x = draw_matrix(rng, n, p);
            const double sigma1 = std::sqrt(inst.beta_true.squaredNorm() / 0.5);
            const double sigma2 = std::sqrt(inst.beta2_true.squaredNorm() / 1.5);
            inst.train.y = inst.train.x * inst.beta_true + draw_vector(rng, n, sigma1);
            inst.y2 = inst.train.x * inst.beta2_true + draw_vector(rng, n, sigma2);
            break;
        }
    }

    inst.train.family = Family::gaussian;
    inst.x_test = draw_matrix(rng, config.n_test, p);
    inst.mu_test = inst.x_test * inst.beta_true;
    if (config.setting == SimSetting::multitask) {
        inst.mu2_test = inst.x_test * inst.beta2_true;
    }
    return inst;
}

double test_mse(const VectorXd& y_hat, const VectorXd& mu) {
    if (y_hat.size() != mu.size()) throw DataError("test_mse: lengths differ");
    return (y_hat - mu).squaredNorm() / static_cast<double>(mu.size());
}

TprFpr tpr_fpr(const VectorXd& beta_hat, const VectorXd& beta_true) {
    if (beta_hat.size() != beta_true.size()) throw DataError("tpr_fpr: lengths differ");
    int true_pos = 0, true_nonzero = 0, false_pos = 0, true_zero = 0;
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
        if (beta_true[j] != 0.0) {
            ++true_nonzero;
            if (beta_hat[j] != 0.0) ++true_pos;
        } else {
            ++true_zero;
            if (beta_hat[j] != 0.0) ++false_pos;
        }
    }
    if (true_nonzero == 0 || true_zero == 0) {
        throw DataError("tpr_fpr needs at least one zero and one nonzero true coefficient");
    }
    return {static_cast<double>(true_pos) / true_nonzero,
            static_cast<double>(false_pos) / true_zero};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

namespace {

// Gram form of one two-response problem; built once, solved at many lambdas.
struct MrProblem {
    MatrixXd gram;  // X'X, p x p
    MatrixXd xty;   // X'Y, p x 2
    double y_sq = 0.0;
    double lip = 1e-12;
};

MrProblem make_mr_problem(const MatrixXd& x_std, const MatrixXd& y_centered) {
    MrProblem prob;
    prob.gram = x_std.transpose() * x_std;
    prob.xty = x_std.transpose() * y_centered;
    prob.y_sq = y_centered.squaredNorm();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(prob.gram);
    prob.lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
    return prob;
}

// FISTA with restart; stops once the best objective stops improving for a
// whole window.
MatrixXd mr_solve(const MrProblem& prob, double lambda, double tol, int max_iter,
                  const MatrixXd* warm) {
    const Eigen::Index p = prob.gram.rows();
    const Eigen::Index r = prob.xty.cols();
    MatrixXd b = warm ? *warm : MatrixXd::Zero(p, r);

    const double step = 1.0 / prob.lip;
    auto objective = [&](const MatrixXd& bb) {
        const double quad = (prob.gram * bb).cwiseProduct(bb).sum();
        const double cross = prob.xty.cwiseProduct(bb).sum();
        double pen = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) pen += bb.row(j).norm();
        return 0.5 * (prob.y_sq - 2.0 * cross + quad) + lambda * pen;
    };

    MatrixXd point = b, best = b;
    MatrixXd grad(p, r), next(p, r);
    double t_mom = 1.0;
    double obj = objective(b);
    double best_obj = obj;
    int since_improvement = 0;
    constexpr int kWindow = 100;

    for (int iter = 0; iter < max_iter; ++iter) {
        grad.noalias() = prob.gram * point;
        grad -= prob.xty;
        next = point - step * grad;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double norm = next.row(j).norm();
            const double shrink = norm > 0.0 ? std::max(0.0, 1.0 - step * lambda / norm) : 0.0;
            next.row(j) *= shrink;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
        point = next + ((t_mom - 1.0) / t_next) * (next - b);
        b = next;
        t_mom = t_next;

        const double prev_obj = obj;
        obj = objective(b);
        if (obj > prev_obj) {  // restart momentum
            point = b;
            t_mom = 1.0;
        }
        if (obj < best_obj - tol * (1.0 + std::abs(best_obj))) {
            best_obj = obj;
            best = b;
            since_improvement = 0;
        } else {
            if (obj < best_obj) {
                best_obj = obj;
                best = b;
            }
            if (++since_improvement >= kWindow) break;
        }
    }
    return best;
}

}  // namespace

MatrixXd multiresponse_lasso_solve(const MatrixXd& x_std, const MatrixXd& y_centered,
                                   double lambda, double tol, int max_iter,
                                   const MatrixXd* warm) {
    const MrProblem prob = make_mr_problem(x_std, y_centered);
    return mr_solve(prob, lambda, tol, max_iter, warm);
}

namespace {

struct MultiResponseStd {
    MatrixXd x_std;
    MatrixXd y_centered;  // n x 2
    VectorXd col_means, col_scales;
    VectorXd y_means;
};

MultiResponseStd standardize_two(const MatrixXd& x, const VectorXd& y1, const VectorXd& y2) {
    MultiResponseStd out;
    Dataset d;
    d.x = x;
    d.y = y1;
    auto [std_data, info] = standardize(d);
    out.x_std = std::move(std_data.x);
    out.col_means = info.col_means;
    out.col_scales = info.col_scales;
    out.y_centered.resize(x.rows(), 2);
    out.y_means.resize(2);
    out.y_means[0] = y1.mean();
    out.y_means[1] = y2.mean();
    out.y_centered.col(0) = y1.array() - out.y_means[0];
    out.y_centered.col(1) = y2.array() - out.y_means[1];
    return out;
}

VectorXd multiresponse_lambda_path(const MultiResponseStd& s, int n_lambda) {
    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < s.x_std.cols(); ++j) {
        const double a = s.x_std.col(j).dot(s.y_centered.col(0));
        const double b = s.x_std.col(j).dot(s.y_centered.col(1));
        lambda_max = std::max(lambda_max, std::sqrt(a * a + b * b));
    }
    const double min_ratio = default_min_ratio(s.x_std.rows(), s.x_std.cols());
    VectorXd lambdas(n_lambda);
    for (int i = 0; i < n_lambda; ++i) {
        const double t = n_lambda == 1 ? 0.0 : static_cast<double>(i) / (n_lambda - 1);
        lambdas[i] = lambda_max * std::pow(min_ratio, t);
    }
    return lambdas;
}

}  // namespace

MultiResponseFit multiresponse_lasso_cv(const MatrixXd& x, const VectorXd& y1,
                                        const VectorXd& y2, int n_lambda, int n_folds,
                                        std::uint64_t fold_seed, int n_threads) {
    const FoldAssignment folds = make_folds(x.rows(), n_folds, std::nullopt, fold_seed);
    const MultiResponseStd full = standardize_two(x, y1, y2);
    const VectorXd lambdas = multiresponse_lambda_path(full, n_lambda);

    MatrixXd fold_mse(n_folds, n_lambda);
    parallel_for(static_cast<std::size_t>(n_folds), n_threads, [&](std::size_t f) {
        std::vector<int> train_rows, held_rows;
        for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
            (folds.fold_of[i] == static_cast<int>(f) ? held_rows : train_rows)
                .push_back(static_cast<int>(i));
        }
        MatrixXd xt(train_rows.size(), x.cols());
        VectorXd y1t(train_rows.size()), y2t(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            xt.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
            y1t[static_cast<Eigen::Index>(i)] = y1[train_rows[i]];
            y2t[static_cast<Eigen::Index>(i)] = y2[train_rows[i]];
        }
        MatrixXd xh(held_rows.size(), x.cols());
        VectorXd y1h(held_rows.size()), y2h(held_rows.size());
        for (std::size_t i = 0; i < held_rows.size(); ++i) {
            xh.row(static_cast<Eigen::Index>(i)) = x.row(held_rows[i]);
            y1h[static_cast<Eigen::Index>(i)] = y1[held_rows[i]];
            y2h[static_cast<Eigen::Index>(i)] = y2[held_rows[i]];
        }
        const MultiResponseStd s = standardize_two(xt, y1t, y2t);
        const MrProblem prob = make_mr_problem(s.x_std, s.y_centered);
        MatrixXd warm = MatrixXd::Zero(x.cols(), 2);
        for (int li = 0; li < n_lambda; ++li) {
            warm = mr_solve(prob, lambdas[li], 1e-10, 3000, &warm);
            // Back to the original scale for held-out predictions.
            VectorXd b1 = warm.col(0).cwiseQuotient(s.col_scales);
            VectorXd b2 = warm.col(1).cwiseQuotient(s.col_scales);
            const double i1 = s.y_means[0] - b1.dot(s.col_means);
            const double i2 = s.y_means[1] - b2.dot(s.col_means);
            const double mse1 = (y1h.array() - (xh * b1).array() - i1).square().mean();
            const double mse2 = (y2h.array() - (xh * b2).array() - i2).square().mean();
            fold_mse(static_cast<Eigen::Index>(f), li) = 0.5 * (mse1 + mse2);
        }
    });

    int best = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (int li = 0; li < n_lambda; ++li) {
        const double mean = fold_mse.col(li).mean();
        if (mean < best_mean) {
            best_mean = mean;
            best = li;
        }
    }

    const MrProblem full_prob = make_mr_problem(full.x_std, full.y_centered);
    MatrixXd warm = MatrixXd::Zero(x.cols(), 2);
    for (int li = 0; li <= best; ++li) {
        warm = mr_solve(full_prob, lambdas[li], 1e-10, 3000, &warm);
    }
    MultiResponseFit fit;
    fit.lambda = lambdas[best];
    fit.beta.resize(x.cols(), 2);
    fit.beta.col(0) = warm.col(0).cwiseQuotient(full.col_scales);
    fit.beta.col(1) = warm.col(1).cwiseQuotient(full.col_scales);
    fit.intercept.resize(2);
    fit.intercept[0] = full.y_means[0] - fit.beta.col(0).dot(full.col_means);
    fit.intercept[1] = full.y_means[1] - fit.beta.col(1).dot(full.col_means);
    return fit;
}

namespace {

SimRunResult score_gaussian(int run, const std::string& method, const SimInstance& inst,
                            const VectorXd& beta, double intercept, double lambda,
                            const VectorXd& mu, const VectorXd& beta_true) {
    SimRunResult r;
    r.run = run;
    r.method = method;
    r.lambda = lambda;
    const VectorXd y_hat = (inst.x_test * beta).array() + intercept;
    r.mse = test_mse(y_hat, mu);
    const TprFpr rates = tpr_fpr(beta, beta_true);
    r.tpr = rates.tpr;
    r.fpr = rates.fpr;
    return r;
}

std::vector<SimRunResult> run_single(const SimConfig& config, int run) {
    const SimInstance inst = generate(config, run);
    const std::uint64_t fold_seed = config.seed * 1000003ull + static_cast<std::uint64_t>(run);
    std::vector<SimRunResult> out;

    if (config.setting == SimSetting::multitask) {
        const FoldAssignment folds =
            make_folds(inst.train.x.rows(), config.n_folds, std::nullopt, fold_seed);
        SolverConfig solver;
        solver.alpha = 1.0;

        Dataset d1 = inst.train;
        Dataset d2 = inst.train;
        d2.y = inst.y2;
        const PenaltyFactors ones = PenaltyFactors::ones(inst.train.x.cols());
        CvSelection l1 = cv_elnet(d1, ones, solver, kDefaultNLambda, 0.0, Metric::mse, folds);
        CvSelection l2 = cv_elnet(d2, ones, solver, kDefaultNLambda, 0.0, Metric::mse, folds);
        out.push_back(score_gaussian(run, "ind_lasso_y1", inst, l1.beta_min, l1.intercept_min,
                                     l1.cv.lambda_min, inst.mu_test, inst.beta_true));
        out.push_back(score_gaussian(run, "ind_lasso_y2", inst, l2.beta_min, l2.intercept_min,
                                     l2.cv.lambda_min, inst.mu2_test, inst.beta2_true));

        const MultiResponseFit mt = multiresponse_lasso_cv(inst.train.x, inst.train.y, inst.y2,
                                                           50, config.n_folds, fold_seed);
        out.push_back(score_gaussian(run, "mt_lasso_y1", inst, mt.beta.col(0), mt.intercept[0],
                                     mt.lambda, inst.mu_test, inst.beta_true));
        out.push_back(score_gaussian(run, "mt_lasso_y2", inst, mt.beta.col(1), mt.intercept[1],
                                     mt.lambda, inst.mu2_test, inst.beta2_true));

        MultitaskConfig mtc;
        mtc.alpha = config.alpha;
        mtc.n_iter = config.n_iter;
        mtc.n_folds = config.n_folds;
        mtc.seed = fold_seed;
        const MultitaskResult alg = multitask_fit(inst.train.x, inst.train.y, inst.y2, mtc);
        out.push_back(score_gaussian(run, "fwelnet_mt_y1", inst, alg.beta1, alg.intercept1,
                                     alg.lambda1, inst.mu_test, inst.beta_true));
        out.push_back(score_gaussian(run, "fwelnet_mt_y2", inst, alg.beta2, alg.intercept2,
                                     alg.lambda2, inst.mu2_test, inst.beta2_true));
        return out;
    }

    const FoldAssignment folds =
        make_folds(inst.train.x.rows(), config.n_folds, std::nullopt, fold_seed);

    SolverConfig lasso_solver;
    lasso_solver.alpha = 1.0;
    CvSelection lasso = cv_elnet(inst.train, PenaltyFactors::ones(inst.train.x.cols()),
                                 lasso_solver, kDefaultNLambda, 0.0, Metric::mse, folds);
    out.push_back(score_gaussian(run, "lasso", inst, lasso.beta_min, lasso.intercept_min,
                                 lasso.cv.lambda_min, inst.mu_test, inst.beta_true));

    FwelnetConfig fw;
    fw.alpha = config.alpha;
    fw.n_iter = config.n_iter;
    CvSelection fwel = cv_fwelnet(inst.train, inst.zmat, fw, Metric::mse, folds);
    SimRunResult r = score_gaussian(run, "fwelnet", inst, fwel.beta_min, fwel.intercept_min,
                                    fwel.cv.lambda_min, inst.mu_test, inst.beta_true);
    if (fwel.model) {
        r.theta = fwel.model->theta;
        if (config.setting == SimSetting::fig1) r.learned_weights = fwel.model->weights.w;
    }
    out.push_back(std::move(r));
    return out;
}

}  // namespace

ExperimentResult run_experiment(const SimConfig& config) {
    ExperimentResult result;
    result.config = config;

    std::vector<std::vector<SimRunResult>> per_run(static_cast<std::size_t>(config.n_runs));
    parallel_for(static_cast<std::size_t>(config.n_runs), config.n_threads, [&](std::size_t r) {
        try {
            per_run[r] = run_single(config, static_cast<int>(r));
        } catch (const std::exception& e) {
            SimRunResult failed;
            failed.run = static_cast<int>(r);
            failed.method = "all";
            failed.failed = true;
            failed.error = e.what();
            per_run[r] = {failed};
        }
    });

    std::map<std::string, std::vector<const SimRunResult*>> by_method;
    for (auto& runs : per_run) {
        for (auto& r : runs) {
            if (r.failed) {
                ++result.n_failed;
            } else {
                by_method[r.method].push_back(&r);
            }
            result.runs.push_back(r);
        }
    }

    for (auto& [method, rows] : by_method) {
        MethodSummary s;
        s.method = method;
        s.n_ok = static_cast<int>(rows.size());
        std::vector<double> mse, tpr, fpr;
        for (const auto* r : rows) {
            mse.push_back(r->mse);
            tpr.push_back(r->tpr);
            fpr.push_back(r->fpr);
        }
        s.median_mse = quantile(mse, 0.5);
        s.q1_mse = quantile(mse, 0.25);
        s.q3_mse = quantile(mse, 0.75);
        s.median_tpr = quantile(tpr, 0.5);
        s.median_fpr = quantile(fpr, 0.5);
        result.summaries.push_back(std::move(s));
    }
    return result;
}

}  // namespace fwelnet
