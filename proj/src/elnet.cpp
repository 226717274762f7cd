#include "fwelnet/elnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fwelnet {

double log1p_exp(double x) {
    if (x > 33.3) return x;                      // log1p(e^x) == x to double precision
    if (x > 18.0) return x + std::exp(-x);       // log1p(t) ~ t for tiny t
    if (x > -37.0) return std::log1p(std::exp(x));
    return std::exp(x);
}

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kProbClamp = 1e-5;
constexpr double kSaturationNorm = 1e3;

double clamp_prob(double p) { return std::min(1.0 - kProbClamp, std::max(kProbClamp, p)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

double negative_log_likelihood(Family family, const VectorXd& y, const VectorXd& eta) {
    if (y.size() != eta.size()) {
        throw DataError("negative_log_likelihood: y and eta lengths differ");
    }
    if (family == Family::gaussian) {
        return 0.5 * (y - eta).squaredNorm();
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        total += log1p_exp(eta[i]) - y[i] * eta[i];
    }
    return total;
}

double penalty_value(const VectorXd& beta, const PenaltyFactors& factors,
                     double lambda, double alpha) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double b = beta[j];
        total += factors.w[j] * (alpha * std::abs(b) + 0.5 * (1.0 - alpha) * b * b);
    }
    return lambda * total;
}

double objective_value(const Dataset& data, const PenaltyFactors& factors,
                       double lambda, double alpha, double intercept,
                       const VectorXd& beta) {
    VectorXd eta = (data.x * beta).array() + intercept;
    return negative_log_likelihood(data.family, data.y, eta) +
           penalty_value(beta, factors, lambda, alpha);
}

namespace {

// Shared state for one weighted-least-squares coordinate descent solve:
// minimize 0.5 * sum_i v_i (z_i - b0 - x_i'b)^2 + lambda * sum_j w_j pen(b_j).
// Gaussian fits use v = 1 and z = y; the binomial outer loop refreshes v, z.
struct CdWorkspace {
    const MatrixXd& x;
    const PenaltyFactors& factors;
    const SolverConfig& config;
    VectorXd obs_weights;    // empty means all-ones
    VectorXd xtx;            // sum_i v_i x_ij^2
    VectorXd change_scale;   // sqrt(xtx_j / n), scale-free convergence metric
    double sum_weights = 0.0;

    VectorXd beta;
    double intercept = 0.0;
    VectorXd residual;       // z - b0 - X b
    long long passes = 0;

    CdWorkspace(const MatrixXd& x_, const PenaltyFactors& factors_, const SolverConfig& config_)
        : x(x_), factors(factors_), config(config_) {}

    bool excluded(Eigen::Index j) const {
        return !config.excluded.empty() && config.excluded[static_cast<std::size_t>(j)];
    }

    void set_unit_weights() {
        obs_weights.resize(0);
        sum_weights = static_cast<double>(x.rows());
        refresh_xtx();
    }

    void set_weights(const VectorXd& v) {
        obs_weights = v;
        sum_weights = v.sum();
        refresh_xtx();
    }

    void refresh_xtx() {
        const Eigen::Index p = x.cols();
        xtx.resize(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            xtx[j] = obs_weights.size() == 0
                         ? x.col(j).squaredNorm()
                         : x.col(j).cwiseProduct(x.col(j)).dot(obs_weights);
        }
        change_scale = (xtx / static_cast<double>(x.rows())).cwiseSqrt();
    }

    void init_state(const VectorXd& z, const std::optional<WarmStart>& warm) {
        if (warm) {
            beta = warm->beta;
            intercept = warm->intercept;
        } else {
            beta = VectorXd::Zero(x.cols());
            intercept = 0.0;
        }
        set_response(z);
    }

    void set_response(const VectorXd& z) {
        residual = z - x * beta;
        residual.array() -= intercept;
    }

    double weighted_dot(Eigen::Index j) const {
        return obs_weights.size() == 0
                   ? x.col(j).dot(residual)
                   : x.col(j).cwiseProduct(obs_weights).dot(residual);
    }

    void update_intercept() {
        const double shift = obs_weights.size() == 0
                                 ? residual.mean()
                                 : obs_weights.dot(residual) / sum_weights;
        if (shift != 0.0) {
            intercept += shift;
            residual.array() -= shift;
        }
    }

    // One coordinate update; returns the scaled absolute change.
    double update_coord(Eigen::Index j, const VectorXd& thr, const VectorXd& denom) {
        if (excluded(j) || denom[j] <= 0.0) return 0.0;
        const double t = weighted_dot(j) + xtx[j] * beta[j];
        const double b = soft_threshold(t, thr[j]) / denom[j];
        const double d = b - beta[j];
        if (d != 0.0) {
            residual -= x.col(j) * d;
            beta[j] = b;
        }
        return std::abs(d) * change_scale[j];
    }

    double full_pass(const VectorXd& thr, const VectorXd& denom) {
        update_intercept();
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            max_change = std::max(max_change, update_coord(j, thr, denom));
        }
        ++passes;
        return max_change;
    }

    double active_pass(const VectorXd& thr, const VectorXd& denom,
                       const std::vector<Eigen::Index>& active) {
        update_intercept();
        double max_change = 0.0;
        for (Eigen::Index j : active) {
            max_change = std::max(max_change, update_coord(j, thr, denom));
        }
        ++passes;
        return max_change;
    }

    std::vector<Eigen::Index> active_set() const {
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        return active;
    }

    // Max subgradient residual at the current iterate (Gaussian working
    // residual); used as the optimality safeguard after the coefficient
    // criterion is met.
    double kkt_residual(double lambda, double alpha) const {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (excluded(j)) continue;
            const double g = weighted_dot(j);
            const double lw = lambda * factors.w[j];
            double v;
            if (beta[j] != 0.0) {
                const double sign = beta[j] > 0.0 ? 1.0 : -1.0;
                v = std::abs(g - lw * (1.0 - alpha) * beta[j] - lw * alpha * sign);
            } else {
                v = std::max(0.0, std::abs(g) - lw * alpha);
            }
            worst = std::max(worst, v);
        }
        return worst;
    }

    // Runs the pass/active-set cycle for one lambda. `kkt_scale` feeds the
    // relative part of the safeguard threshold; pass a negative value to skip
    // the safeguard (binomial inner solves rely on the outer deviance check).
    bool solve(double lambda, const VectorXd& thr, const VectorXd& denom,
               double alpha, double kkt_scale, long long max_passes) {
        const double kkt_threshold = config.kkt_tol + config.kkt_tol_rel * std::max(0.0, kkt_scale);
        while (passes < max_passes) {
            const double change = full_pass(thr, denom);
            if (change < config.tol) {
                if (kkt_scale < 0.0 || kkt_residual(lambda, alpha) <= kkt_threshold) return true;
                continue;  // safeguard: keep cycling until optimal
            }
            auto active = active_set();
            while (passes < max_passes) {
                if (active_pass(thr, denom, active) < config.tol) break;
            }
        }
        return false;
    }
};

void check_fit_inputs(const Dataset& data, const PenaltyFactors& factors,
                      const SolverConfig& config, const LambdaSequence& lambda_seq) {
    validate_dataset(data);
    validate_penalty_factors(factors, data.x.cols());
    validate_lambda_sequence(lambda_seq);
    if (config.tol <= 0.0) throw DataError("solver tol must be positive");
    if (config.alpha < 0.0 || config.alpha > 1.0) throw DataError("alpha must lie in [0, 1]");
    if (!config.excluded.empty() &&
        static_cast<Eigen::Index>(config.excluded.size()) != data.x.cols()) {
        throw DataError("exclusion mask length does not match feature count");
    }
}

}  // namespace

ElnetFit fit_path(const Dataset& data, const PenaltyFactors& factors,
                  const SolverConfig& config, const LambdaSequence& lambda_seq,
                  const std::optional<WarmStart>& warm) {
    check_fit_inputs(data, factors, config, lambda_seq);
    const Eigen::Index p = data.x.cols();
    const Eigen::Index m = lambda_seq.values.size();
    const double alpha = config.alpha;

    CdWorkspace ws(data.x, factors, config);
    ws.set_unit_weights();
    ws.init_state(data.y, warm);

    const double kkt_scale = (data.x.transpose() * data.y).cwiseAbs().maxCoeff();

    ElnetFit fit;
    fit.lambda_seq = lambda_seq;
    fit.family = Family::gaussian;
    fit.intercepts.resize(m);
    fit.betas.resize(p, m);
    fit.objective.resize(m);
    fit.converged.assign(static_cast<std::size_t>(m), true);
    if (config.track_objective) fit.objective_trace.resize(static_cast<std::size_t>(m));

    VectorXd thr(p), denom(p);
    for (Eigen::Index li = 0; li < m; ++li) {
        const double lambda = lambda_seq.values[li];
        for (Eigen::Index j = 0; j < p; ++j) {
            thr[j] = lambda * alpha * factors.w[j];
            denom[j] = ws.xtx[j] + lambda * (1.0 - alpha) * factors.w[j];
        }

        bool ok;
        if (config.track_objective) {
            auto& trace = fit.objective_trace[static_cast<std::size_t>(li)];
            ok = true;
            long long start = ws.passes;
            for (;;) {
                if (ws.passes - start >= config.max_passes) { ok = false; break; }
                const double change = ws.full_pass(thr, denom);
                trace.push_back(0.5 * ws.residual.squaredNorm() +
                                penalty_value(ws.beta, factors, lambda, alpha));
                if (change < config.tol &&
                    ws.kkt_residual(lambda, alpha) <=
                        config.kkt_tol + config.kkt_tol_rel * kkt_scale) {
                    break;
                }
            }
        } else {
            ok = ws.solve(lambda, thr, denom, alpha, kkt_scale, ws.passes + config.max_passes);
        }
        fit.converged[static_cast<std::size_t>(li)] = ok;

        fit.intercepts[li] = ws.intercept;
        fit.betas.col(li) = ws.beta;
        fit.objective[li] =
            0.5 * ws.residual.squaredNorm() + penalty_value(ws.beta, factors, lambda, alpha);
    }
    fit.n_passes = ws.passes;
    return fit;
}

ElnetFit fit_path_binomial(const Dataset& data, const PenaltyFactors& factors,
                           const SolverConfig& config, const LambdaSequence& lambda_seq,
                           const std::optional<WarmStart>& warm) {
    check_fit_inputs(data, factors, config, lambda_seq);
    if (data.family != Family::binomial) {
        throw DataError("fit_path_binomial requires a binomial dataset");
    }
    const Eigen::Index n = data.x.rows();
    const Eigen::Index p = data.x.cols();
    const Eigen::Index m = lambda_seq.values.size();
    const double alpha = config.alpha;

    const double ybar = clamp_prob(data.y.mean());
    const double null_intercept = logit(ybar);
    const double null_dev =
        2.0 * negative_log_likelihood(Family::binomial, data.y,
                                      VectorXd::Constant(n, null_intercept));
    const double dev_tol = config.irls_tol_ratio * std::max(null_dev, 1e-10);

    CdWorkspace ws(data.x, factors, config);
    VectorXd beta = warm ? warm->beta : VectorXd::Zero(p);
    double intercept = warm ? warm->intercept : null_intercept;

    ElnetFit fit;
    fit.lambda_seq = lambda_seq;
    fit.family = Family::binomial;
    fit.intercepts.resize(m);
    fit.betas.resize(p, m);
    fit.objective.resize(m);
    fit.converged.assign(static_cast<std::size_t>(m), true);

    VectorXd eta(n), phat(n), v(n), z(n), thr(p), denom(p);
    for (Eigen::Index li = 0; li < m; ++li) {
        const double lambda = lambda_seq.values[li];
        double dev_prev = std::numeric_limits<double>::infinity();
        bool converged = false;

        for (int outer = 0; outer < config.max_irls_iters; ++outer) {
            eta = (data.x * beta).array() + intercept;
            for (Eigen::Index i = 0; i < n; ++i) {
                // Beyond the clamp thresholds the fitted probability is
                // treated as exactly 0 or 1 with the weight held at the clamp
                // level, so saturated observations stop moving the fit.
                const double pi = sigmoid(eta[i]);
                if (pi < kProbClamp) {
                    phat[i] = 0.0;
                    v[i] = kProbClamp * (1.0 - kProbClamp);
                } else if (pi > 1.0 - kProbClamp) {
                    phat[i] = 1.0;
                    v[i] = kProbClamp * (1.0 - kProbClamp);
                } else {
                    phat[i] = pi;
                    v[i] = pi * (1.0 - pi);
                }
                z[i] = eta[i] + (data.y[i] - phat[i]) / v[i];
            }
            ws.set_weights(v);
            ws.beta = beta;
            ws.intercept = intercept;
            ws.set_response(z);
            for (Eigen::Index j = 0; j < p; ++j) {
                thr[j] = lambda * alpha * factors.w[j];
                denom[j] = ws.xtx[j] + lambda * (1.0 - alpha) * factors.w[j];
            }
            // The outer deviance criterion governs; no KKT safeguard inside.
            ws.solve(lambda, thr, denom, alpha, -1.0, ws.passes + config.max_passes);
            beta = ws.beta;
            intercept = ws.intercept;

            if (beta.lpNorm<Eigen::Infinity>() > kSaturationNorm ||
                std::abs(intercept) > kSaturationNorm) {
                fit.saturated = true;
                break;
            }
            eta = (data.x * beta).array() + intercept;
            const double dev = 2.0 * negative_log_likelihood(Family::binomial, data.y, eta);
            if (std::abs(dev_prev - dev) < dev_tol) {
                converged = true;
                break;
            }
            dev_prev = dev;
        }
        fit.converged[static_cast<std::size_t>(li)] = converged || fit.saturated;

        fit.intercepts[li] = intercept;
        fit.betas.col(li) = beta;
        eta = (data.x * beta).array() + intercept;
        fit.objective[li] = negative_log_likelihood(Family::binomial, data.y, eta) +
                            penalty_value(beta, factors, lambda, alpha);
        if (fit.saturated) {
            for (Eigen::Index rest = li + 1; rest < m; ++rest) {
                fit.intercepts[rest] = intercept;
                fit.betas.col(rest) = beta;
                fit.objective[rest] =
                    negative_log_likelihood(Family::binomial, data.y, eta) +
                    penalty_value(beta, factors, lambda_seq.values[rest], alpha);
            }
            break;
        }
    }
    fit.n_passes = ws.passes;
    return fit;
}

ElnetFit fit_path_any(const Dataset& data, const PenaltyFactors& factors,
                      const SolverConfig& config, const LambdaSequence& lambda_seq,
                      const std::optional<WarmStart>& warm) {
    return data.family == Family::binomial
               ? fit_path_binomial(data, factors, config, lambda_seq, warm)
               : fit_path(data, factors, config, lambda_seq, warm);
}

VectorXd kkt_violation(const ElnetFit& fit, const Dataset& data,
                       const PenaltyFactors& factors, double alpha) {
    validate_penalty_factors(factors, data.x.cols());
    if (fit.betas.rows() != data.x.cols()) {
        throw DataError("kkt_violation: fit and data dimensions differ");
    }
    const Eigen::Index m = fit.path_length();
    VectorXd out(m);
    for (Eigen::Index li = 0; li < m; ++li) {
        const double lambda = fit.lambda_seq.values[li];
        VectorXd eta = (data.x * fit.betas.col(li)).array() + fit.intercepts[li];
        VectorXd r;
        if (fit.family == Family::gaussian) {
            r = data.y - eta;
        } else {
            r.resize(eta.size());
            for (Eigen::Index i = 0; i < eta.size(); ++i) r[i] = data.y[i] - sigmoid(eta[i]);
        }
        double worst = 0.0;
        for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
            const double g = data.x.col(j).dot(r);
            const double lw = lambda * factors.w[j];
            const double b = fit.betas(j, li);
            double v;
            if (b != 0.0) {
                const double sign = b > 0.0 ? 1.0 : -1.0;
                v = std::abs(g - lw * (1.0 - alpha) * b - lw * alpha * sign);
            } else {
                v = std::max(0.0, std::abs(g) - lw * alpha);
            }
            worst = std::max(worst, v);
        }
        out[li] = worst;
    }
    return out;
}

PredictResult predict(const ElnetFit& fit, const MatrixXd& x_new, Eigen::Index lambda_index) {
    if (x_new.cols() != fit.betas.rows()) {
        std::ostringstream msg;
        msg << "predict: x_new has " << x_new.cols() << " columns, fit has "
            << fit.betas.rows() << " features";
        throw DataError(msg.str());
    }
    if (lambda_index < 0 || lambda_index >= fit.path_length()) {
        throw DataError("predict: lambda index out of range");
    }
    PredictResult out;
    out.lambda_index = lambda_index;
    out.lambda = fit.lambda_seq.values[lambda_index];
    out.eta = (x_new * fit.betas.col(lambda_index)).array() + fit.intercepts[lambda_index];
    if (fit.family == Family::binomial) {
        out.prob.resize(out.eta.size());
        for (Eigen::Index i = 0; i < out.eta.size(); ++i) out.prob[i] = sigmoid(out.eta[i]);
    }
    return out;
}

PredictResult predict(const ElnetFit& fit, const MatrixXd& x_new, double lambda_value) {
    Eigen::Index best = -1;
    double best_diff = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < fit.path_length(); ++i) {
        const double diff = std::abs(fit.lambda_seq.values[i] - lambda_value);
        if (diff < best_diff) {
            best_diff = diff;
            best = i;
        }
    }
    if (best < 0 || best_diff > 1e-9 * std::max(1.0, std::abs(lambda_value))) {
        throw DataError("predict: lambda value " + std::to_string(lambda_value) +
                        " is not on the fitted path");
    }
    return predict(fit, x_new, best);
}

MatrixXd predict_path_eta(const ElnetFit& fit, const MatrixXd& x_new) {
    MatrixXd eta = x_new * fit.betas;
    eta.rowwise() += fit.intercepts.transpose();
    return eta;
}

}  // namespace fwelnet
