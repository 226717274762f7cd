#include "fwelnet/fwelnet.hpp"

#include "fwelnet/data_model.hpp"

#include <algorithm>
#include <cmath>

namespace fwelnet {

namespace {

constexpr double kExpFloor = -690.0;  // keeps exp() away from underflow

// Scores shifted by their max, exponentiated with an underflow floor.
struct SoftmaxTerms {
    VectorXd exp_shifted;  // e_j = exp(s_j - max s)
    double total = 0.0;    // sum_j e_j
};

SoftmaxTerms softmax_terms(const VectorXd& scores) {
    SoftmaxTerms t;
    const double shift = scores.maxCoeff();
    t.exp_shifted.resize(scores.size());
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
        t.exp_shifted[j] = std::exp(std::max(scores[j] - shift, kExpFloor));
    }
    t.total = t.exp_shifted.sum();
    return t;
}

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
}

double aggregate_values(const std::vector<double>& values, Aggregate mode) {
    if (mode == Aggregate::mean) {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    return median_of(values);
}

}  // namespace

VectorXd feature_scores(const FeatureInfo& zmat, const ThetaVector& theta) {
    if (zmat.z.cols() != theta.size()) {
        throw DataError("theta length " + std::to_string(theta.size()) +
                        " does not match feature-information columns " +
                        std::to_string(zmat.z.cols()));
    }
    return zmat.z * theta;
}

PenaltyFactors penalty_weights(const FeatureInfo& zmat, const ThetaVector& theta) {
    const VectorXd scores = feature_scores(zmat, theta);
    const Eigen::Index p = scores.size();
    const SoftmaxTerms t = softmax_terms(scores);
    PenaltyFactors factors;
    factors.w.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        factors.w[j] = t.total / (static_cast<double>(p) * t.exp_shifted[j]);
    }
    return factors;
}

ThetaVector theta_gradient(const FeatureInfo& zmat, const ThetaVector& theta,
                           const VectorXd& beta, double lambda, double alpha) {
    const VectorXd scores = feature_scores(zmat, theta);
    const Eigen::Index p = zmat.z.rows();
    const Eigen::Index k_sources = zmat.z.cols();
    if (beta.size() != p) throw DataError("theta_gradient: beta length does not match Z rows");

    const SoftmaxTerms t = softmax_terms(scores);
    VectorXd cw(p);  // C_j(beta) * w_j(theta)
    for (Eigen::Index j = 0; j < p; ++j) {
        const double b = beta[j];
        const double c = alpha * std::abs(b) + 0.5 * (1.0 - alpha) * b * b;
        cw[j] = c * t.total / (static_cast<double>(p) * t.exp_shifted[j]);
    }

    ThetaVector grad = ThetaVector::Zero(k_sources);
    for (Eigen::Index k = 0; k < k_sources; ++k) {
        const auto col = zmat.z.col(k);
        // Shift invariance makes a constant column's component identically 0.
        if (col.maxCoeff() == col.minCoeff()) continue;
        // Work with the centered column; the gradient is invariant to column
        // shifts and centering avoids cancellation around a large mean.
        const double col_mean = col.mean();
        double zbar = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) zbar += (col[j] - col_mean) * t.exp_shifted[j];
        zbar /= t.total;
        double g = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) g += cw[j] * (zbar - (col[j] - col_mean));
        grad[k] = lambda * g;
    }
    return grad;
}

ThetaVector aggregate_gradient(const std::vector<ThetaVector>& per_lambda_grads,
                               Aggregate mode) {
    if (per_lambda_grads.empty()) throw DataError("aggregate_gradient: empty gradient list");
    const Eigen::Index k = per_lambda_grads.front().size();
    for (const auto& g : per_lambda_grads) {
        if (g.size() != k) throw DataError("aggregate_gradient: gradient lengths differ");
    }
    ThetaVector out(k);
    std::vector<double> column(per_lambda_grads.size());
    for (Eigen::Index c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < per_lambda_grads.size(); ++i) column[i] = per_lambda_grads[i][c];
        out[c] = aggregate_values(column, mode);
    }
    return out;
}

BacktrackResult backtracking_step(
    const ThetaVector& theta, const ThetaVector& delta,
    const std::function<double(const ThetaVector&)>& eval_aggregate_objective) {
    BacktrackResult result;
    result.theta = theta;
    result.objective = eval_aggregate_objective(theta);
    double eta = 1.0;
    for (int halvings = 0; halvings <= 20; ++halvings) {
        ThetaVector candidate = theta - eta * delta;
        const double value = eval_aggregate_objective(candidate);
        if (value < result.objective) {
            result.theta = std::move(candidate);
            result.eta = eta;
            result.accepted = true;
            result.objective = value;
            return result;
        }
        eta *= 0.5;
    }
    return result;  // no strict decrease found; theta unchanged
}

namespace {

struct PathState {
    ElnetFit fit;
    std::vector<double> losses;  // data term per lambda, independent of theta
};

std::vector<double> path_losses(const Dataset& data, const ElnetFit& fit) {
    std::vector<double> losses(static_cast<std::size_t>(fit.path_length()));
    for (Eigen::Index i = 0; i < fit.path_length(); ++i) {
        VectorXd eta = (data.x * fit.betas.col(i)).array() + fit.intercepts[i];
        losses[static_cast<std::size_t>(i)] =
            negative_log_likelihood(data.family, data.y, eta);
    }
    return losses;
}

// Aggregate over the path of loss_i + lambda_i * sum_j w_j(theta) C_j(beta_i).
double aggregate_objective(const PathState& state, const FeatureInfo& zmat,
                           const ThetaVector& theta, double alpha, Aggregate mode) {
    const PenaltyFactors w = penalty_weights(zmat, theta);
    const Eigen::Index m = state.fit.path_length();
    std::vector<double> values(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        values[static_cast<std::size_t>(i)] =
            state.losses[static_cast<std::size_t>(i)] +
            penalty_value(state.fit.betas.col(i), w, state.fit.lambda_seq.values[i], alpha);
    }
    return aggregate_values(values, mode);
}

FwelnetModel fwelnet_fit_impl(const Dataset& data, const FeatureInfo& zmat,
                              const FwelnetConfig& config,
                              const LambdaSequence* lambda_override) {
    validate_dataset(data);
    validate_feature_info(zmat, data.x.cols());
    if (config.n_iter < 0) throw DataError("n_iter must be nonnegative");
    const Eigen::Index p = data.x.cols();

    SolverConfig solver = config.solver;
    solver.alpha = config.alpha;
    solver.family = data.family;

    const PenaltyFactors ones = PenaltyFactors::ones(p);
    LambdaSequence seq;
    if (lambda_override) {
        seq = *lambda_override;
        validate_lambda_sequence(seq);
    } else {
        const VectorXd y_work = data.y.array() - data.y.mean();
        seq = make_lambda_sequence(data.x, y_work, ones, config.alpha, config.n_lambda,
                                   config.lambda_min_ratio);
    }

    FwelnetModel model;
    model.alpha = config.alpha;
    model.n_iter = config.n_iter;
    model.aggregate = config.aggregate;
    model.theta = ThetaVector::Zero(zmat.z.cols());
    model.weights = ones;

    PathState state;
    state.fit = fit_path_any(data, ones, solver, seq);
    state.losses = path_losses(data, state.fit);
    model.history.push_back(
        aggregate_objective(state, zmat, model.theta, config.alpha, config.aggregate));

    const Eigen::Index m = state.fit.path_length();
    for (int iter = 0; iter < config.n_iter; ++iter) {
        std::vector<ThetaVector> grads;
        grads.reserve(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) {
            grads.push_back(theta_gradient(zmat, model.theta, state.fit.betas.col(i),
                                           seq.values[i], config.alpha));
        }
        const ThetaVector delta = aggregate_gradient(grads, config.aggregate);
        auto objective_at = [&](const ThetaVector& candidate) {
            return aggregate_objective(state, zmat, candidate, config.alpha, config.aggregate);
        };
        const BacktrackResult step = backtracking_step(model.theta, delta, objective_at);
        if (!step.accepted) break;

        model.theta = step.theta;
        PenaltyFactors weights = penalty_weights(zmat, model.theta);
        WarmStart warm{state.fit.betas.col(0), state.fit.intercepts[0]};
        state.fit = fit_path_any(data, weights, solver, seq, warm);
        state.losses = path_losses(data, state.fit);
        model.weights = std::move(weights);
        model.history.push_back(
            aggregate_objective(state, zmat, model.theta, config.alpha, config.aggregate));
        ++model.accepted_iterations;
    }

    model.fit = std::move(state.fit);
    return model;
}

}  // namespace

FwelnetModel fwelnet_fit(const Dataset& data, const FeatureInfo& zmat,
                         const FwelnetConfig& config, const LambdaSequence* lambda_override) {
    if (data.family != Family::gaussian) {
        throw DataError("fwelnet_fit expects the Gaussian family; use fwelnet_fit_glm");
    }
    return fwelnet_fit_impl(data, zmat, config, lambda_override);
}

FwelnetModel fwelnet_fit_glm(const Dataset& data, const FeatureInfo& zmat,
                             const FwelnetConfig& config, const LambdaSequence* lambda_override) {
    if (data.family != Family::binomial) {
        throw DataError("fwelnet_fit_glm expects the binomial family");
    }
    return fwelnet_fit_impl(data, zmat, config, lambda_override);
}

FwelnetModel fwelnet_fit_any(const Dataset& data, const FeatureInfo& zmat,
                             const FwelnetConfig& config, const LambdaSequence* lambda_override) {
    return fwelnet_fit_impl(data, zmat, config, lambda_override);
}

PerLambdaResult fwelnet_fit_per_lambda(const Dataset& data, const FeatureInfo& zmat,
                                       const FwelnetConfig& config,
                                       const LambdaSequence* lambda_override) {
    validate_dataset(data);
    validate_feature_info(zmat, data.x.cols());
    const Eigen::Index p = data.x.cols();

    SolverConfig solver = config.solver;
    solver.alpha = config.alpha;
    solver.family = data.family;

    const PenaltyFactors ones = PenaltyFactors::ones(p);
    LambdaSequence seq;
    if (lambda_override) {
        seq = *lambda_override;
        validate_lambda_sequence(seq);
    } else {
        const VectorXd y_work = data.y.array() - data.y.mean();
        seq = make_lambda_sequence(data.x, y_work, ones, config.alpha, config.n_lambda,
                                   config.lambda_min_ratio);
    }

    const ElnetFit init = fit_path_any(data, ones, solver, seq);
    const Eigen::Index m = seq.values.size();

    PerLambdaResult result;
    result.lambda_seq = seq;
    result.betas.resize(p, m);
    result.intercepts.resize(m);
    result.thetas.resize(static_cast<std::size_t>(m));
    result.iterations.assign(static_cast<std::size_t>(m), 0);

    constexpr int kMaxAlternations = 50;
    constexpr double kRelChange = 1e-6;

    for (Eigen::Index i = 0; i < m; ++i) {
        LambdaSequence single;
        single.values = VectorXd::Constant(1, seq.values[i]);
        single.n_lambda = 1;
        single.min_ratio = seq.min_ratio;

        ThetaVector theta = ThetaVector::Zero(zmat.z.cols());
        VectorXd beta = init.betas.col(i);
        double intercept = init.intercepts[i];
        VectorXd eta = (data.x * beta).array() + intercept;
        double loss = negative_log_likelihood(data.family, data.y, eta);
        double objective =
            loss + penalty_value(beta, penalty_weights(zmat, theta), seq.values[i], config.alpha);

        for (int iter = 0; iter < kMaxAlternations; ++iter) {
            const ThetaVector grad =
                theta_gradient(zmat, theta, beta, seq.values[i], config.alpha);
            auto objective_at = [&](const ThetaVector& candidate) {
                return loss + penalty_value(beta, penalty_weights(zmat, candidate),
                                            seq.values[i], config.alpha);
            };
            const BacktrackResult step = backtracking_step(theta, grad, objective_at);
            if (!step.accepted) break;
            theta = step.theta;

            const PenaltyFactors weights = penalty_weights(zmat, theta);
            WarmStart warm{beta, intercept};
            const ElnetFit refit = fit_path_any(data, weights, solver, single, warm);
            beta = refit.betas.col(0);
            intercept = refit.intercepts[0];
            eta = (data.x * beta).array() + intercept;
            loss = negative_log_likelihood(data.family, data.y, eta);
            const double new_objective =
                loss + penalty_value(beta, weights, seq.values[i], config.alpha);
            ++result.iterations[static_cast<std::size_t>(i)];
            const bool settled =
                objective - new_objective < kRelChange * (1.0 + std::abs(new_objective));
            objective = new_objective;
            if (settled) break;
        }
        result.thetas[static_cast<std::size_t>(i)] = theta;
        result.betas.col(i) = beta;
        result.intercepts[i] = intercept;
    }
    return result;
}

}  // namespace fwelnet
