#include "fwelnet/data_model.hpp"

#include <cmath>
#include <sstream>

namespace fwelnet {

void validate_dataset(const Dataset& data) {
    const Eigen::Index n = data.x.rows();
    const Eigen::Index p = data.x.cols();
    if (n < 2) throw DataError("dataset needs at least 2 observations, got " + std::to_string(n));
    if (p < 1) throw DataError("dataset needs at least 1 feature, got " + std::to_string(p));
    if (data.y.size() != n) {
        std::ostringstream msg;
        msg << "x has " << n << " rows but y has " << data.y.size() << " entries";
        throw DataError(msg.str());
    }
    if (!data.x.allFinite()) throw DataError("design matrix contains non-finite entries");
    if (!data.y.allFinite()) throw DataError("response contains non-finite entries");
    if (data.obs_group_ids && static_cast<Eigen::Index>(data.obs_group_ids->size()) != n) {
        throw DataError("obs_group_ids length does not match number of observations");
    }
    if (data.family == Family::binomial) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (data.y[i] != 0.0 && data.y[i] != 1.0) {
                std::ostringstream msg;
                msg << "binomial response must be 0/1; y[" << i << "] = " << data.y[i];
                throw DataError(msg.str());
            }
        }
    }
}

void validate_penalty_factors(const PenaltyFactors& factors, Eigen::Index p) {
    if (factors.w.size() != p) {
        throw DataError("penalty factors length " + std::to_string(factors.w.size()) +
                        " does not match feature count " + std::to_string(p));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!std::isfinite(factors.w[j]) || factors.w[j] < 0.0) {
            throw DataError("penalty factor w[" + std::to_string(j) +
                            "] must be finite and nonnegative");
        }
    }
}

void validate_lambda_sequence(const LambdaSequence& seq) {
    if (seq.values.size() == 0) throw DataError("empty lambda sequence");
    for (Eigen::Index i = 0; i < seq.values.size(); ++i) {
        if (!std::isfinite(seq.values[i]) || seq.values[i] < 0.0) {
            throw DataError("lambda values must be finite and nonnegative");
        }
        if (i > 0 && seq.values[i] >= seq.values[i - 1]) {
            throw DataError("lambda sequence must be strictly decreasing");
        }
    }
}

void validate_feature_info(const FeatureInfo& zmat, Eigen::Index p) {
    if (zmat.z.rows() != p) {
        throw DataError("feature-information matrix has " + std::to_string(zmat.z.rows()) +
                        " rows but the design has " + std::to_string(p) + " features");
    }
    if (zmat.z.cols() < 1) throw DataError("feature-information matrix needs at least one column");
    if (!zmat.z.allFinite()) throw DataError("feature-information matrix contains non-finite entries");
    if (!zmat.column_names.empty() &&
        static_cast<Eigen::Index>(zmat.column_names.size()) != zmat.z.cols()) {
        throw DataError("feature-information column names do not match column count");
    }
}

StandardizationInfo StandardizationInfo::identity(Eigen::Index p) {
    StandardizationInfo info;
    info.col_means = VectorXd::Zero(p);
    info.col_scales = VectorXd::Ones(p);
    info.y_mean = 0.0;
    info.zero_variance.assign(static_cast<std::size_t>(p), false);
    return info;
}

std::pair<Dataset, StandardizationInfo> standardize(const Dataset& data) {
    validate_dataset(data);
    const Eigen::Index n = data.x.rows();
    const Eigen::Index p = data.x.cols();

    Dataset out = data;
    StandardizationInfo info;
    info.col_means.resize(p);
    info.col_scales.resize(p);
    info.zero_variance.assign(static_cast<std::size_t>(p), false);

    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = data.x.col(j).mean();
        info.col_means[j] = mean;
        out.x.col(j).array() -= mean;
        // Scale so the centered column has squared norm n.
        const double ss = out.x.col(j).squaredNorm();
        const double scale = std::sqrt(ss / static_cast<double>(n));
        if (scale <= 0.0) {
            info.zero_variance[static_cast<std::size_t>(j)] = true;
            info.col_scales[j] = 1.0;
        } else {
            info.col_scales[j] = scale;
            out.x.col(j) /= scale;
        }
    }

    if (data.family == Family::gaussian) {
        info.y_mean = data.y.mean();
        out.y.array() -= info.y_mean;
    } else {
        info.y_mean = 0.0;
    }
    return {std::move(out), std::move(info)};
}

std::pair<VectorXd, double> destandardize(const VectorXd& beta_std, double intercept_std,
                                          const StandardizationInfo& info) {
    const Eigen::Index p = info.col_scales.size();
    if (beta_std.size() != p) {
        throw DataError("coefficient length " + std::to_string(beta_std.size()) +
                        " does not match standardization info (" + std::to_string(p) + ")");
    }
    VectorXd beta = beta_std.cwiseQuotient(info.col_scales);
    double intercept = intercept_std + info.y_mean - beta.dot(info.col_means);
    return {std::move(beta), intercept};
}

LambdaSequence make_lambda_sequence(const MatrixXd& x_std, const VectorXd& y_work,
                                    const PenaltyFactors& weights, double alpha,
                                    int n_lambda, double min_ratio) {
    const Eigen::Index p = x_std.cols();
    validate_penalty_factors(weights, p);
    if (alpha < 0.0 || alpha > 1.0) throw DataError("alpha must lie in [0, 1]");
    if (n_lambda < 1) throw DataError("n_lambda must be positive");
    if (min_ratio <= 0.0) min_ratio = default_min_ratio(x_std.rows(), p);
    if (min_ratio >= 1.0) throw DataError("lambda min ratio must lie in (0, 1)");

    // lambda_max for pure ridge is infinite; the usual surrogate keeps the
    // grid finite.
    const double alpha_eff = std::max(alpha, 0.001);
    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (weights.w[j] <= 0.0) continue;
        const double candidate = std::abs(x_std.col(j).dot(y_work)) / (alpha_eff * weights.w[j]);
        lambda_max = std::max(lambda_max, candidate);
    }

    LambdaSequence seq;
    seq.min_ratio = min_ratio;
    if (lambda_max <= 0.0) {
        seq.values = VectorXd::Zero(1);
        seq.n_lambda = 1;
        seq.degenerate = true;
        return seq;
    }

    seq.n_lambda = n_lambda;
    seq.values.resize(n_lambda);
    if (n_lambda == 1) {
        seq.values[0] = lambda_max;
        return seq;
    }
    const double log_max = std::log(lambda_max);
    const double log_min = std::log(lambda_max * min_ratio);
    for (int i = 0; i < n_lambda; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_lambda - 1);
        seq.values[i] = std::exp(log_max + t * (log_min - log_max));
    }
    seq.values[0] = lambda_max;  // exact endpoints
    seq.values[n_lambda - 1] = lambda_max * min_ratio;
    return seq;
}

}  // namespace fwelnet
