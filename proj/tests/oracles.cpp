#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace fwelnet::oracle {

namespace {

double penalty_term(const VectorXd& w, double alpha, double lambda, const VectorXd& beta) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        total += w[j] * (alpha * std::abs(beta[j]) + 0.5 * (1.0 - alpha) * beta[j] * beta[j]);
    }
    return lambda * total;
}

double soft(double u, double t) {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

}  // namespace

double elnet_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                       double alpha, double lambda, const VectorXd& beta) {
    return 0.5 * (y - x * beta).squaredNorm() + penalty_term(w, alpha, lambda, beta);
}

VectorXd prox_grad_elnet(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                         double alpha, double lambda, double tol, int max_iter,
                         const VectorXd* warm) {
    const Eigen::Index p = x.cols();
    // Gram form keeps the per-iteration cost at O(p^2).
    const MatrixXd gram = x.transpose() * x;
    const VectorXd xty = x.transpose() * y;
    const double y_sq = y.squaredNorm();

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const double lip = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
    const double step = 1.0 / lip;

    auto objective = [&](const VectorXd& b) {
        return 0.5 * (y_sq - 2.0 * xty.dot(b) + b.dot(gram * b)) +
               penalty_term(w, alpha, lambda, b);
    };

    VectorXd beta = warm ? *warm : VectorXd::Zero(p);
    VectorXd point = beta;
    VectorXd grad(p), next(p), best = beta;
    double t_mom = 1.0;
    double obj = objective(beta);
    double best_obj = obj;
    // Stop when the best objective seen stops improving for a whole window;
    // robust to the oscillation FISTA shows near the optimum.
    int since_improvement = 0;
    constexpr int kWindow = 200;

    for (int iter = 0; iter < max_iter; ++iter) {
        grad.noalias() = gram * point;
        grad -= xty;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double v = point[j] - step * grad[j];
            next[j] = soft(v, step * lambda * alpha * w[j]) /
                      (1.0 + step * lambda * (1.0 - alpha) * w[j]);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
        point = next + ((t_mom - 1.0) / t_next) * (next - beta);
        beta = next;
        t_mom = t_next;

        const double prev = obj;
        obj = objective(beta);
        if (obj > prev) {  // restart momentum
            point = beta;
            t_mom = 1.0;
        }
        if (obj < best_obj - tol * (1.0 + std::abs(best_obj))) {
            best_obj = obj;
            best = beta;
            since_improvement = 0;
        } else {
            if (obj < best_obj) {
                best_obj = obj;
                best = beta;
            }
            if (++since_improvement >= kWindow) break;
        }
    }
    return best;
}

LogisticSolution prox_grad_logistic(const MatrixXd& x, const VectorXd& y, const VectorXd& w,
                                    double alpha, double lambda, double tol, int max_iter) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(design.transpose() * design);
    const double lip = 0.25 * std::max(eig.eigenvalues().maxCoeff(), 1e-12);
    const double step = 1.0 / lip;

    auto nll = [&](const VectorXd& coef) {
        double total = 0.0;
        const VectorXd eta = design * coef;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = eta[i];
            const double lse = e > 33.3 ? e : (e < -37.0 ? std::exp(e) : std::log1p(std::exp(e)));
            total += lse - y[i] * e;
        }
        return total;
    };
    auto objective = [&](const VectorXd& coef) {
        return nll(coef) + penalty_term(w, alpha, lambda, coef.tail(p));
    };

    VectorXd coef = VectorXd::Zero(p + 1);
    VectorXd point = coef, best = coef;
    VectorXd resid(n), next(p + 1);
    double t_mom = 1.0;
    double obj = objective(coef);
    double best_obj = obj;
    int since_improvement = 0;
    constexpr int kWindow = 200;

    for (int iter = 0; iter < max_iter; ++iter) {
        const VectorXd eta = design * point;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = eta[i];
            const double prob = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e))
                                         : std::exp(e) / (1.0 + std::exp(e));
            resid[i] = prob - y[i];
        }
        const VectorXd grad = design.transpose() * resid;
        next[0] = point[0] - step * grad[0];  // intercept unpenalized
        for (Eigen::Index j = 0; j < p; ++j) {
            const double v = point[j + 1] - step * grad[j + 1];
            next[j + 1] = soft(v, step * lambda * alpha * w[j]) /
                          (1.0 + step * lambda * (1.0 - alpha) * w[j]);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
        point = next + ((t_mom - 1.0) / t_next) * (next - coef);
        coef = next;
        t_mom = t_next;

        const double prev = obj;
        obj = objective(coef);
        if (obj > prev) {
            point = coef;
            t_mom = 1.0;
        }
        if (obj < best_obj - tol * (1.0 + std::abs(best_obj))) {
            best_obj = obj;
            best = coef;
            since_improvement = 0;
        } else {
            if (obj < best_obj) {
                best_obj = obj;
                best = coef;
            }
            if (++since_improvement >= kWindow) break;
        }
    }

    LogisticSolution sol;
    sol.intercept = best[0];
    sol.beta = best.tail(p);
    sol.objective = objective(best);
    sol.deviance = 2.0 * nll(best);
    return sol;
}

double penalty_from_scores(const MatrixXd& z, const VectorXd& theta, const VectorXd& beta,
                           double lambda, double alpha) {
    const Eigen::Index p = z.rows();
    const VectorXd scores = z * theta;
    const double shift = scores.maxCoeff();
    double denom_sum = 0.0;
    for (Eigen::Index l = 0; l < p; ++l) denom_sum += std::exp(scores[l] - shift);
    double total = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double w = denom_sum / (static_cast<double>(p) * std::exp(scores[j] - shift));
        total += w * (alpha * std::abs(beta[j]) + 0.5 * (1.0 - alpha) * beta[j] * beta[j]);
    }
    return lambda * total;
}

VectorXd fd_theta_gradient(const MatrixXd& z, const VectorXd& theta, const VectorXd& beta,
                           double lambda, double alpha, double step) {
    VectorXd grad(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        VectorXd up = theta, down = theta;
        up[k] += step;
        down[k] -= step;
        grad[k] = (penalty_from_scores(z, up, beta, lambda, alpha) -
                   penalty_from_scores(z, down, beta, lambda, alpha)) /
                  (2.0 * step);
    }
    return grad;
}

}  // namespace fwelnet::oracle
