#include "fwelnet/group_bridge.hpp"

#include <cmath>

namespace fwelnet {

GroupStructure make_group_structure(const std::vector<int>& group_of) {
    if (group_of.empty()) throw DataError("empty group assignment");
    int max_group = -1;
    for (int g : group_of) {
        if (g < 0) throw DataError("group labels must be nonnegative");
        max_group = std::max(max_group, g);
    }
    GroupStructure groups;
    groups.group_of = group_of;
    groups.sizes.assign(static_cast<std::size_t>(max_group + 1), 0);
    for (int g : group_of) ++groups.sizes[static_cast<std::size_t>(g)];
    for (std::size_t k = 0; k < groups.sizes.size(); ++k) {
        if (groups.sizes[k] == 0) {
            throw DataError("group " + std::to_string(k) + " is empty; labels must be exhaustive");
        }
    }
    return groups;
}

FeatureInfo grouped_indicator_z(const GroupStructure& groups) {
    const Eigen::Index p = groups.n_features();
    const int k = groups.n_groups();
    FeatureInfo zmat;
    zmat.z = MatrixXd::Zero(p, k);
    for (Eigen::Index j = 0; j < p; ++j) {
        zmat.z(j, groups.group_of[static_cast<std::size_t>(j)]) = 1.0;
    }
    return zmat;
}

VectorXd group_penalty_terms(const VectorXd& beta, const GroupStructure& groups,
                             double alpha) {
    if (beta.size() != groups.n_features()) {
        throw DataError("coefficient length does not match group structure");
    }
    VectorXd terms = VectorXd::Zero(groups.n_groups());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double b = beta[j];
        terms[groups.group_of[static_cast<std::size_t>(j)]] +=
            alpha * std::abs(b) + 0.5 * (1.0 - alpha) * b * b;
    }
    return terms;
}

GroupWeights optimal_group_weights(const VectorXd& beta, const GroupStructure& groups,
                                   double alpha) {
    const int k = groups.n_groups();
    const VectorXd u = group_penalty_terms(beta, groups, alpha);
    VectorXd a(k);
    for (int g = 0; g < k; ++g) {
        a[g] = std::sqrt(u[g] / static_cast<double>(groups.sizes[static_cast<std::size_t>(g)]));
    }
    double norm = 0.0;
    for (int g = 0; g < k; ++g) {
        norm += static_cast<double>(groups.sizes[static_cast<std::size_t>(g)]) * a[g];
    }
    GroupWeights weights;
    if (norm <= 0.0) {
        // beta = 0 makes the formula 0/0; the continuous limit is uniform.
        weights.v = VectorXd::Constant(k, 1.0 / static_cast<double>(groups.n_features()));
        return weights;
    }
    weights.v = a / norm;
    return weights;
}

double weighted_group_penalty(const VectorXd& beta, const GroupStructure& groups,
                              double alpha, double lambda, const GroupWeights& v) {
    if (v.v.size() != groups.n_groups()) {
        throw DataError("group weight length does not match group count");
    }
    const VectorXd u = group_penalty_terms(beta, groups, alpha);
    double total = 0.0;
    for (int g = 0; g < groups.n_groups(); ++g) {
        if (u[g] == 0.0) continue;  // zero numerator contributes nothing even at v = 0
        total += u[g] / v.v[g];
    }
    return lambda / static_cast<double>(groups.n_features()) * total;
}

EquivalenceCheck penalty_equivalence_check(const VectorXd& beta, const GroupStructure& groups,
                                           double alpha, double lambda) {
    const VectorXd u = group_penalty_terms(beta, groups, alpha);
    const GroupWeights v = optimal_group_weights(beta, groups, alpha);
    EquivalenceCheck check;
    check.lhs = weighted_group_penalty(beta, groups, alpha, lambda, v);
    double root_sum = 0.0;
    for (int g = 0; g < groups.n_groups(); ++g) {
        root_sum += std::sqrt(static_cast<double>(groups.sizes[static_cast<std::size_t>(g)]) * u[g]);
    }
    check.rhs = lambda / static_cast<double>(groups.n_features()) * root_sum * root_sum;
    check.gap = check.lhs - check.rhs;
    return check;
}

}  // namespace fwelnet
