#pragma once

#include "fwelnet/types.hpp"

namespace fwelnet {

/// Non-overlapping, exhaustive feature grouping.
struct GroupStructure {
    std::vector<int> group_of;  // length p, values in [0, K)
    std::vector<int> sizes;     // length K, sizes[k] >= 1, sum = p

    int n_groups() const { return static_cast<int>(sizes.size()); }
    Eigen::Index n_features() const { return static_cast<Eigen::Index>(group_of.size()); }
};

GroupStructure make_group_structure(const std::vector<int>& group_of);

/// Per-group weights v_k >= 0 normalized so sum_k p_k v_k = 1.
struct GroupWeights {
    VectorXd v;
};

/// Indicator side-information: z_jk = 1 iff feature j is in group k.
FeatureInfo grouped_indicator_z(const GroupStructure& groups);

/// Per-group elastic-net penalty mass:
///   u_k = alpha ||beta^(k)||_1 + (1-alpha)/2 ||beta^(k)||_2^2.
VectorXd group_penalty_terms(const VectorXd& beta, const GroupStructure& groups,
                             double alpha);

/// Closed-form minimizing weights v_k = a_k / sum_l p_l a_l with
/// a_k = sqrt(u_k / p_k). All-zero beta yields uniform v_k = 1/p.
GroupWeights optimal_group_weights(const VectorXd& beta, const GroupStructure& groups,
                                   double alpha);

/// Weighted penalty (lambda/p) * sum_k u_k / v_k at arbitrary feasible v.
/// Groups with u_k = 0 contribute nothing even when v_k = 0.
double weighted_group_penalty(const VectorXd& beta, const GroupStructure& groups,
                              double alpha, double lambda, const GroupWeights& v);

struct EquivalenceCheck {
    double lhs = 0.0;  // weighted penalty at the optimal v
    double rhs = 0.0;  // (lambda/p) * (sum_k sqrt(p_k u_k))^2
    double gap = 0.0;  // lhs - rhs; zero at the optimal v, >= 0 elsewhere
};

/// Certificate for the Cauchy-Schwarz lower bound linking the score-based
/// penalty with the group penalty: at the optimal weights the bound is tight.
EquivalenceCheck penalty_equivalence_check(const VectorXd& beta,
                                           const GroupStructure& groups,
                                           double alpha, double lambda);

}  // namespace fwelnet
