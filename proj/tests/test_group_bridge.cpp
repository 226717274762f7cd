#include "fwelnet/group_bridge.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace fwelnet;

namespace {

GroupStructure random_groups(Rng& rng, Eigen::Index p, int k) {
    std::vector<int> group_of(static_cast<std::size_t>(p));
    // Guarantee every group nonempty, then assign the rest at random.
    for (int g = 0; g < k; ++g) group_of[static_cast<std::size_t>(g)] = g;
    for (Eigen::Index j = k; j < p; ++j) {
        group_of[static_cast<std::size_t>(j)] = static_cast<int>(rng.below(k));
    }
    return make_group_structure(group_of);
}

VectorXd random_simplex_weights(Rng& rng, const GroupStructure& groups) {
    // Feasible v: positive with sum_k p_k v_k = 1.
    VectorXd v(groups.n_groups());
    double norm = 0.0;
    for (int g = 0; g < groups.n_groups(); ++g) {
        v[g] = 0.05 + rng.uniform();
        norm += groups.sizes[static_cast<std::size_t>(g)] * v[g];
    }
    return v / norm;
}

}  // namespace

TEST_CASE("grouped indicator matrix") {
    SUBCASE("two singleton groups give the identity") {
        const GroupStructure groups = make_group_structure({0, 1});
        const FeatureInfo z = grouped_indicator_z(groups);
        CHECK(z.z.rows() == 2);
        CHECK(z.z.cols() == 2);
        CHECK(z.z(0, 0) == 1.0);
        CHECK(z.z(1, 1) == 1.0);
        CHECK(z.z(0, 1) == 0.0);
        CHECK(z.z(1, 0) == 0.0);
    }
    SUBCASE("one group of p features is a column of ones") {
        const GroupStructure groups = make_group_structure({0, 0, 0, 0});
        const FeatureInfo z = grouped_indicator_z(groups);
        CHECK(z.z.cols() == 1);
        CHECK(z.z.col(0).minCoeff() == 1.0);
    }
    SUBCASE("row sums are always one") {
        Rng rng(7);
        const GroupStructure groups = random_groups(rng, 23, 5);
        const FeatureInfo z = grouped_indicator_z(groups);
        for (Eigen::Index j = 0; j < 23; ++j) {
            CHECK(z.z.row(j).sum() == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("optimal group weights: hand-evaluated case") {
    // alpha = 1, sizes (2, 1), beta groups (1,1) and (4):
    //   a = (sqrt(2/2), sqrt(4/1)) = (1, 2), sum p_l a_l = 4, v = (1/4, 1/2).
    const GroupStructure groups = make_group_structure({0, 0, 1});
    VectorXd beta(3);
    beta << 1.0, 1.0, 4.0;
    const GroupWeights v = optimal_group_weights(beta, groups, 1.0);
    CHECK(v.v[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(v.v[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("optimal group weights: single group and degenerate beta") {
    const GroupStructure one = make_group_structure({0, 0, 0, 0, 0});
    VectorXd beta(5);
    beta << 1, -2, 3, 0, 1;
    const GroupWeights v = optimal_group_weights(beta, one, 0.5);
    CHECK(v.v[0] == doctest::Approx(1.0 / 5.0).epsilon(1e-14));

    const GroupStructure two = make_group_structure({0, 0, 1, 1, 1});
    const GroupWeights uniform = optimal_group_weights(VectorXd::Zero(5), two, 1.0);
    CHECK(uniform.v[0] == doctest::Approx(0.2));
    CHECK(uniform.v[1] == doctest::Approx(0.2));
    // normalization survives the degenerate case
    CHECK(2 * uniform.v[0] + 3 * uniform.v[1] == doctest::Approx(1.0));
}

TEST_CASE("normalization invariant sum_k p_k v_k = 1") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index p = 5 + static_cast<Eigen::Index>(rng.below(20));
        const int k = 2 + static_cast<int>(rng.below(4));
        const GroupStructure groups = random_groups(rng, p, k);
        const VectorXd beta = testing::random_vector(rng, p);
        const GroupWeights v = optimal_group_weights(beta, groups, rng.uniform());
        double total = 0.0;
        for (int g = 0; g < k; ++g) total += groups.sizes[static_cast<std::size_t>(g)] * v.v[g];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("equivalence gap vanishes at the optimal weights") {
    Rng rng(13);
    for (double alpha : {0.0, 0.5, 1.0}) {
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::Index p = 6 + static_cast<Eigen::Index>(rng.below(15));
            const int k = 2 + static_cast<int>(rng.below(4));
            const GroupStructure groups = random_groups(rng, p, k);
            const VectorXd beta = testing::random_vector(rng, p);
            const double lambda = 0.5 + 2.0 * rng.uniform();
            const EquivalenceCheck check =
                penalty_equivalence_check(beta, groups, alpha, lambda);
            CHECK(std::abs(check.gap) <= 1e-12 * std::max(1.0, check.rhs));
        }
    }
}

TEST_CASE("random feasible weights never beat the Cauchy-Schwarz bound") {
    Rng rng(17);
    const GroupStructure groups = random_groups(rng, 18, 4);
    for (double alpha : {0.0, 0.5, 1.0}) {
        const VectorXd beta = testing::random_vector(rng, 18);
        const double lambda = 1.7;
        const EquivalenceCheck at_optimum =
            penalty_equivalence_check(beta, groups, alpha, lambda);
        for (int rep = 0; rep < 200; ++rep) {
            GroupWeights v{random_simplex_weights(rng, groups)};
            const double lhs = weighted_group_penalty(beta, groups, alpha, lambda, v);
            CHECK(lhs - at_optimum.rhs >= -1e-12 * std::max(1.0, at_optimum.rhs));
        }
    }
}

TEST_CASE("alpha endpoints collapse to the known group penalties") {
    Rng rng(19);
    const GroupStructure groups = random_groups(rng, 12, 3);
    const VectorXd beta = testing::random_vector(rng, 12);

    // Per-group rhs terms at alpha = 0 are proportional to sqrt(p_k)*||b_k||_2,
    // and at alpha = 1 to sqrt(p_k * ||b_k||_1).
    VectorXd l1 = VectorXd::Zero(3), l2sq = VectorXd::Zero(3);
    for (Eigen::Index j = 0; j < 12; ++j) {
        const int g = groups.group_of[static_cast<std::size_t>(j)];
        l1[g] += std::abs(beta[j]);
        l2sq[g] += beta[j] * beta[j];
    }

    const VectorXd u0 = group_penalty_terms(beta, groups, 0.0);
    const VectorXd u1 = group_penalty_terms(beta, groups, 1.0);
    for (int g = 0; g < 3; ++g) {
        const double pk = groups.sizes[static_cast<std::size_t>(g)];
        const double term0 = std::sqrt(pk * u0[g]);
        const double expected0 = std::sqrt(pk / 2.0) * std::sqrt(l2sq[g]);
        CHECK(term0 == doctest::Approx(expected0).epsilon(1e-12));
        const double term1 = std::sqrt(pk * u1[g]);
        const double expected1 = std::sqrt(pk * l1[g]);
        CHECK(term1 == doctest::Approx(expected1).epsilon(1e-12));
    }

    // alpha = 0, single group: rhs is proportional to the squared l2 norm.
    const GroupStructure one = make_group_structure(std::vector<int>(12, 0));
    const EquivalenceCheck check = penalty_equivalence_check(beta, one, 0.0, 2.0);
    CHECK(check.rhs ==
          doctest::Approx(2.0 / 12.0 * 12.0 * 0.5 * beta.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("group structure validation") {
    CHECK_THROWS_AS(make_group_structure({0, 2}), DataError);  // group 1 empty
    CHECK_THROWS_AS(make_group_structure({-1, 0}), DataError);
    const GroupStructure g = make_group_structure({0, 1, 0, 1, 1});
    CHECK(g.sizes[0] == 2);
    CHECK(g.sizes[1] == 3);
}
