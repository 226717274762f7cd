#include "fwelnet/data_model.hpp"
#include "fwelnet/elnet.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace fwelnet;

TEST_CASE("standardize centers and rescales to squared norm n") {
    Dataset data;
    data.x.resize(3, 1);
    data.x << 1.0, 2.0, 3.0;
    data.y.resize(3);
    data.y << 1.0, 0.0, -1.0;

    auto [std_data, info] = standardize(data);
    const double root15 = std::sqrt(1.5);
    CHECK(std_data.x(0, 0) == doctest::Approx(-root15).epsilon(1e-14));
    CHECK(std_data.x(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std_data.x(2, 0) == doctest::Approx(root15).epsilon(1e-14));
    CHECK(std_data.x.col(0).squaredNorm() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(info.col_means[0] == doctest::Approx(2.0));
    CHECK(info.col_scales[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(info.y_mean == doctest::Approx(0.0));
    CHECK_FALSE(info.zero_variance[0]);
}

TEST_CASE("standardize leaves an already-standardized column unchanged") {
    Dataset data;
    data.x.resize(4, 1);
    data.x << 1.0, -1.0, 1.0, -1.0;  // mean 0, squared norm 4 = n
    data.y = VectorXd::Zero(4);

    auto [std_data, info] = standardize(data);
    CHECK(info.col_means[0] == doctest::Approx(0.0));
    CHECK(info.col_scales[0] == doctest::Approx(1.0));
    CHECK((std_data.x - data.x).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("standardize flags constant columns instead of dividing by zero") {
    Dataset data;
    data.x.resize(3, 2);
    data.x << 5.0, 1.0, 5.0, 2.0, 5.0, 3.0;
    data.y.resize(3);
    data.y << 1.0, 2.0, 3.0;

    auto [std_data, info] = standardize(data);
    CHECK(info.zero_variance[0]);
    CHECK_FALSE(info.zero_variance[1]);
    CHECK(info.col_scales[0] == 1.0);
    CHECK(std_data.x.col(0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // The solver pins the flagged coefficient to zero.
    SolverConfig config;
    config.alpha = 1.0;
    config.excluded = info.zero_variance;
    const PenaltyFactors ones = PenaltyFactors::ones(2);
    const VectorXd y_work = std_data.y.array() - std_data.y.mean();
    const LambdaSequence seq = make_lambda_sequence(std_data.x, y_work, ones, 1.0, 20, 0.1);
    const ElnetFit fit = fit_path(std_data, ones, config, seq);
    CHECK(fit.betas.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("destandardize identity and zero cases") {
    StandardizationInfo info = StandardizationInfo::identity(2);
    VectorXd beta(2);
    beta << 1.5, -2.0;
    auto [b, intercept] = destandardize(beta, 0.25, info);
    CHECK((b - beta).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(intercept == doctest::Approx(0.25));

    info.y_mean = 3.5;
    auto [b0, i0] = destandardize(VectorXd::Zero(2), 0.0, info);
    CHECK(b0.cwiseAbs().maxCoeff() == 0.0);
    CHECK(i0 == doctest::Approx(3.5));
}

TEST_CASE("destandardize single feature with scale 2 and mean 3") {
    StandardizationInfo info;
    info.col_means = VectorXd::Constant(1, 3.0);
    info.col_scales = VectorXd::Constant(1, 2.0);
    info.y_mean = 7.0;
    info.zero_variance = {false};

    VectorXd beta_std = VectorXd::Constant(1, 1.0);
    auto [beta, intercept] = destandardize(beta_std, 0.0, info);
    CHECK(beta[0] == doctest::Approx(0.5));
    CHECK(intercept == doctest::Approx(7.0 - 0.5 * 3.0));

    // Predictions agree on both scales: eta_std(xs) = eta(x) for x = 3 + 2*xs.
    for (double xs : {-1.0, 0.0, 2.5}) {
        const double x = 3.0 + 2.0 * xs;
        const double eta_std = 7.0 + 1.0 * xs;
        const double eta = intercept + beta[0] * x;
        CHECK(eta == doctest::Approx(eta_std).epsilon(1e-12));
    }
}

TEST_CASE("standardize/destandardize round trip preserves fitted values") {
    Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.below(30));
        const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng.below(8));
        Dataset data = testing::random_regression(rng, n, p);
        data.x.col(0).array() *= 7.0;  // uneven scales
        data.x.col(0).array() += 4.0;

        auto [std_data, info] = standardize(data);
        const VectorXd beta_std = testing::random_vector(rng, p);
        const double intercept_std = rng.normal();
        auto [beta, intercept] = destandardize(beta_std, intercept_std, info);

        const VectorXd eta_std =
            (std_data.x * beta_std).array() + intercept_std + info.y_mean;
        const VectorXd eta = (data.x * beta).array() + intercept;
        const double scale = eta.cwiseAbs().maxCoeff() + 1.0;
        CHECK((eta - eta_std).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
}

TEST_CASE("lambda_max from a single column with x'y = 6") {
    MatrixXd x(3, 1);
    const double root15 = std::sqrt(1.5);
    x << -root15, 0.0, root15;
    const VectorXd y = 2.0 * x.col(0);  // x'y = 2 * 3 = 6
    const LambdaSequence seq =
        make_lambda_sequence(x, y, PenaltyFactors::ones(1), 1.0, 5, 0.1);
    CHECK(seq.values[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("doubling the argmax feature's weight halves its contribution") {
    Rng rng(7);
    MatrixXd x = testing::random_matrix(rng, 30, 3);
    VectorXd y = testing::random_vector(rng, 30);
    y.array() -= y.mean();

    PenaltyFactors w = PenaltyFactors::ones(3);
    const LambdaSequence base = make_lambda_sequence(x, y, w, 1.0, 3, 0.5);

    Eigen::Index argmax = 0;
    double best = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double c = std::abs(x.col(j).dot(y));
        if (c > best) {
            best = c;
            argmax = j;
        }
    }
    w.w[argmax] = 2.0;
    const LambdaSequence halved = make_lambda_sequence(x, y, w, 1.0, 3, 0.5);
    // The argmax contribution halves; lambda_max is the max over the others too.
    double expected = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double c = std::abs(x.col(j).dot(y)) / w.w[j];
        expected = std::max(expected, c);
    }
    CHECK(halved.values[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(x.col(argmax).dot(y)) / w.w[argmax] == doctest::Approx(best / 2.0));
}

TEST_CASE("lambda sequence is log-spaced with constant consecutive ratio") {
    Rng rng(11);
    MatrixXd x = testing::random_matrix(rng, 25, 4);
    VectorXd y = testing::random_vector(rng, 25);
    const LambdaSequence seq =
        make_lambda_sequence(x, y, PenaltyFactors::ones(4), 1.0, 100, 0.01);
    REQUIRE(seq.values.size() == 100);
    CHECK(seq.values[99] == doctest::Approx(0.01 * seq.values[0]).epsilon(1e-12));
    const double ratio = seq.values[1] / seq.values[0];
    for (Eigen::Index i = 1; i + 1 < seq.values.size(); ++i) {
        CHECK(seq.values[i + 1] / seq.values[i] == doctest::Approx(ratio).epsilon(1e-10));
    }
}

TEST_CASE("orthogonal response yields the degenerate single-zero sequence") {
    MatrixXd x(4, 1);
    x << 1.0, -1.0, 1.0, -1.0;
    VectorXd y(4);
    y << 1.0, 1.0, -1.0, -1.0;  // orthogonal to the column
    const LambdaSequence seq =
        make_lambda_sequence(x, y, PenaltyFactors::ones(1), 1.0, 50, 0.01);
    CHECK(seq.degenerate);
    REQUIRE(seq.values.size() == 1);
    CHECK(seq.values[0] == 0.0);
}

TEST_CASE("solver returns the all-zero vector at lambda_max") {
    Rng rng(99);
    for (double alpha : {1.0, 0.5}) {
        Dataset raw = testing::random_regression(rng, 40, 8);
        auto [data, info] = standardize(raw);
        const PenaltyFactors ones = PenaltyFactors::ones(8);
        const VectorXd y_work = data.y.array() - data.y.mean();
        const LambdaSequence seq = make_lambda_sequence(data.x, y_work, ones, alpha, 1, 0.5);
        SolverConfig config;
        config.alpha = alpha;
        const ElnetFit fit = fit_path(data, ones, config, seq);
        CHECK(fit.betas.col(0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(fit.intercepts[0] == doctest::Approx(data.y.mean()).epsilon(1e-10));
    }
}

TEST_CASE("dataset validation rejects malformed inputs") {
    Dataset data;
    data.x.resize(1, 2);
    data.x << 1.0, 2.0;
    data.y = VectorXd::Zero(1);
    CHECK_THROWS_AS(validate_dataset(data), DataError);  // n < 2

    data.x.resize(3, 2);
    data.x << 1, 2, 3, 4, 5, 6;
    data.y = VectorXd::Zero(2);
    CHECK_THROWS_AS(validate_dataset(data), DataError);  // length mismatch

    data.y = VectorXd::Zero(3);
    data.y[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate_dataset(data), DataError);  // non-finite

    data.y << 0.0, 1.0, 0.5;
    data.family = Family::binomial;
    CHECK_THROWS_AS(validate_dataset(data), DataError);  // non 0/1 response
}
