#include "fwelnet/cv.hpp"
#include "fwelnet/data_model.hpp"
#include "fwelnet/elnet.hpp"
#include "fwelnet/pipeline.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace fwelnet;

TEST_CASE("make_folds gives a leave-one-out partition when k = n") {
    const FoldAssignment folds = make_folds(6, 6, std::nullopt, 1);
    std::set<int> seen(folds.fold_of.begin(), folds.fold_of.end());
    CHECK(seen.size() == 6);
}

TEST_CASE("make_folds keeps grouped observations together") {
    std::vector<long long> groups = {1, 1, 2, 2};
    const FoldAssignment folds = make_folds(4, 2, groups, 5);
    CHECK(folds.fold_of[0] == folds.fold_of[1]);
    CHECK(folds.fold_of[2] == folds.fold_of[3]);
    CHECK(folds.fold_of[0] != folds.fold_of[2]);
    CHECK(folds_respect_groups(folds, groups));
}

TEST_CASE("make_folds is deterministic and validates its inputs") {
    const FoldAssignment a = make_folds(20, 5, std::nullopt, 123);
    const FoldAssignment b = make_folds(20, 5, std::nullopt, 123);
    CHECK(a.fold_of == b.fold_of);

    std::vector<long long> groups = {1, 1, 2, 2};
    CHECK_THROWS_AS(make_folds(4, 3, groups, 1), DataError);  // k > distinct groups
    CHECK_THROWS_AS(make_folds(4, 1, std::nullopt, 1), DataError);
}

TEST_CASE("fold integrity holds on random grouped inputs") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 30 + static_cast<int>(rng.below(40));
        std::vector<long long> groups(static_cast<std::size_t>(n));
        for (auto& g : groups) g = static_cast<long long>(rng.below(12));
        std::set<long long> distinct(groups.begin(), groups.end());
        const int k = 2 + static_cast<int>(rng.below(distinct.size() - 1));
        const FoldAssignment folds = make_folds(n, k, groups, rng.below(1000));
        CHECK(folds_respect_groups(folds, groups));
        // every fold nonempty
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int f : folds.fold_of) ++counts[static_cast<std::size_t>(f)];
        for (int c : counts) CHECK(c > 0);
    }
}

TEST_CASE("auc on separated, tied and mixed inputs") {
    VectorXd sep_scores(4), sep_labels(4);
    sep_scores << 0.1, 0.2, 0.8, 0.9;
    sep_labels << 0, 0, 1, 1;
    CHECK(auc(sep_scores, sep_labels) == doctest::Approx(1.0));

    VectorXd tied_scores = VectorXd::Constant(6, 2.5);
    VectorXd tied_labels(6);
    tied_labels << 0, 1, 0, 1, 0, 1;
    CHECK(auc(tied_scores, tied_labels) == doctest::Approx(0.5));

    VectorXd scores(4), labels(4);
    scores << 1, 2, 3, 4;
    labels << 0, 1, 0, 1;
    // all four positive-negative pairs: (2>1), (2<3), (4>1), (4>3) -> 3/4
    CHECK(auc(scores, labels) == doctest::Approx(0.75));

    CHECK_THROWS_AS(auc(scores, VectorXd::Zero(4)), DataError);
}

TEST_CASE("auc reverses under score negation") {
    Rng rng(81);
    VectorXd scores = testing::random_vector(rng, 40);
    VectorXd labels(40);
    for (Eigen::Index i = 0; i < 40; ++i) labels[i] = rng.flip() ? 1.0 : 0.0;
    labels[0] = 1.0;
    labels[1] = 0.0;
    const double a = auc(scores, labels);
    const double b = auc((-scores).eval(), labels);
    CHECK(a + b == doctest::Approx(1.0).epsilon(1e-12));
}

namespace {

// Fixed-path predictor: CV metrics depend only on held-out scoring.
FitCallback constant_path_callback(const MatrixXd& betas, const VectorXd& intercepts) {
    return [=](const Dataset&) -> PathPredictor {
        return [=](const MatrixXd& x_new) -> MatrixXd {
            MatrixXd eta = x_new * betas;
            eta.rowwise() += intercepts.transpose();
            return eta;
        };
    };
}

}  // namespace

TEST_CASE("perfect predictions give zero MSE at every lambda") {
    Rng rng(83);
    Dataset data = testing::random_regression(rng, 24, 3);
    MatrixXd betas(3, 2);
    VectorXd truth(3);
    truth.setZero();
    // Build y exactly from a known linear model.
    truth << 1.0, -2.0, 0.5;
    data.y = data.x * truth;
    betas.col(0) = truth;
    betas.col(1) = truth;
    VectorXd intercepts = VectorXd::Zero(2);

    LambdaSequence seq;
    seq.values.resize(2);
    seq.values << 1.0, 0.5;
    seq.n_lambda = 2;

    const FoldAssignment folds = make_folds(24, 4, std::nullopt, 9);
    const CvResult cv = cross_validate(data, constant_path_callback(betas, intercepts),
                                       Metric::mse, folds, seq);
    CHECK(cv.mean_metric.cwiseAbs().maxCoeff() < 1e-20);
}

TEST_CASE("cross-validated lambda_min matches a brute-force held-out scan") {
    Rng rng(87);
    Dataset data = testing::random_regression(rng, 60, 8, 3, 2.0);
    const FoldAssignment folds = make_folds(60, 5, std::nullopt, 21);
    SolverConfig solver;
    solver.alpha = 1.0;
    const PenaltyFactors ones = PenaltyFactors::ones(8);
    const CvSelection sel =
        cv_elnet(data, ones, solver, 30, 0.01, Metric::mse, folds);

    // Independent scan: per fold, fit on the complement with the same lambda
    // sequence and score held-out rows; average and take the argmin.
    const LambdaSequence seq = sel.path.lambda_seq;
    const Eigen::Index m = seq.values.size();
    MatrixXd fold_mse(5, m);
    for (int f = 0; f < 5; ++f) {
        std::vector<int> train_rows, held_rows;
        for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
            (folds.fold_of[i] == f ? held_rows : train_rows).push_back(static_cast<int>(i));
        }
        Dataset train, held;
        train.x.resize(train_rows.size(), 8);
        train.y.resize(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            train.x.row(static_cast<Eigen::Index>(i)) = data.x.row(train_rows[i]);
            train.y[static_cast<Eigen::Index>(i)] = data.y[train_rows[i]];
        }
        held.x.resize(held_rows.size(), 8);
        held.y.resize(held_rows.size());
        for (std::size_t i = 0; i < held_rows.size(); ++i) {
            held.x.row(static_cast<Eigen::Index>(i)) = data.x.row(held_rows[i]);
            held.y[static_cast<Eigen::Index>(i)] = data.y[held_rows[i]];
        }
        const ElnetPipelineResult fold_fit =
            fit_elnet_pipeline(train, ones, solver, 30, 0.01, true, &seq);
        const MatrixXd eta = path_eta_original(fold_fit.path, held.x);
        for (Eigen::Index li = 0; li < m; ++li) {
            fold_mse(f, li) =
                (held.y - eta.col(li)).squaredNorm() / static_cast<double>(held.y.size());
        }
    }
    Eigen::Index best = 0;
    for (Eigen::Index li = 1; li < m; ++li) {
        if (fold_mse.col(li).mean() < fold_mse.col(best).mean()) best = li;
    }
    CHECK(sel.cv.index_min == best);
    CHECK(sel.cv.lambda_min == seq.values[best]);
}

TEST_CASE("cv result is invariant to fold relabeling") {
    Rng rng(91);
    Dataset data = testing::random_regression(rng, 40, 5);
    LambdaSequence seq;
    seq.values.resize(3);
    seq.values << 2.0, 1.0, 0.5;
    seq.n_lambda = 3;

    MatrixXd betas = testing::random_matrix(rng, 5, 3);
    VectorXd intercepts = testing::random_vector(rng, 3);
    const FitCallback cb = constant_path_callback(betas, intercepts);

    FoldAssignment folds = make_folds(40, 4, std::nullopt, 31);
    const CvResult base = cross_validate(data, cb, Metric::mse, folds, seq);

    // Relabel folds by a permutation: fold-level means are permuted, so the
    // mean and SE per lambda are unchanged.
    FoldAssignment relabeled = folds;
    const std::vector<int> perm = {2, 3, 1, 0};
    for (auto& f : relabeled.fold_of) f = perm[static_cast<std::size_t>(f)];
    const CvResult swapped = cross_validate(data, cb, Metric::mse, relabeled, seq);
    CHECK((base.mean_metric - swapped.mean_metric).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((base.se_metric - swapped.se_metric).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("lambda_1se is within one SE of the optimum and more regularized") {
    Rng rng(95);
    for (int rep = 0; rep < 5; ++rep) {
        Dataset data = testing::random_regression(rng, 50, 10, 3, 3.0);
        const FoldAssignment folds = make_folds(50, 5, std::nullopt, 100 + rep);
        SolverConfig solver;
        solver.alpha = 1.0;
        const CvSelection sel = cv_elnet(data, PenaltyFactors::ones(10), solver, 40, 0.01,
                                         Metric::mse, folds);
        CHECK(sel.cv.lambda_1se >= sel.cv.lambda_min);
        const double bound =
            sel.cv.mean_metric[sel.cv.index_min] + sel.cv.se_metric[sel.cv.index_min];
        CHECK(sel.cv.mean_metric[sel.cv.index_1se] <= bound + 1e-12);
    }
}

TEST_CASE("single-class AUC folds are excluded with a warning") {
    Rng rng(99);
    Dataset data;
    data.family = Family::binomial;
    data.x = testing::random_matrix(rng, 20, 3);
    data.y = VectorXd::Zero(20);
    for (int i = 0; i < 8; ++i) data.y[i] = 1.0;  // positives clustered

    // Force one fold to contain only negatives.
    FoldAssignment folds;
    folds.k = 4;
    folds.fold_of.assign(20, 0);
    for (int i = 0; i < 20; ++i) folds.fold_of[static_cast<std::size_t>(i)] = i % 4;
    for (int i = 12; i < 20; ++i) folds.fold_of[static_cast<std::size_t>(i)] = 3;
    folds.fold_of[3] = 0;
    folds.fold_of[7] = 1;
    folds.fold_of[11] = 2;

    LambdaSequence seq;
    seq.values = VectorXd::Constant(1, 1.0);
    seq.n_lambda = 1;

    MatrixXd betas = testing::random_matrix(rng, 3, 1);
    const CvResult cv = cross_validate(data, constant_path_callback(betas, VectorXd::Zero(1)),
                                       Metric::auc, folds, seq);
    CHECK_FALSE(cv.warnings.empty());
    CHECK(std::isnan(cv.fold_metric(3, 0)));
    CHECK(std::isfinite(cv.mean_metric[0]));
}

TEST_CASE("metric/family compatibility is enforced") {
    Rng rng(103);
    Dataset data = testing::random_regression(rng, 20, 3);
    LambdaSequence seq;
    seq.values = VectorXd::Constant(1, 1.0);
    seq.n_lambda = 1;
    const FoldAssignment folds = make_folds(20, 4, std::nullopt, 3);
    const FitCallback cb =
        constant_path_callback(MatrixXd::Zero(3, 1), VectorXd::Zero(1));
    CHECK_THROWS_AS(cross_validate(data, cb, Metric::auc, folds, seq), DataError);
    CHECK_THROWS_AS(cross_validate(data, cb, Metric::deviance, folds, seq), DataError);
}

TEST_CASE("AUC lambda selection maximizes and the 1se rule moves to larger lambda") {
    Rng rng(107);
    Dataset data = testing::random_binomial(rng, 80, 4, 2);
    const FoldAssignment folds = make_folds(80, 5, std::nullopt, 17);
    SolverConfig solver;
    solver.alpha = 1.0;
    solver.family = Family::binomial;
    const CvSelection sel = cv_elnet(data, PenaltyFactors::ones(4), solver, 25, 0.05,
                                     Metric::auc, folds);
    Eigen::Index argmax = 0;
    for (Eigen::Index li = 1; li < sel.cv.mean_metric.size(); ++li) {
        if (sel.cv.mean_metric[li] > sel.cv.mean_metric[argmax]) argmax = li;
    }
    CHECK(sel.cv.mean_metric[sel.cv.index_min] == sel.cv.mean_metric[argmax]);
    CHECK(sel.cv.lambda_1se >= sel.cv.lambda_min);
}
