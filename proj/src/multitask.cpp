#include "fwelnet/multitask.hpp"

#include "fwelnet/data_model.hpp"

namespace fwelnet {

namespace {

FeatureInfo side_info_from_partner(const VectorXd& partner_beta_abs) {
    // |partner coefficients| plus a constant column so the weight map can
    // express "no information" smoothly.
    FeatureInfo zmat;
    zmat.z.resize(partner_beta_abs.size(), 2);
    zmat.z.col(0) = partner_beta_abs;
    zmat.z.col(1) = VectorXd::Ones(partner_beta_abs.size());
    return zmat;
}

}  // namespace

CvSelection multitask_update(const MatrixXd& x, const VectorXd& y,
                             const VectorXd& partner_beta_abs,
                             const MultitaskConfig& config, const FoldAssignment& folds) {
    Dataset data;
    data.x = x;
    data.y = y;
    data.family = Family::gaussian;

    FwelnetConfig fw;
    fw.alpha = config.alpha;
    fw.n_iter = config.n_iter;
    fw.aggregate = config.aggregate;
    fw.solver = config.solver;
    fw.n_lambda = config.n_lambda;
    fw.lambda_min_ratio = config.lambda_min_ratio;

    const FeatureInfo zmat = side_info_from_partner(partner_beta_abs);
    return cv_fwelnet(data, zmat, fw, Metric::mse, folds, config.n_threads);
}

MultitaskResult multitask_fit(const MatrixXd& x, const VectorXd& y1, const VectorXd& y2,
                              const MultitaskConfig& config) {
    if (y1.size() != x.rows() || y2.size() != x.rows()) {
        throw DataError("multitask responses must match the design row count");
    }
    if (config.n_outer < 0) throw DataError("n_outer must be nonnegative");

    const FoldAssignment folds =
        make_folds(x.rows(), config.n_folds, std::nullopt, config.seed);

    Dataset d1, d2;
    d1.x = x;
    d1.y = y1;
    d2.x = x;
    d2.y = y2;

    SolverConfig solver = config.solver;
    solver.alpha = config.alpha;

    // lambda.min elastic-net initialization for both responses.
    CvSelection init1 = cv_elnet(d1, PenaltyFactors::ones(x.cols()), solver, config.n_lambda,
                                 config.lambda_min_ratio, Metric::mse, folds, config.n_threads);
    CvSelection init2 = cv_elnet(d2, PenaltyFactors::ones(x.cols()), solver, config.n_lambda,
                                 config.lambda_min_ratio, Metric::mse, folds, config.n_threads);

    MultitaskResult result;
    result.beta1 = init1.beta_min;
    result.beta2 = init2.beta_min;
    result.intercept1 = init1.intercept_min;
    result.intercept2 = init2.intercept_min;
    result.lambda1 = init1.cv.lambda_min;
    result.lambda2 = init2.cv.lambda_min;
    result.cv1 = init1.cv;
    result.cv2 = init2.cv;
    result.snapshots.push_back({result.beta1, result.beta2});

    for (int outer = 0; outer < config.n_outer; ++outer) {
        CvSelection up2 = multitask_update(x, y2, result.beta1.cwiseAbs(), config, folds);
        result.beta2 = up2.beta_min;
        result.intercept2 = up2.intercept_min;
        result.lambda2 = up2.cv.lambda_min;
        result.cv2 = up2.cv;

        CvSelection up1 = multitask_update(x, y1, result.beta2.cwiseAbs(), config, folds);
        result.beta1 = up1.beta_min;
        result.intercept1 = up1.intercept_min;
        result.lambda1 = up1.cv.lambda_min;
        result.cv1 = up1.cv;

        result.snapshots.push_back({result.beta1, result.beta2});
    }
    return result;
}

}  // namespace fwelnet
