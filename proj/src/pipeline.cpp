#include "fwelnet/pipeline.hpp"

#include "fwelnet/elnet.hpp"

namespace fwelnet {

namespace {

OriginalScalePath destandardize_path(const ElnetFit& fit, const StandardizationInfo& info) {
    OriginalScalePath path;
    path.lambda_seq = fit.lambda_seq;
    path.family = fit.family;
    const Eigen::Index m = fit.path_length();
    path.betas.resize(fit.n_features(), m);
    path.intercepts.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto [beta, intercept] = destandardize(fit.betas.col(i), fit.intercepts[i], info);
        path.betas.col(i) = beta;
        path.intercepts[i] = intercept;
    }
    return path;
}

// Zero-variance columns are pinned to zero inside the solver.
void apply_exclusions(SolverConfig& solver, const StandardizationInfo& info) {
    bool any = false;
    for (bool flag : info.zero_variance) any = any || flag;
    if (any) solver.excluded = info.zero_variance;
}

}  // namespace

MatrixXd path_eta_original(const OriginalScalePath& path, const MatrixXd& x_new) {
    if (x_new.cols() != path.betas.rows()) {
        throw DataError("prediction design has wrong number of columns");
    }
    MatrixXd eta = x_new * path.betas;
    eta.rowwise() += path.intercepts.transpose();
    return eta;
}

ElnetPipelineResult fit_elnet_pipeline(const Dataset& raw, const PenaltyFactors& factors,
                                       const SolverConfig& solver_in, int n_lambda,
                                       double min_ratio, bool do_standardize,
                                       const LambdaSequence* lambda_override) {
    ElnetPipelineResult out;
    Dataset work;
    if (do_standardize) {
        auto [std_data, info] = standardize(raw);
        work = std::move(std_data);
        out.info = std::move(info);
    } else {
        validate_dataset(raw);
        work = raw;
        out.info = StandardizationInfo::identity(raw.x.cols());
    }

    SolverConfig solver = solver_in;
    solver.family = raw.family;
    apply_exclusions(solver, out.info);

    LambdaSequence seq;
    if (lambda_override) {
        seq = *lambda_override;
    } else {
        const VectorXd y_work = work.y.array() - work.y.mean();
        seq = make_lambda_sequence(work.x, y_work, factors, solver.alpha, n_lambda, min_ratio);
    }

    out.fit_std = fit_path_any(work, factors, solver, seq);
    out.path = destandardize_path(out.fit_std, out.info);
    return out;
}

FwelnetPipelineResult fit_fwelnet_pipeline(const Dataset& raw, const FeatureInfo& zmat,
                                           const FwelnetConfig& config_in, bool do_standardize,
                                           const LambdaSequence* lambda_override) {
    FwelnetPipelineResult out;
    Dataset work;
    if (do_standardize) {
        auto [std_data, info] = standardize(raw);
        work = std::move(std_data);
        out.info = std::move(info);
    } else {
        validate_dataset(raw);
        work = raw;
        out.info = StandardizationInfo::identity(raw.x.cols());
    }

    FwelnetConfig config = config_in;
    config.solver.family = raw.family;
    apply_exclusions(config.solver, out.info);

    out.model = fwelnet_fit_any(work, zmat, config, lambda_override);
    out.path = destandardize_path(out.model.fit, out.info);
    return out;
}

namespace {

CvSelection finish_selection(OriginalScalePath path, CvResult cv) {
    CvSelection sel;
    sel.beta_min = path.betas.col(cv.index_min);
    sel.intercept_min = path.intercepts[cv.index_min];
    sel.path = std::move(path);
    sel.cv = std::move(cv);
    return sel;
}

}  // namespace

CvSelection cv_elnet(const Dataset& raw, const PenaltyFactors& factors,
                     const SolverConfig& solver, int n_lambda, double min_ratio,
                     Metric metric, const FoldAssignment& folds, int n_threads,
                     bool do_standardize) {
    ElnetPipelineResult full =
        fit_elnet_pipeline(raw, factors, solver, n_lambda, min_ratio, do_standardize);
    const LambdaSequence seq = full.path.lambda_seq;

    FitCallback fit = [&](const Dataset& train) -> PathPredictor {
        ElnetPipelineResult res = fit_elnet_pipeline(train, factors, solver, n_lambda,
                                                     min_ratio, do_standardize, &seq);
        OriginalScalePath path = std::move(res.path);
        return [path](const MatrixXd& x_new) { return path_eta_original(path, x_new); };
    };
    CvResult cv = cross_validate(raw, fit, metric, folds, seq, n_threads);
    return finish_selection(std::move(full.path), std::move(cv));
}

CvSelection cv_fwelnet(const Dataset& raw, const FeatureInfo& zmat,
                       const FwelnetConfig& config, Metric metric,
                       const FoldAssignment& folds, int n_threads, bool do_standardize) {
    FwelnetPipelineResult full = fit_fwelnet_pipeline(raw, zmat, config, do_standardize);
    const LambdaSequence seq = full.path.lambda_seq;

    // theta is re-learned on each fold's training rows; held-out rows never
    // influence the learned weights.
    FitCallback fit = [&](const Dataset& train) -> PathPredictor {
        FwelnetPipelineResult res =
            fit_fwelnet_pipeline(train, zmat, config, do_standardize, &seq);
        OriginalScalePath path = std::move(res.path);
        return [path](const MatrixXd& x_new) { return path_eta_original(path, x_new); };
    };
    CvResult cv = cross_validate(raw, fit, metric, folds, seq, n_threads);
    CvSelection sel = finish_selection(std::move(full.path), std::move(cv));
    sel.model = std::move(full.model);
    return sel;
}

}  // namespace fwelnet
