// Command-line front end: CSV in, fitted models / CV reports / simulation
// batteries out. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical failure.

#include "fwelnet/csv.hpp"
#include "fwelnet/cv.hpp"
#include "fwelnet/data_model.hpp"
#include "fwelnet/fwelnet.hpp"
#include "fwelnet/model_io.hpp"
#include "fwelnet/multitask.hpp"
#include "fwelnet/parallel.hpp"
#include "fwelnet/pipeline.hpp"
#include "fwelnet/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace fwelnet;
using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CommonFitOptions {
    std::string x_path;
    std::string y_path;
    std::string z_path;
    double alpha = 1.0;
    int n_iter = 1;
    std::string aggregate = "mean";
    std::string family = "gaussian";
    int n_lambda = 100;
    double lambda_min_ratio = 0.0;
    bool no_standardize = false;
    bool header = false;
    std::uint64_t seed = 0;
    std::string out_path;
    int n_threads = default_thread_count();
};

void add_common_fit_options(CLI::App* cmd, CommonFitOptions& opt) {
    cmd->add_option("--x", opt.x_path, "design matrix CSV (one observation per row)")
        ->required();
    cmd->add_option("--y", opt.y_path, "response CSV (single column)")->required();
    cmd->add_option("--z", opt.z_path,
                    "feature-information CSV (p rows, K columns); omit for a plain "
                    "elastic net");
    cmd->add_option("--alpha", opt.alpha, "elastic-net mixing parameter")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--niter", opt.n_iter, "score-descent iterations")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--aggregate", opt.aggregate, "gradient aggregation across the path")
        ->check(CLI::IsMember({"mean", "median"}));
    cmd->add_option("--family", opt.family, "model family")
        ->check(CLI::IsMember({"gaussian", "binomial"}));
    cmd->add_option("--nlambda", opt.n_lambda, "path length")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-min-ratio", opt.lambda_min_ratio,
                    "smallest lambda as a fraction of lambda_max (default: 0.01 if n < p, "
                    "else 1e-4)");
    cmd->add_flag("--no-standardize", opt.no_standardize,
                  "fit on the raw scale (coefficients are always reported on the "
                  "original scale)");
    cmd->add_flag("--header", opt.header, "skip the first row of every input CSV");
    cmd->add_option("--seed", opt.seed, "random seed (echoed into outputs)");
    cmd->add_option("--threads", opt.n_threads, "worker threads for folds/runs");
}

Family parse_family(const std::string& name) {
    return name == "binomial" ? Family::binomial : Family::gaussian;
}

Aggregate parse_aggregate(const std::string& name) {
    return name == "median" ? Aggregate::median : Aggregate::mean;
}

Metric parse_metric(const std::string& name) {
    if (name == "mse") return Metric::mse;
    if (name == "deviance") return Metric::deviance;
    return Metric::auc;
}

struct LoadedData {
    Dataset data;
    std::optional<FeatureInfo> zmat;
};

LoadedData load_dataset(const CommonFitOptions& opt) {
    LoadedData loaded;
    loaded.data.x = read_csv_matrix(opt.x_path, opt.header);
    loaded.data.y = read_csv_vector(opt.y_path, opt.header);
    loaded.data.family = parse_family(opt.family);
    if (loaded.data.y.size() != loaded.data.x.rows()) {
        throw DataError("'" + opt.x_path + "' has " + std::to_string(loaded.data.x.rows()) +
                        " rows but '" + opt.y_path + "' has " +
                        std::to_string(loaded.data.y.size()) + " values");
    }
    if (!opt.z_path.empty()) {
        FeatureInfo zmat;
        zmat.z = read_csv_matrix(opt.z_path, opt.header);
        if (zmat.z.rows() != loaded.data.x.cols()) {
            throw DataError("'" + opt.z_path + "' has " + std::to_string(zmat.z.rows()) +
                            " rows but '" + opt.x_path + "' has " +
                            std::to_string(loaded.data.x.cols()) + " feature columns");
        }
        loaded.zmat = std::move(zmat);
    }
    validate_dataset(loaded.data);
    return loaded;
}

double resolved_min_ratio(const CommonFitOptions& opt, const Dataset& data) {
    return opt.lambda_min_ratio > 0.0 ? opt.lambda_min_ratio
                                      : default_min_ratio(data.x.rows(), data.x.cols());
}

void check_finite_path(const OriginalScalePath& path) {
    if (!path.betas.allFinite() || !path.intercepts.allFinite()) {
        throw NumericalError("fitted path contains non-finite values");
    }
}

struct FitOutcome {
    OriginalScalePath path;
    ThetaVector theta;  // empty for the plain elastic net
    VectorXd weights;
    std::vector<double> history;
};

FitOutcome run_fit(const LoadedData& loaded, const CommonFitOptions& opt, double min_ratio) {
    FitOutcome outcome;
    if (loaded.zmat) {
        FwelnetConfig config;
        config.alpha = opt.alpha;
        config.n_iter = opt.n_iter;
        config.aggregate = parse_aggregate(opt.aggregate);
        config.n_lambda = opt.n_lambda;
        config.lambda_min_ratio = min_ratio;
        FwelnetPipelineResult res =
            fit_fwelnet_pipeline(loaded.data, *loaded.zmat, config, !opt.no_standardize);
        outcome.path = std::move(res.path);
        outcome.theta = res.model.theta;
        outcome.weights = res.model.weights.w;
        outcome.history = res.model.history;
    } else {
        SolverConfig solver;
        solver.alpha = opt.alpha;
        ElnetPipelineResult res = fit_elnet_pipeline(
            loaded.data, PenaltyFactors::ones(loaded.data.x.cols()), solver, opt.n_lambda,
            min_ratio, !opt.no_standardize);
        outcome.path = std::move(res.path);
        outcome.theta = ThetaVector();
        outcome.weights = VectorXd::Ones(loaded.data.x.cols());
    }
    check_finite_path(outcome.path);
    return outcome;
}

ModelDocument make_document(const CommonFitOptions& opt, double min_ratio,
                            const FitOutcome& outcome) {
    ModelDocument doc;
    doc.family = parse_family(opt.family);
    doc.alpha = opt.alpha;
    doc.n_iter = opt.n_iter;
    doc.aggregate = opt.aggregate;
    doc.n_lambda = opt.n_lambda;
    doc.lambda_min_ratio = min_ratio;
    doc.standardized = !opt.no_standardize;
    doc.seed = opt.seed;
    doc.theta = outcome.theta;
    doc.penalty_weights = outcome.weights;
    doc.lambda = outcome.path.lambda_seq.values;
    doc.intercepts = outcome.path.intercepts;
    doc.coefficients = outcome.path.betas;
    doc.history = outcome.history;
    return doc;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw DataError("failed while writing '" + path + "'");
}

// ---- fit --------------------------------------------------------------------

void cmd_fit(const CommonFitOptions& opt) {
    const LoadedData loaded = load_dataset(opt);
    const double min_ratio = resolved_min_ratio(opt, loaded.data);
    const FitOutcome outcome = run_fit(loaded, opt, min_ratio);
    save_model(make_document(opt, min_ratio, outcome), opt.out_path);
}

// ---- cv ---------------------------------------------------------------------

struct CvOptions {
    CommonFitOptions common;
    int n_folds = 10;
    std::string fold_groups_path;
    std::string metric = "mse";
};

void cmd_cv(const CvOptions& opt) {
    if (parse_metric(opt.metric) == Metric::auc &&
        parse_family(opt.common.family) == Family::gaussian) {
        throw UsageError("--metric auc requires --family binomial");
    }
    if (parse_metric(opt.metric) == Metric::deviance &&
        parse_family(opt.common.family) == Family::gaussian) {
        throw UsageError("--metric deviance requires --family binomial");
    }

    const LoadedData loaded = load_dataset(opt.common);
    const double min_ratio = resolved_min_ratio(opt.common, loaded.data);

    std::optional<std::vector<long long>> groups;
    if (!opt.fold_groups_path.empty()) {
        groups = read_csv_int_column(opt.fold_groups_path, opt.common.header);
        if (static_cast<Eigen::Index>(groups->size()) != loaded.data.x.rows()) {
            throw DataError("'" + opt.fold_groups_path + "' has " +
                            std::to_string(groups->size()) + " rows but the design has " +
                            std::to_string(loaded.data.x.rows()));
        }
    }
    const FoldAssignment folds =
        make_folds(loaded.data.x.rows(), opt.n_folds, groups, opt.common.seed);

    const Metric metric = parse_metric(opt.metric);
    CvSelection sel;
    FitOutcome outcome;
    if (loaded.zmat) {
        FwelnetConfig config;
        config.alpha = opt.common.alpha;
        config.n_iter = opt.common.n_iter;
        config.aggregate = parse_aggregate(opt.common.aggregate);
        config.n_lambda = opt.common.n_lambda;
        config.lambda_min_ratio = min_ratio;
        sel = cv_fwelnet(loaded.data, *loaded.zmat, config, metric, folds,
                         opt.common.n_threads, !opt.common.no_standardize);
        outcome.theta = sel.model->theta;
        outcome.weights = sel.model->weights.w;
        outcome.history = sel.model->history;
    } else {
        SolverConfig solver;
        solver.alpha = opt.common.alpha;
        sel = cv_elnet(loaded.data, PenaltyFactors::ones(loaded.data.x.cols()), solver,
                       opt.common.n_lambda, min_ratio, metric, folds, opt.common.n_threads,
                       !opt.common.no_standardize);
        outcome.theta = ThetaVector();
        outcome.weights = VectorXd::Ones(loaded.data.x.cols());
    }
    outcome.path = sel.path;
    check_finite_path(outcome.path);

    // Per-lambda curve.
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index li = 0; li < sel.cv.lambda.size(); ++li) {
        rows.push_back({format_double(sel.cv.lambda[li]),
                        format_double(sel.cv.mean_metric[li]),
                        format_double(sel.cv.se_metric[li])});
    }
    write_csv(opt.common.out_path + "_cv.csv", {"lambda", "mean", "se"}, rows);

    // Selection summary.
    ordered_json summary;
    summary["metric"] = opt.metric;
    summary["nfolds"] = opt.n_folds;
    summary["lambda_min"] = sel.cv.lambda_min;
    summary["lambda_1se"] = sel.cv.lambda_1se;
    summary["metric_min"] = sel.cv.mean_metric[sel.cv.index_min];
    summary["metric_1se"] = sel.cv.mean_metric[sel.cv.index_1se];
    if (groups) {
        summary["fold_groups"] = true;
        summary["fold_integrity"] = folds_respect_groups(folds, *groups);
    }
    if (!sel.cv.warnings.empty()) summary["warnings"] = sel.cv.warnings;
    write_text(opt.common.out_path + "_cv.json", summary.dump(2) + "\n");

    // Full-data model with the CV block attached.
    ModelDocument doc = make_document(opt.common, min_ratio, outcome);
    ModelDocument::CvSummary cv_summary;
    cv_summary.metric = opt.metric;
    cv_summary.lambda_min = sel.cv.lambda_min;
    cv_summary.lambda_1se = sel.cv.lambda_1se;
    cv_summary.metric_min = sel.cv.mean_metric[sel.cv.index_min];
    cv_summary.metric_1se = sel.cv.mean_metric[sel.cv.index_1se];
    cv_summary.n_folds = opt.n_folds;
    doc.cv = cv_summary;
    save_model(doc, opt.common.out_path + "_model.json");
}

// ---- predict ----------------------------------------------------------------

struct PredictOptions {
    std::string model_path;
    std::string x_path;
    int lambda_index = -1;
    double lambda_value = -1.0;
    bool by_value = false;
    bool by_index = false;
    bool header = false;
    std::string out_path;
};

void cmd_predict(const PredictOptions& opt) {
    if (opt.by_index == opt.by_value) {
        throw UsageError("pass exactly one of --lambda-index or --lambda");
    }
    const ModelDocument doc = load_model(opt.model_path);
    const MatrixXd x = read_csv_matrix(opt.x_path, opt.header);
    const DocumentPrediction pred =
        opt.by_index
            ? predict_from_document(doc, x, static_cast<Eigen::Index>(opt.lambda_index))
            : predict_from_document(doc, x, opt.lambda_value);

    std::vector<std::vector<std::string>> rows;
    const bool binomial = doc.family == Family::binomial;
    for (Eigen::Index i = 0; i < pred.eta.size(); ++i) {
        std::vector<std::string> row{format_double(pred.eta[i])};
        if (binomial) row.push_back(format_double(pred.prob[i]));
        rows.push_back(std::move(row));
    }
    write_csv(opt.out_path,
              binomial ? std::vector<std::string>{"eta", "prob"}
                       : std::vector<std::string>{"eta"},
              rows);
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOptions {
    std::string setting = "1";
    double snr_y = 2.0;
    double snr_z = 10.0;
    int runs = 30;
    std::uint64_t seed = 1;
    int n_test = 10000;
    double alpha = 1.0;
    int n_iter = 1;
    int n_folds = 10;
    int n_threads = default_thread_count();
    std::string out_path;
};

void cmd_simulate(const SimulateOptions& opt) {
    SimConfig config;
    config.setting = parse_sim_setting(opt.setting);
    config.snr_y = opt.snr_y;
    config.snr_z = opt.snr_z;
    config.n_runs = opt.runs;
    config.seed = opt.seed;
    config.n_test = opt.n_test;
    config.alpha = opt.alpha;
    config.n_iter = opt.n_iter;
    config.n_folds = opt.n_folds;
    config.n_threads = opt.n_threads;

    const ExperimentResult result = run_experiment(config);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : result.runs) {
        if (r.failed) continue;
        rows.push_back({std::to_string(r.run), r.method, format_double(r.mse),
                        format_double(r.tpr), format_double(r.fpr)});
    }
    write_csv(opt.out_path + "_runs.csv", {"run", "method", "test_mse", "tpr", "fpr"}, rows);

    ordered_json summary;
    summary["setting"] = opt.setting;
    summary["snr_y"] = opt.snr_y;
    if (config.setting == SimSetting::setting1) summary["snr_z"] = opt.snr_z;
    summary["runs"] = opt.runs;
    summary["seed"] = opt.seed;
    summary["n_test"] = opt.n_test;
    summary["alpha"] = opt.alpha;
    summary["niter"] = opt.n_iter;
    summary["nfolds"] = opt.n_folds;
    summary["failed_runs"] = result.n_failed;
    ordered_json methods = ordered_json::array();
    for (const auto& s : result.summaries) {
        ordered_json m;
        m["method"] = s.method;
        m["n"] = s.n_ok;
        m["median_test_mse"] = s.median_mse;
        m["q1_test_mse"] = s.q1_mse;
        m["q3_test_mse"] = s.q3_mse;
        m["median_tpr"] = s.median_tpr;
        m["median_fpr"] = s.median_fpr;
        methods.push_back(std::move(m));
    }
    summary["methods"] = std::move(methods);
    write_text(opt.out_path + "_summary.json", summary.dump(2) + "\n");

    if (config.setting == SimSetting::fig1) {
        std::vector<std::vector<std::string>> weight_rows;
        for (const auto& r : result.runs) {
            if (r.failed || r.learned_weights.size() == 0) continue;
            for (Eigen::Index j = 0; j < r.learned_weights.size(); ++j) {
                weight_rows.push_back({std::to_string(r.run), std::to_string(j + 1),
                                       format_double(r.learned_weights[j])});
            }
        }
        write_csv(opt.out_path + "_weights.csv", {"run", "feature", "weight"}, weight_rows);
    }
}

// ---- multitask --------------------------------------------------------------

struct MultitaskOptions {
    std::string x_path;
    std::string y1_path;
    std::string y2_path;
    int n_outer = 3;
    double alpha = 1.0;
    int n_iter = 1;
    int n_folds = 10;
    int n_lambda = 100;
    std::uint64_t seed = 0;
    bool header = false;
    int n_threads = default_thread_count();
    std::string out_path;
};

ordered_json vector_json(const VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

void cmd_multitask(const MultitaskOptions& opt) {
    const MatrixXd x = read_csv_matrix(opt.x_path, opt.header);
    const VectorXd y1 = read_csv_vector(opt.y1_path, opt.header);
    const VectorXd y2 = read_csv_vector(opt.y2_path, opt.header);
    if (y1.size() != x.rows() || y2.size() != x.rows()) {
        throw DataError("'" + opt.x_path + "' has " + std::to_string(x.rows()) +
                        " rows but responses have " + std::to_string(y1.size()) + " and " +
                        std::to_string(y2.size()) + " values");
    }

    MultitaskConfig config;
    config.n_outer = opt.n_outer;
    config.alpha = opt.alpha;
    config.n_iter = opt.n_iter;
    config.n_folds = opt.n_folds;
    config.n_lambda = opt.n_lambda;
    config.seed = opt.seed;
    config.n_threads = opt.n_threads;

    const MultitaskResult result = multitask_fit(x, y1, y2, config);

    ordered_json j;
    j["outer_iterations"] = opt.n_outer;
    j["alpha"] = opt.alpha;
    j["nfolds"] = opt.n_folds;
    j["seed"] = opt.seed;
    j["lambda1"] = result.lambda1;
    j["lambda2"] = result.lambda2;
    j["intercept1"] = result.intercept1;
    j["intercept2"] = result.intercept2;
    j["beta1"] = vector_json(result.beta1);
    j["beta2"] = vector_json(result.beta2);
    ordered_json trajectory = ordered_json::array();
    for (const auto& snap : result.snapshots) {
        ordered_json s;
        s["beta1"] = vector_json(snap.beta1);
        s["beta2"] = vector_json(snap.beta2);
        trajectory.push_back(std::move(s));
    }
    j["trajectory"] = std::move(trajectory);
    write_text(opt.out_path + "_multitask.json", j.dump(2) + "\n");
}

// ---- weights ----------------------------------------------------------------

struct WeightsOptions {
    std::string z_path;
    std::string theta_path;
    bool header = false;
    std::string out_path;  // optional; stdout otherwise
};

void cmd_weights(const WeightsOptions& opt) {
    FeatureInfo zmat;
    zmat.z = read_csv_matrix(opt.z_path, opt.header);

    std::ifstream in(opt.theta_path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + opt.theta_path + "'");
    ordered_json parsed;
    try {
        parsed = ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw DataError("'" + opt.theta_path + "': " + e.what());
    }
    const ordered_json& arr = parsed.is_array() ? parsed : parsed.at("theta");
    ThetaVector theta(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) theta[static_cast<Eigen::Index>(i)] = arr[i];
    if (theta.size() != zmat.z.cols()) {
        throw DataError("theta has " + std::to_string(theta.size()) + " entries but '" +
                        opt.z_path + "' has " + std::to_string(zmat.z.cols()) + " columns");
    }

    const VectorXd scores = feature_scores(zmat, theta);
    const PenaltyFactors weights = penalty_weights(zmat, theta);
    std::string text = "feature,score,weight\n";
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
        text += std::to_string(j + 1) + "," + format_double(scores[j]) + "," +
                format_double(weights.w[j]) + "\n";
    }
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        write_text(opt.out_path, text);
    }
}

template <typename Fn>
int run_guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature-weighted elastic net"};
    app.require_subcommand(1);

    int exit_code = 0;

    CommonFitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "fit a model and write it as JSON");
    add_common_fit_options(fit, fit_opt);
    fit->add_option("--out", fit_opt.out_path, "output model path")->required();
    fit->callback([&]() { exit_code = run_guarded([&]() { cmd_fit(fit_opt); }); });

    CvOptions cv_opt;
    CLI::App* cv = app.add_subcommand("cv", "cross-validate and select lambda");
    add_common_fit_options(cv, cv_opt.common);
    cv->add_option("--nfolds", cv_opt.n_folds, "number of folds")->check(CLI::Range(2, 1000));
    cv->add_option("--fold-groups", cv_opt.fold_groups_path,
                   "CSV with one group ID per observation; grouped rows share a fold");
    cv->add_option("--metric", cv_opt.metric, "held-out metric")
        ->check(CLI::IsMember({"mse", "deviance", "auc"}));
    cv->add_option("--out", cv_opt.common.out_path,
                   "output prefix (<out>_cv.csv, <out>_cv.json, <out>_model.json)")
        ->required();
    cv->callback([&]() { exit_code = run_guarded([&]() { cmd_cv(cv_opt); }); });

    PredictOptions pred_opt;
    CLI::App* pred = app.add_subcommand("predict", "predict from a saved model");
    pred->add_option("--model", pred_opt.model_path, "model JSON from fit/cv")->required();
    pred->add_option("--x", pred_opt.x_path, "design matrix CSV")->required();
    CLI::Option* by_index =
        pred->add_option("--lambda-index", pred_opt.lambda_index, "path point index (0-based)");
    CLI::Option* by_value =
        pred->add_option("--lambda", pred_opt.lambda_value, "lambda value on the path");
    pred->add_flag("--header", pred_opt.header, "skip the first row of the input CSV");
    pred->add_option("--out", pred_opt.out_path, "output CSV path")->required();
    pred->callback([&]() {
        pred_opt.by_index = by_index->count() > 0;
        pred_opt.by_value = by_value->count() > 0;
        exit_code = run_guarded([&]() { cmd_predict(pred_opt); });
    });

    SimulateOptions sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "run a seeded simulation battery");
    sim->add_option("--setting", sim_opt.setting, "experiment setting")
        ->required()
        ->check(CLI::IsMember({"1", "2a", "2b", "3", "fig1", "mt"}));
    sim->add_option("--snr-y", sim_opt.snr_y, "signal-to-noise ratio in the response")
        ->check(CLI::PositiveNumber);
    sim->add_option("--snr-z", sim_opt.snr_z,
                    "signal-to-noise ratio in the side information (setting 1)")
        ->check(CLI::PositiveNumber);
    sim->add_option("--runs", sim_opt.runs, "number of runs")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_opt.seed, "master seed");
    sim->add_option("--ntest", sim_opt.n_test, "test points per run")
        ->check(CLI::PositiveNumber);
    sim->add_option("--alpha", sim_opt.alpha, "elastic-net mixing parameter")
        ->check(CLI::Range(0.0, 1.0));
    sim->add_option("--niter", sim_opt.n_iter, "score-descent iterations")
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--nfolds", sim_opt.n_folds, "CV folds inside each run")
        ->check(CLI::Range(2, 1000));
    sim->add_option("--threads", sim_opt.n_threads, "worker threads across runs");
    sim->add_option("--out", sim_opt.out_path,
                    "output prefix (<out>_runs.csv, <out>_summary.json)")
        ->required();
    sim->callback([&]() { exit_code = run_guarded([&]() { cmd_simulate(sim_opt); }); });

    MultitaskOptions mt_opt;
    CLI::App* mt = app.add_subcommand("multitask", "alternating fits for two responses");
    mt->add_option("--x", mt_opt.x_path, "shared design matrix CSV")->required();
    mt->add_option("--y1", mt_opt.y1_path, "first response CSV")->required();
    mt->add_option("--y2", mt_opt.y2_path, "second response CSV")->required();
    mt->add_option("--outer", mt_opt.n_outer, "outer alternations")
        ->check(CLI::NonNegativeNumber);
    mt->add_option("--alpha", mt_opt.alpha, "elastic-net mixing parameter")
        ->check(CLI::Range(0.0, 1.0));
    mt->add_option("--niter", mt_opt.n_iter, "score-descent iterations per update")
        ->check(CLI::NonNegativeNumber);
    mt->add_option("--nfolds", mt_opt.n_folds, "CV folds")->check(CLI::Range(2, 1000));
    mt->add_option("--nlambda", mt_opt.n_lambda, "path length")->check(CLI::PositiveNumber);
    mt->add_option("--seed", mt_opt.seed, "fold seed");
    mt->add_flag("--header", mt_opt.header, "skip the first row of every input CSV");
    mt->add_option("--threads", mt_opt.n_threads, "worker threads for folds");
    mt->add_option("--out", mt_opt.out_path, "output prefix (<out>_multitask.json)")
        ->required();
    mt->callback([&]() { exit_code = run_guarded([&]() { cmd_multitask(mt_opt); }); });

    WeightsOptions w_opt;
    CLI::App* weights = app.add_subcommand("weights", "inspect penalty weights for a theta");
    weights->add_option("--z", w_opt.z_path, "feature-information CSV")->required();
    weights->add_option("--theta", w_opt.theta_path,
                        "JSON with the score vector (bare array or {\"theta\": [...]})")
        ->required();
    weights->add_flag("--header", w_opt.header, "skip the first row of the Z CSV");
    weights->add_option("--out", w_opt.out_path, "write the table here instead of stdout");
    weights->callback([&]() { exit_code = run_guarded([&]() { cmd_weights(w_opt); }); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return exit_code;
}
