#include "fwelnet/model_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace fwelnet {

namespace {

using json = nlohmann::ordered_json;

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

VectorXd vector_from_json(const json& arr) {
    VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

// Coefficients stored one array per path point.
json matrix_to_json(const MatrixXd& m) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back(vector_to_json(m.col(c)));
    return cols;
}

MatrixXd matrix_from_json(const json& cols, Eigen::Index rows) {
    MatrixXd m(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        m.col(static_cast<Eigen::Index>(c)) = vector_from_json(cols[c]);
    }
    return m;
}

}  // namespace

std::string to_json_string(const ModelDocument& doc) {
    json j;
    j["schema_version"] = doc.schema_version;
    json config;
    config["family"] = family_name(doc.family);
    config["alpha"] = doc.alpha;
    config["niter"] = doc.n_iter;
    config["aggregate"] = doc.aggregate;
    config["nlambda"] = doc.n_lambda;
    config["lambda_min_ratio"] = doc.lambda_min_ratio;
    config["standardize"] = doc.standardized;
    config["seed"] = doc.seed;
    j["config"] = std::move(config);
    j["theta"] = vector_to_json(doc.theta);
    j["penalty_weights"] = vector_to_json(doc.penalty_weights);
    j["lambda"] = vector_to_json(doc.lambda);
    j["intercepts"] = vector_to_json(doc.intercepts);
    j["coefficients"] = matrix_to_json(doc.coefficients);
    j["history"] = doc.history;
    if (doc.cv) {
        json cv;
        cv["metric"] = doc.cv->metric;
        cv["lambda_min"] = doc.cv->lambda_min;
        cv["lambda_1se"] = doc.cv->lambda_1se;
        cv["metric_min"] = doc.cv->metric_min;
        cv["metric_1se"] = doc.cv->metric_1se;
        cv["nfolds"] = doc.cv->n_folds;
        j["cv"] = std::move(cv);
    }
    return j.dump(2) + "\n";
}

ModelDocument model_from_json_string(const std::string& text) {
    json j = json::parse(text);
    ModelDocument doc;
    doc.schema_version = j.at("schema_version");
    const json& config = j.at("config");
    const std::string family = config.at("family");
    if (family == "gaussian") {
        doc.family = Family::gaussian;
    } else if (family == "binomial") {
        doc.family = Family::binomial;
    } else {
        throw DataError("unknown family '" + family + "' in model document");
    }
    doc.alpha = config.at("alpha");
    doc.n_iter = config.at("niter");
    doc.aggregate = config.at("aggregate");
    doc.n_lambda = config.at("nlambda");
    doc.lambda_min_ratio = config.at("lambda_min_ratio");
    doc.standardized = config.at("standardize");
    doc.seed = config.at("seed");
    doc.theta = vector_from_json(j.at("theta"));
    doc.penalty_weights = vector_from_json(j.at("penalty_weights"));
    doc.lambda = vector_from_json(j.at("lambda"));
    doc.intercepts = vector_from_json(j.at("intercepts"));
    doc.coefficients =
        matrix_from_json(j.at("coefficients"), doc.penalty_weights.size());
    doc.history = j.at("history").get<std::vector<double>>();
    if (j.contains("cv")) {
        const json& cv = j.at("cv");
        ModelDocument::CvSummary summary;
        summary.metric = cv.at("metric");
        summary.lambda_min = cv.at("lambda_min");
        summary.lambda_1se = cv.at("lambda_1se");
        summary.metric_min = cv.at("metric_min");
        summary.metric_1se = cv.at("metric_1se");
        summary.n_folds = cv.at("nfolds");
        doc.cv = summary;
    }
    return doc;
}

void save_model(const ModelDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << to_json_string(doc);
    if (!out) throw DataError("failed while writing '" + path + "'");
}

ModelDocument load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return model_from_json_string(text);
    } catch (const json::exception& e) {
        throw DataError("'" + path + "': " + e.what());
    }
}

namespace {

DocumentPrediction predict_at(const ModelDocument& doc, const MatrixXd& x_new,
                              Eigen::Index index) {
    if (x_new.cols() != doc.coefficients.rows()) {
        throw DataError("prediction design has " + std::to_string(x_new.cols()) +
                        " columns, model has " + std::to_string(doc.coefficients.rows()) +
                        " features");
    }
    DocumentPrediction out;
    out.lambda_index = index;
    out.lambda = doc.lambda[index];
    out.eta = (x_new * doc.coefficients.col(index)).array() + doc.intercepts[index];
    if (doc.family == Family::binomial) {
        out.prob.resize(out.eta.size());
        for (Eigen::Index i = 0; i < out.eta.size(); ++i) {
            const double e = out.eta[i];
            out.prob[i] = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e))
                                   : std::exp(e) / (1.0 + std::exp(e));
        }
    }
    return out;
}

}  // namespace

DocumentPrediction predict_from_document(const ModelDocument& doc, const MatrixXd& x_new,
                                         Eigen::Index lambda_index) {
    if (lambda_index < 0 || lambda_index >= doc.lambda.size()) {
        throw DataError("lambda index out of range");
    }
    return predict_at(doc, x_new, lambda_index);
}

DocumentPrediction predict_from_document(const ModelDocument& doc, const MatrixXd& x_new,
                                         double lambda_value) {
    Eigen::Index best = -1;
    double best_diff = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < doc.lambda.size(); ++i) {
        const double diff = std::abs(doc.lambda[i] - lambda_value);
        if (diff < best_diff) {
            best_diff = diff;
            best = i;
        }
    }
    if (best < 0 || best_diff > 1e-9 * std::max(1.0, std::abs(lambda_value))) {
        throw DataError("lambda value " + std::to_string(lambda_value) +
                        " is not on the model's path");
    }
    return predict_at(doc, x_new, best);
}

}  // namespace fwelnet
