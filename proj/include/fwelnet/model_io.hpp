#pragma once

#include "fwelnet/cv.hpp"
#include "fwelnet/pipeline.hpp"
#include "fwelnet/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fwelnet {

/// Serializable fit: configuration echo, learned score vector, penalty
/// weights, lambda sequence and the original-scale coefficient path.
/// Documents round-trip byte-identically (write -> read -> write).
struct ModelDocument {
    int schema_version = 1;

    // config echo
    Family family = Family::gaussian;
    double alpha = 1.0;
    int n_iter = 0;
    std::string aggregate = "mean";
    int n_lambda = 0;
    double lambda_min_ratio = 0.0;
    bool standardized = true;
    std::uint64_t seed = 0;

    VectorXd theta;            // empty for plain elastic net
    VectorXd penalty_weights;  // length p
    VectorXd lambda;           // length m
    VectorXd intercepts;       // length m, original scale
    MatrixXd coefficients;     // p x m, original scale
    std::vector<double> history;

    struct CvSummary {
        std::string metric;
        double lambda_min = 0.0;
        double lambda_1se = 0.0;
        double metric_min = 0.0;
        double metric_1se = 0.0;
        int n_folds = 0;
    };
    std::optional<CvSummary> cv;
};

std::string to_json_string(const ModelDocument& doc);
ModelDocument model_from_json_string(const std::string& text);

void save_model(const ModelDocument& doc, const std::string& path);
ModelDocument load_model(const std::string& path);

/// Linear predictor (and probabilities for binomial) from a document at one
/// path point.
struct DocumentPrediction {
    VectorXd eta;
    VectorXd prob;
    double lambda = 0.0;
    Eigen::Index lambda_index = 0;
};

DocumentPrediction predict_from_document(const ModelDocument& doc, const MatrixXd& x_new,
                                         Eigen::Index lambda_index);
DocumentPrediction predict_from_document(const ModelDocument& doc, const MatrixXd& x_new,
                                         double lambda_value);

}  // namespace fwelnet
