#include "fwelnet/cv.hpp"

#include "fwelnet/elnet.hpp"
#include "fwelnet/parallel.hpp"
#include "fwelnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace fwelnet {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::mse: return "mse";
        case Metric::deviance: return "deviance";
        case Metric::auc: return "auc";
    }
    return "?";
}

FoldAssignment make_folds(Eigen::Index n, int k,
                          const std::optional<std::vector<long long>>& obs_group_ids,
                          std::uint64_t seed) {
    if (k < 2) throw DataError("need at least 2 folds");

    // Units are distinct groups, or single observations without grouping.
    std::vector<std::vector<int>> unit_members;
    if (obs_group_ids) {
        if (static_cast<Eigen::Index>(obs_group_ids->size()) != n) {
            throw DataError("obs_group_ids length does not match n");
        }
        std::map<long long, int> unit_of;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto [it, inserted] =
                unit_of.try_emplace((*obs_group_ids)[i], static_cast<int>(unit_members.size()));
            if (inserted) unit_members.emplace_back();
            unit_members[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
        }
    } else {
        unit_members.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            unit_members[static_cast<std::size_t>(i)].push_back(static_cast<int>(i));
        }
    }

    if (static_cast<std::size_t>(k) > unit_members.size()) {
        throw DataError("fold count " + std::to_string(k) + " exceeds the " +
                        std::to_string(unit_members.size()) + " distinct units available");
    }

    std::vector<std::size_t> order(unit_members.size());
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(seed);
    rng.shuffle(order);

    FoldAssignment folds;
    folds.k = k;
    folds.fold_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t u = 0; u < order.size(); ++u) {
        const int fold = static_cast<int>(u % static_cast<std::size_t>(k));
        for (int row : unit_members[order[u]]) {
            folds.fold_of[static_cast<std::size_t>(row)] = fold;
        }
    }
    return folds;
}

bool folds_respect_groups(const FoldAssignment& folds,
                          const std::vector<long long>& obs_group_ids) {
    std::map<long long, int> seen;
    for (std::size_t i = 0; i < obs_group_ids.size(); ++i) {
        auto [it, inserted] = seen.try_emplace(obs_group_ids[i], folds.fold_of[i]);
        if (!inserted && it->second != folds.fold_of[i]) return false;
    }
    return true;
}

double auc(const VectorXd& scores, const VectorXd& labels) {
    if (scores.size() != labels.size()) throw DataError("auc: lengths differ");
    const Eigen::Index n = scores.size();
    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[i] == 1.0) ++n_pos;
    }
    const Eigen::Index n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc requires both classes");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    // Mann-Whitney via midranks; ties contribute 1/2.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[order[t]] == 1.0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

namespace {

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
    Dataset out;
    out.family = data.family;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
        out.y[static_cast<Eigen::Index>(i)] = data.y[rows[i]];
    }
    return out;
}

double fold_metric_at(Metric metric, const VectorXd& y, const VectorXd& eta, bool* undefined) {
    switch (metric) {
        case Metric::mse:
            return (y - eta).squaredNorm() / static_cast<double>(y.size());
        case Metric::deviance:
            return 2.0 * negative_log_likelihood(Family::binomial, y, eta) /
                   static_cast<double>(y.size());
        case Metric::auc: {
            bool has_pos = false, has_neg = false;
            for (Eigen::Index i = 0; i < y.size(); ++i) (y[i] == 1.0 ? has_pos : has_neg) = true;
            if (!has_pos || !has_neg) {
                *undefined = true;
                return std::numeric_limits<double>::quiet_NaN();
            }
            return auc(eta, y);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

CvResult cross_validate(const Dataset& data, const FitCallback& fit, Metric metric,
                        const FoldAssignment& folds, const LambdaSequence& lambda_seq,
                        int n_threads) {
    validate_dataset(data);
    validate_lambda_sequence(lambda_seq);
    if (static_cast<Eigen::Index>(folds.fold_of.size()) != data.x.rows()) {
        throw DataError("fold assignment length does not match data");
    }
    if (metric == Metric::auc && data.family != Family::binomial) {
        throw DataError("auc metric requires the binomial family");
    }
    if (metric == Metric::deviance && data.family != Family::binomial) {
        throw DataError("deviance metric requires the binomial family");
    }

    const int k = folds.k;
    const Eigen::Index m = lambda_seq.values.size();
    CvResult result;
    result.metric = metric;
    result.lambda = lambda_seq.values;
    result.fold_metric.resize(k, m);
    result.fold_metric.setConstant(std::numeric_limits<double>::quiet_NaN());

    std::vector<bool> fold_undefined(static_cast<std::size_t>(k), false);
    parallel_for(static_cast<std::size_t>(k), n_threads, [&](std::size_t f) {
        std::vector<int> train_rows, held_rows;
        for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
            (folds.fold_of[i] == static_cast<int>(f) ? held_rows : train_rows)
                .push_back(static_cast<int>(i));
        }
        if (held_rows.empty()) throw DataError("empty CV fold");
        const Dataset train = subset_rows(data, train_rows);
        const Dataset held = subset_rows(data, held_rows);
        const PathPredictor predictor = fit(train);
        const MatrixXd eta = predictor(held.x);
        if (eta.rows() != held.x.rows() || eta.cols() != m) {
            throw DataError("CV predictor returned unexpected dimensions");
        }
        bool undefined = false;
        for (Eigen::Index li = 0; li < m; ++li) {
            bool this_undefined = false;
            result.fold_metric(static_cast<Eigen::Index>(f), li) =
                fold_metric_at(metric, held.y, eta.col(li), &this_undefined);
            undefined = undefined || this_undefined;
        }
        fold_undefined[f] = undefined;
    });

    for (int f = 0; f < k; ++f) {
        if (fold_undefined[static_cast<std::size_t>(f)]) {
            result.warnings.push_back("fold " + std::to_string(f) +
                                      " has a single class; auc undefined, fold excluded");
        }
    }

    result.mean_metric.resize(m);
    result.se_metric.resize(m);
    for (Eigen::Index li = 0; li < m; ++li) {
        double sum = 0.0;
        int n_valid = 0;
        for (int f = 0; f < k; ++f) {
            const double v = result.fold_metric(f, li);
            if (std::isnan(v)) continue;
            sum += v;
            ++n_valid;
        }
        if (n_valid == 0) throw DataError("metric undefined on every fold");
        const double mean = sum / n_valid;
        double ss = 0.0;
        for (int f = 0; f < k; ++f) {
            const double v = result.fold_metric(f, li);
            if (std::isnan(v)) continue;
            ss += (v - mean) * (v - mean);
        }
        result.mean_metric[li] = mean;
        result.se_metric[li] =
            n_valid > 1 ? std::sqrt(ss / (n_valid - 1)) / std::sqrt(static_cast<double>(n_valid))
                        : 0.0;
    }

    // lambda_min optimizes the mean; ties resolve toward larger lambda
    // (smaller index, since the sequence decreases).
    const bool maximize = metric == Metric::auc;
    Eigen::Index best = 0;
    for (Eigen::Index li = 1; li < m; ++li) {
        const bool better = maximize ? result.mean_metric[li] > result.mean_metric[best]
                                     : result.mean_metric[li] < result.mean_metric[best];
        if (better) best = li;
    }
    result.index_min = best;
    result.lambda_min = lambda_seq.values[best];

    // One-standard-error rule: most regularized lambda within one SE of the
    // optimum (toward larger lambda for AUC as well).
    const double bound = maximize ? result.mean_metric[best] - result.se_metric[best]
                                  : result.mean_metric[best] + result.se_metric[best];
    Eigen::Index pick = best;
    for (Eigen::Index li = 0; li <= best; ++li) {
        const bool within = maximize ? result.mean_metric[li] >= bound
                                     : result.mean_metric[li] <= bound;
        if (within) {
            pick = li;
            break;
        }
    }
    result.index_1se = pick;
    result.lambda_1se = lambda_seq.values[pick];
    return result;
}

}  // namespace fwelnet
