#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrsense/common.hpp"
#include "attrsense/models/types.hpp"
#include "attrsense/vectorize.hpp"

namespace attrsense {

using Confusion = std::vector<std::vector<std::int64_t>>;

/// Entry [i][j] counts true class i predicted as class j.
inline Confusion confusion_matrix(const std::vector<int>& predicted,
                                  const std::vector<int>& truth, int num_classes) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("confusion_matrix: length mismatch");
    Confusion m(num_classes, std::vector<std::int64_t>(num_classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
            predicted[i] >= num_classes)
            throw std::invalid_argument("confusion_matrix: label outside class range");
        ++m[truth[i]][predicted[i]];
    }
    return m;
}

struct AucValue {
    std::optional<double> value;
    std::string reason; // set when value is absent

    double or_nan() const {
        return value ? *value : std::numeric_limits<double>::quiet_NaN();
    }
};

/// ROC AUC by descending-score sweep and trapezoidal integration; tied
/// scores drop simultaneously (one ROC vertex per distinct score).
inline AucValue roc_auc(const std::vector<double>& scores,
                        const std::vector<bool>& is_positive) {
    if (scores.size() != is_positive.size())
        throw std::invalid_argument("roc_auc: length mismatch");
    std::int64_t pos = 0, neg = 0;
    for (bool p : is_positive) (p ? pos : neg)++;
    if (pos == 0 || neg == 0)
        return {std::nullopt, "only one true class present"};

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double area = 0.0;
    double tp = 0.0, fp = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (is_positive[order[j]] ? tp : fp) += 1.0;
            ++j;
        }
        double tpr = tp / static_cast<double>(pos);
        double fpr = fp / static_cast<double>(neg);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_tpr = tpr;
        prev_fpr = fpr;
        i = j;
    }
    return {area, ""};
}

struct BinaryMetrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    AucValue auc;
};

/// Positive-class F1 and ROC AUC. scores are positive-class scores aligned
/// with truth labels (class ids).
inline BinaryMetrics binary_metrics(const Confusion& confusion,
                                    const std::vector<double>& scores,
                                    const std::vector<int>& truth, int positive_class) {
    if (confusion.size() != 2)
        throw std::invalid_argument("binary_metrics: confusion must be 2x2");
    const int p = positive_class, n = 1 - positive_class;
    const double tp = static_cast<double>(confusion[p][p]);
    const double fp = static_cast<double>(confusion[n][p]);
    const double fn = static_cast<double>(confusion[p][n]);
    const double tn = static_cast<double>(confusion[n][n]);
    BinaryMetrics out;
    const double total = tp + fp + fn + tn;
    out.accuracy = total > 0 ? (tp + tn) / total : 0.0;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    out.f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    std::vector<bool> is_positive(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
        is_positive[i] = truth[i] == positive_class;
    out.auc = roc_auc(scores, is_positive);
    return out;
}

struct MulticlassMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    AucValue macro_auc;
    std::vector<int> excluded_classes; // zero support, left out of the macro means
};

/// Macro-averaged one-vs-rest F1 and ROC AUC; classes without support are
/// excluded from the macro means.
inline MulticlassMetrics multiclass_metrics(const Confusion& confusion,
                                            const Matrix& score_matrix,
                                            const std::vector<int>& truth) {
    const int k = static_cast<int>(confusion.size());
    if (k < 3) throw std::invalid_argument("multiclass_metrics: needs K >= 3");
    MulticlassMetrics out;
    std::int64_t total = 0, trace = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            total += confusion[i][j];
            if (i == j) trace += confusion[i][j];
        }
    out.accuracy = total > 0 ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;

    double f1_sum = 0.0;
    int f1_classes = 0;
    double auc_sum = 0.0;
    int auc_classes = 0;
    for (int c = 0; c < k; ++c) {
        std::int64_t support = 0;
        for (int j = 0; j < k; ++j) support += confusion[c][j];
        if (support == 0) {
            out.excluded_classes.push_back(c);
            continue;
        }
        double tp = static_cast<double>(confusion[c][c]);
        double fp = 0.0, fn = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == c) continue;
            fp += static_cast<double>(confusion[j][c]);
            fn += static_cast<double>(confusion[c][j]);
        }
        double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        f1_sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall)
                                         : 0.0;
        ++f1_classes;

        if (support < static_cast<std::int64_t>(truth.size())) {
            std::vector<double> scores(truth.size());
            std::vector<bool> is_positive(truth.size());
            for (std::size_t i = 0; i < truth.size(); ++i) {
                scores[i] = score_matrix(i, c);
                is_positive[i] = truth[i] == c;
            }
            auto auc = roc_auc(scores, is_positive);
            if (auc.value) {
                auc_sum += *auc.value;
                ++auc_classes;
            }
        }
    }
    out.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
    if (auc_classes > 0)
        out.macro_auc = {auc_sum / auc_classes, ""};
    else
        out.macro_auc = {std::nullopt, "no class with both positives and negatives"};
    return out;
}

inline std::optional<std::string> positive_class_of(Task task) {
    switch (task) {
        case Task::gender: return "male";
        case Task::age_group: return "digital_immigrant";
        case Task::occupation: return std::nullopt;
    }
    return std::nullopt;
}

struct MetricsReport {
    Task task = Task::gender;
    Algorithm algorithm = Algorithm::linear_svc;
    int embedding_dim = 0; // N
    int block_size = 0;    // L
    double accuracy = 0.0;
    double f1 = 0.0; // binary: positive-class F1; multiclass: macro
    AucValue auc;    // binary: positive-class ROC AUC; multiclass: macro OVR
    Confusion confusion;
    std::vector<double> per_class_recall; // NaN where a class has no support
    std::vector<std::string> class_names;
    std::optional<std::string> positive_class;
};

/// Assembles the full per-cell report from test-set truth and predictions,
/// applying the fixed positive-class conventions (male; digital_immigrant).
inline MetricsReport make_report(Task task, Algorithm algorithm, int embedding_dim,
                                 int block_size, const std::vector<std::string>& class_names,
                                 const std::vector<int>& truth, const Prediction& prediction) {
    MetricsReport report;
    report.task = task;
    report.algorithm = algorithm;
    report.embedding_dim = embedding_dim;
    report.block_size = block_size;
    report.class_names = class_names;
    const int k = static_cast<int>(class_names.size());
    report.confusion = confusion_matrix(prediction.labels, truth, k);

    report.per_class_recall.assign(k, std::numeric_limits<double>::quiet_NaN());
    for (int c = 0; c < k; ++c) {
        std::int64_t support = 0;
        for (int j = 0; j < k; ++j) support += report.confusion[c][j];
        if (support > 0)
            report.per_class_recall[c] =
                static_cast<double>(report.confusion[c][c]) / static_cast<double>(support);
    }

    report.positive_class = positive_class_of(task);
    if (k == 2) {
        int positive =
            report.positive_class
                ? static_cast<int>(std::find(class_names.begin(), class_names.end(),
                                             *report.positive_class) -
                                   class_names.begin())
                : 1;
        std::vector<double> scores(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i)
            scores[i] = prediction.scores(i, positive);
        auto bm = binary_metrics(report.confusion, scores, truth, positive);
        report.accuracy = bm.accuracy;
        report.f1 = bm.f1;
        report.auc = bm.auc;
    } else {
        auto mm = multiclass_metrics(report.confusion, prediction.scores, truth);
        report.accuracy = mm.accuracy;
        report.f1 = mm.macro_f1;
        report.auc = mm.macro_auc;
        report.positive_class = std::nullopt;
    }
    return report;
}

inline std::string metrics_csv_header() {
    return "task,algorithm,N,L,accuracy,f1,auc,positive_class";
}

inline std::string format_metric(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string metrics_csv_row(const MetricsReport& r) {
    std::string row = to_string(r.task) + "," + to_string(r.algorithm) + "," +
                      std::to_string(r.embedding_dim) + "," + std::to_string(r.block_size) +
                      "," + format_metric(r.accuracy) + "," + format_metric(r.f1) + "," +
                      format_metric(r.auc.or_nan()) + "," +
                      (r.positive_class ? *r.positive_class : "");
    return row;
}

inline MetricsReport report_from_json(const nlohmann::json& j);

inline nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["task"] = to_string(r.task);
    j["algorithm"] = to_string(r.algorithm);
    j["N"] = r.embedding_dim;
    j["L"] = r.block_size;
    j["accuracy"] = r.accuracy;
    j["f1"] = r.f1;
    if (r.auc.value)
        j["auc"] = *r.auc.value;
    else {
        j["auc"] = nullptr;
        j["auc_reason"] = r.auc.reason;
    }
    j["confusion"] = r.confusion;
    nlohmann::json recalls = nlohmann::json::array();
    for (double v : r.per_class_recall)
        recalls.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
    j["per_class_recall"] = std::move(recalls);
    j["class_names"] = r.class_names;
    j["positive_class"] =
        r.positive_class ? nlohmann::json(*r.positive_class) : nlohmann::json(nullptr);
    return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.task = enum_from_string<Task>(j.at("task").get<std::string>());
    r.algorithm = enum_from_string<Algorithm>(j.at("algorithm").get<std::string>());
    r.embedding_dim = j.at("N").get<int>();
    r.block_size = j.at("L").get<int>();
    r.accuracy = j.at("accuracy").get<double>();
    r.f1 = j.at("f1").get<double>();
    if (j.at("auc").is_null())
        r.auc = {std::nullopt, j.value("auc_reason", "")};
    else
        r.auc = {j.at("auc").get<double>(), ""};
    r.confusion = j.at("confusion").get<Confusion>();
    for (const auto& v : j.at("per_class_recall"))
        r.per_class_recall.push_back(v.is_null()
                                         ? std::numeric_limits<double>::quiet_NaN()
                                         : v.get<double>());
    r.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (!j.at("positive_class").is_null())
        r.positive_class = j.at("positive_class").get<std::string>();
    return r;
}

} // namespace attrsense
