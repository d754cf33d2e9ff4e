#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "attrsense/models/types.hpp"

namespace attrsense {

namespace detail {

struct StumpSearch {
    Stump stump;
    double error = std::numeric_limits<double>::infinity();
    bool found_cut = false;
};

/// Exhaustive scan over features and midpoints of adjacent distinct values,
/// minimizing the weighted misclassification error; each side predicts its
/// weighted-majority class. First minimum in scan order wins.
inline StumpSearch best_stump(const Matrix& rows, const std::vector<int>& labels,
                              const std::vector<double>& sample_weights,
                              int num_classes) {
    const std::size_t m = rows.rows();
    const std::size_t dim = rows.cols();
    StumpSearch best;

    std::vector<double> total_by_class(num_classes, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total_by_class[labels[i]] += sample_weights[i];
        total += sample_weights[i];
    }

    auto majority = [&](const std::vector<double>& by_class) {
        int arg = 0;
        for (int c = 1; c < num_classes; ++c)
            if (by_class[c] > by_class[arg]) arg = c;
        return arg;
    };

    std::vector<std::size_t> order(m);
    std::vector<double> left_by_class(num_classes);
    for (std::size_t f = 0; f < dim; ++f) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rows(a, f) < rows(b, f);
        });
        std::fill(left_by_class.begin(), left_by_class.end(), 0.0);
        double left_total = 0.0;
        for (std::size_t pos = 0; pos + 1 < m; ++pos) {
            std::size_t i = order[pos];
            left_by_class[labels[i]] += sample_weights[i];
            left_total += sample_weights[i];
            double lo = rows(i, f);
            double hi = rows(order[pos + 1], f);
            if (lo == hi) continue;
            int left_label = majority(left_by_class);
            double right_best = 0.0;
            int right_label = 0;
            for (int c = 0; c < num_classes; ++c) {
                double w = total_by_class[c] - left_by_class[c];
                if (w > right_best) {
                    right_best = w;
                    right_label = c;
                }
            }
            double error = (left_total - left_by_class[left_label]) +
                           ((total - left_total) - right_best);
            if (error < best.error) {
                best.error = error;
                best.found_cut = true;
                best.stump = Stump{static_cast<int>(f), 0.5 * (lo + hi), left_label,
                                   right_label};
            }
        }
    }
    if (!best.found_cut) {
        // Every feature is constant: fall back to a constant predictor.
        int label = majority(total_by_class);
        best.stump = Stump{0, -std::numeric_limits<double>::infinity(), label, label};
        best.error = total - total_by_class[label];
    }
    return best;
}

} // namespace detail

/// SAMME multiclass boosting over depth-1 stumps. Round weight is
/// alpha = ln((1-eps)/eps) + ln(K-1); boosting stops early when the stump
/// error reaches chance level (eps >= 1 - 1/K) or the data is fit (eps = 0).
inline AdaBoostState fit_adaboost(const Matrix& rows, const std::vector<int>& labels,
                                  int num_classes, const AdaBoostParams& params) {
    if (params.rounds < 1) throw std::invalid_argument("adaboost: rounds must be >= 1");
    const std::size_t m = rows.rows();
    AdaBoostState state;
    std::vector<double> weights(m, 1.0 / static_cast<double>(m));
    const double chance = 1.0 - 1.0 / num_classes;
    const double eps_floor = 1e-12;

    for (int round = 0; round < params.rounds; ++round) {
        auto search = detail::best_stump(rows, labels, weights, num_classes);
        double eps = std::min(std::max(search.error, 0.0), 1.0);
        if (eps >= chance && !state.stumps.empty()) break;
        double clamped = std::clamp(eps, eps_floor, 1.0 - eps_floor);
        double alpha = std::log((1.0 - clamped) / clamped) + std::log(num_classes - 1.0);
        if (eps >= chance) alpha = std::max(alpha, eps_floor); // degenerate data
        state.stumps.push_back(search.stump);
        state.alphas.push_back(alpha);
        state.epsilons.push_back(eps);
        if (eps <= 0.0 || eps >= chance) break;

        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (stump_predict(search.stump, rows.row(i)) != labels[i])
                weights[i] *= std::exp(alpha);
            norm += weights[i];
        }
        for (double& w : weights) w /= norm;
    }
    return state;
}

/// Alpha-weighted vote fractions.
inline void adaboost_scores(const AdaBoostState& state, std::span<const double> row,
                            std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < state.stumps.size(); ++t) {
        out[stump_predict(state.stumps[t], row)] += state.alphas[t];
        total += state.alphas[t];
    }
    if (total > 0.0)
        for (double& s : out) s /= total;
}

} // namespace attrsense
