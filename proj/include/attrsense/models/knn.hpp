#pragma once

#include <algorithm>

#include "attrsense/models/types.hpp"

namespace attrsense {

inline KnnState fit_knn(const Matrix& rows, const std::vector<int>& labels,
                        const KnnParams& params) {
    if (params.k < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (params.k % 2 == 0) throw std::invalid_argument("knn: k must be odd");
    if (static_cast<std::size_t>(params.k) > rows.rows())
        throw std::invalid_argument("knn: k exceeds the training-set size");
    return KnnState{rows, labels};
}

/// Majority vote among the k nearest rows by Euclidean distance. Distance
/// ties go to the lower row index; vote ties to the label of the nearest
/// neighbor holding a tied label. Scores are vote fractions with a tiny
/// rank bonus so argmax reproduces the tie-break.
inline void knn_scores(const KnnState& state, int k, int num_classes,
                       std::span<const double> row, std::span<double> out) {
    const std::size_t m = state.rows.rows();
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto train_row = state.rows.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < train_row.size(); ++j) {
            double c = train_row[j] - row[j];
            d2 += c * c;
        }
        dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<int> votes(num_classes, 0);
    std::vector<int> first_pos(num_classes, k);
    for (int r = 0; r < k; ++r) {
        int label = state.labels[dist[r].second];
        ++votes[label];
        if (first_pos[label] == k) first_pos[label] = r;
    }
    for (int c = 0; c < num_classes; ++c)
        out[c] = static_cast<double>(votes[c]) / k +
                 1e-9 * static_cast<double>(k - first_pos[c]) / (k + 1);
}

} // namespace attrsense
