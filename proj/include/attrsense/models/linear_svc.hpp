#pragma once

#include <numeric>

#include "attrsense/models/types.hpp"
#include "attrsense/random.hpp"
#include "attrsense/vectorize.hpp"

namespace attrsense {

/// L2-regularized hinge loss minimized by Pegasos-style SGD, one machine per
/// class (one-vs-rest). C maps to lambda = 1/(C*M); the bias is unregularized.
/// Expects standardized features (the caller owns the Standardizer).
inline SvcState fit_linear_svc(const Matrix& rows, const std::vector<int>& labels,
                               int num_classes, const SvcParams& params,
                               std::uint64_t seed) {
    if (params.C <= 0.0) throw std::invalid_argument("linear_svc: C must be > 0");
    if (params.epochs < 1) throw std::invalid_argument("linear_svc: epochs must be >= 1");
    const std::size_t m = rows.rows();
    const std::size_t dim = rows.cols();
    const double lambda = 1.0 / (params.C * static_cast<double>(m));

    SvcState state;
    state.weights = Matrix(num_classes, dim);
    state.bias.assign(num_classes, 0.0);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "svc-shuffle"));

    std::vector<std::vector<double>> w(num_classes, std::vector<double>(dim, 0.0));
    long long step = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++step;
            const double eta = 1.0 / (lambda * static_cast<double>(step));
            const double shrink = 1.0 - eta * lambda; // = 1 - 1/step
            auto x = rows.row(i);
            for (int k = 0; k < num_classes; ++k) {
                const double y = labels[i] == k ? 1.0 : -1.0;
                double margin = y * (dot(std::span<const double>(w[k]), x) + state.bias[k]);
                for (double& v : w[k]) v *= shrink;
                if (margin < 1.0) {
                    axpy(eta * y, x, w[k]);
                    state.bias[k] += eta * y;
                }
            }
        }
    }
    for (int k = 0; k < num_classes; ++k)
        for (std::size_t j = 0; j < dim; ++j) state.weights(k, j) = w[k][j];
    return state;
}

/// Signed one-vs-rest margins.
inline void svc_scores(const SvcState& state, std::span<const double> row,
                       std::span<double> out) {
    for (std::size_t k = 0; k < state.bias.size(); ++k)
        out[k] = dot(state.weights.row(k), row) + state.bias[k];
}

} // namespace attrsense
