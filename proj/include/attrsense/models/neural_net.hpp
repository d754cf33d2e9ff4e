#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attrsense/models/types.hpp"
#include "attrsense/random.hpp"

namespace attrsense {

namespace detail {

inline double activate(double z, Activation act) {
    return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

inline double activate_grad(double z, Activation act) {
    if (act == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    double t = std::tanh(z);
    return 1.0 - t * t;
}

/// Forward pass storing pre-activations and activations per layer.
struct NnForward {
    std::vector<std::vector<double>> pre;  // z per layer
    std::vector<std::vector<double>> post; // a per layer, post[0] = input
    std::vector<double> probs;             // softmax output
};

inline NnForward nn_forward_one(const NeuralNetState& state,
                                std::span<const double> input) {
    NnForward f;
    f.post.emplace_back(input.begin(), input.end());
    const std::size_t layers = state.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = state.weights[l];
        std::vector<double> z(w.rows());
        for (std::size_t o = 0; o < w.rows(); ++o)
            z[o] = dot(w.row(o), std::span<const double>(f.post.back())) +
                   state.biases[l][o];
        f.pre.push_back(z);
        if (l + 1 < layers) {
            std::vector<double> a(z.size());
            for (std::size_t o = 0; o < z.size(); ++o)
                a[o] = activate(z[o], state.activation);
            f.post.push_back(std::move(a));
        } else {
            double zmax = *std::max_element(z.begin(), z.end());
            f.probs.resize(z.size());
            double sum = 0.0;
            for (std::size_t o = 0; o < z.size(); ++o) {
                f.probs[o] = std::exp(z[o] - zmax);
                sum += f.probs[o];
            }
            for (double& p : f.probs) p /= sum;
        }
    }
    return f;
}

} // namespace detail

struct NeuralNetGrads {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

/// Mean softmax cross-entropy over the batch.
inline double nn_loss(const NeuralNetState& state, const Matrix& rows,
                      const std::vector<int>& labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto f = detail::nn_forward_one(state, rows.row(i));
        loss += -std::log(std::max(f.probs[labels[i]], 1e-300));
    }
    return loss / static_cast<double>(rows.rows());
}

/// Exact gradients of nn_loss by backpropagation.
inline NeuralNetGrads nn_gradients(const NeuralNetState& state, const Matrix& rows,
                                   const std::vector<int>& labels) {
    NeuralNetGrads grads;
    for (const auto& w : state.weights) grads.weights.emplace_back(w.rows(), w.cols());
    for (const auto& b : state.biases) grads.biases.emplace_back(b.size(), 0.0);

    const std::size_t layers = state.weights.size();
    const double scale = 1.0 / static_cast<double>(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto f = detail::nn_forward_one(state, rows.row(i));
        std::vector<double> delta = f.probs; // dL/dz at the output layer
        delta[labels[i]] -= 1.0;
        for (std::size_t l = layers; l-- > 0;) {
            Matrix& gw = grads.weights[l];
            const std::vector<double>& a_prev = f.post[l];
            for (std::size_t o = 0; o < gw.rows(); ++o) {
                double d = delta[o] * scale;
                grads.biases[l][o] += d;
                auto grow = gw.row(o);
                for (std::size_t j = 0; j < grow.size(); ++j)
                    grow[j] += d * a_prev[j];
            }
            if (l == 0) break;
            const Matrix& w = state.weights[l];
            std::vector<double> prev_delta(w.cols(), 0.0);
            for (std::size_t o = 0; o < w.rows(); ++o)
                axpy(delta[o], w.row(o), prev_delta);
            for (std::size_t j = 0; j < prev_delta.size(); ++j)
                prev_delta[j] *= detail::activate_grad(f.pre[l - 1][j], state.activation);
            delta = std::move(prev_delta);
        }
    }
    return grads;
}

/// He-style scaled random initialization.
inline NeuralNetState init_neural_net(int input_dim, const std::vector<int>& hidden,
                                      int num_classes, Activation activation,
                                      std::uint64_t seed) {
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("neural_net: hidden width must be >= 1");
    NeuralNetState state;
    state.activation = activation;
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(num_classes);
    Rng rng(derive_seed(seed, "nn-init"));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Matrix w(dims[l + 1], dims[l]);
        double sd = activation == Activation::relu ? std::sqrt(2.0 / dims[l])
                                                   : std::sqrt(1.0 / dims[l]);
        for (double& v : w.data()) v = rng.gaussian() * sd;
        state.weights.push_back(std::move(w));
        state.biases.emplace_back(dims[l + 1], 0.0);
    }
    return state;
}

/// Mini-batch SGD with momentum 0.9 and early stopping on a 10% validation
/// split (skipped when the split would be empty or patience is 0).
inline NeuralNetState fit_neural_net(const Matrix& rows, const std::vector<int>& labels,
                                     int num_classes, const NeuralNetParams& params,
                                     std::uint64_t seed) {
    if (params.lr <= 0.0) throw std::invalid_argument("neural_net: lr must be > 0");
    if (params.batch < 1) throw std::invalid_argument("neural_net: batch must be >= 1");
    if (params.epochs < 1) throw std::invalid_argument("neural_net: epochs must be >= 1");
    if (params.patience < 0)
        throw std::invalid_argument("neural_net: patience must be >= 0");

    const std::size_t m = rows.rows();
    NeuralNetState state = init_neural_net(static_cast<int>(rows.cols()), params.hidden,
                                           num_classes, params.activation, seed);

    Rng rng(derive_seed(seed, "nn-sgd"));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    const std::size_t val_n =
        params.patience > 0 ? static_cast<std::size_t>(0.1 * static_cast<double>(m)) : 0;
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + val_n);
    std::vector<std::size_t> train_idx(order.begin() + val_n, order.end());

    Matrix val_rows;
    std::vector<int> val_labels;
    for (std::size_t i : val_idx) {
        val_rows.append_row(rows.row(i));
        val_labels.push_back(labels[i]);
    }

    NeuralNetGrads velocity;
    for (const auto& w : state.weights) velocity.weights.emplace_back(w.rows(), w.cols());
    for (const auto& b : state.biases) velocity.biases.emplace_back(b.size(), 0.0);
    const double momentum = 0.9;

    NeuralNetState best_state = state;
    double best_val = std::numeric_limits<double>::infinity();
    int stale = 0;

    Matrix batch_rows;
    std::vector<int> batch_labels;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(train_idx);
        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(params.batch)) {
            std::size_t stop =
                std::min(train_idx.size(), start + static_cast<std::size_t>(params.batch));
            batch_rows = Matrix();
            batch_labels.clear();
            for (std::size_t bi = start; bi < stop; ++bi) {
                batch_rows.append_row(rows.row(train_idx[bi]));
                batch_labels.push_back(labels[train_idx[bi]]);
            }
            auto grads = nn_gradients(state, batch_rows, batch_labels);
            for (std::size_t l = 0; l < state.weights.size(); ++l) {
                auto& vw = velocity.weights[l].data();
                auto& gw = grads.weights[l].data();
                auto& w = state.weights[l].data();
                for (std::size_t j = 0; j < w.size(); ++j) {
                    vw[j] = momentum * vw[j] - params.lr * gw[j];
                    w[j] += vw[j];
                }
                for (std::size_t j = 0; j < state.biases[l].size(); ++j) {
                    velocity.biases[l][j] =
                        momentum * velocity.biases[l][j] - params.lr * grads.biases[l][j];
                    state.biases[l][j] += velocity.biases[l][j];
                }
            }
        }
        if (val_n > 0) {
            double val = nn_loss(state, val_rows, val_labels);
            if (val < best_val - 1e-12) {
                best_val = val;
                best_state = state;
                stale = 0;
            } else if (++stale >= params.patience) {
                return best_state;
            }
        }
    }
    return val_n > 0 ? best_state : state;
}

/// Softmax probabilities.
inline void nn_scores(const NeuralNetState& state, std::span<const double> row,
                      std::span<double> out) {
    auto f = detail::nn_forward_one(state, row);
    std::copy(f.probs.begin(), f.probs.end(), out.begin());
}

} // namespace attrsense
