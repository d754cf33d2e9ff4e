#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "attrsense/common.hpp"
#include "attrsense/standardize.hpp"

namespace attrsense {

struct SvcParams {
    double C = 1.0;
    int epochs = 50;
};

struct KnnParams {
    int k = 5; // odd
};

struct AdaBoostParams {
    int rounds = 50;
};

struct RandomForestParams {
    int trees = 100;
    int max_depth = 0; // 0 = unlimited
    int min_samples_leaf = 1;
    bool bootstrap = true;
};

enum class Activation { relu, tanh };

struct NeuralNetParams {
    std::vector<int> hidden = {128, 64};
    Activation activation = Activation::relu;
    double lr = 0.05;
    int batch = 32;
    int epochs = 100;
    int patience = 10; // epochs without validation improvement; 0 disables
};

using ModelParams =
    std::variant<SvcParams, KnnParams, AdaBoostParams, RandomForestParams, NeuralNetParams>;

inline Algorithm algorithm_of(const ModelParams& params) {
    switch (params.index()) {
        case 0: return Algorithm::linear_svc;
        case 1: return Algorithm::knn;
        case 2: return Algorithm::adaboost;
        case 3: return Algorithm::random_forest;
        default: return Algorithm::neural_net;
    }
}

inline ModelParams default_params(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::linear_svc: return SvcParams{};
        case Algorithm::knn: return KnnParams{};
        case Algorithm::adaboost: return AdaBoostParams{};
        case Algorithm::random_forest: return RandomForestParams{};
        case Algorithm::neural_net: return NeuralNetParams{};
    }
    throw std::invalid_argument("default_params: bad algorithm");
}

// --- learned state per family ---

struct SvcState {
    Matrix weights;            // K x N, one-vs-rest
    std::vector<double> bias;  // K
};

struct KnnState {
    Matrix rows; // standardized training rows
    std::vector<int> labels;
};

struct Stump {
    int feature = 0;
    double threshold = 0.0; // x[feature] < threshold goes left
    int left_label = 0;
    int right_label = 0;
};

inline int stump_predict(const Stump& stump, std::span<const double> row) {
    return row[stump.feature] < stump.threshold ? stump.left_label : stump.right_label;
}

struct AdaBoostState {
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    std::vector<double> epsilons; // weighted error per kept round
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> row) const {
        int at = 0;
        while (nodes[at].feature >= 0)
            at = row[nodes[at].feature] < nodes[at].threshold ? nodes[at].left
                                                              : nodes[at].right;
        return nodes[at].label;
    }
};

struct RandomForestState {
    std::vector<DecisionTree> trees;
};

struct NeuralNetState {
    std::vector<Matrix> weights;             // layer l: out x in
    std::vector<std::vector<double>> biases; // layer l: out
    Activation activation = Activation::relu;
};

using ModelState =
    std::variant<SvcState, KnnState, AdaBoostState, RandomForestState, NeuralNetState>;

struct TrainedModel {
    Algorithm algorithm = Algorithm::linear_svc;
    ModelParams params;
    std::vector<std::string> class_names;
    int dim = 0;
    std::uint64_t seed = 0;
    std::optional<Standardizer> standardizer; // svc, knn, neural net
    ModelState state;
};

struct Prediction {
    std::vector<int> labels;
    Matrix scores; // rows x classes, suitable for ROC ranking
};

/// argmax with ties to the lowest class id.
inline int argmax_label(std::span<const double> scores) {
    int best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = static_cast<int>(k);
    return best;
}

} // namespace attrsense
