#pragma once

#include <fstream>
#include <set>

#include <json.hpp>

#include "attrsense/models/adaboost.hpp"
#include "attrsense/models/knn.hpp"
#include "attrsense/models/linear_svc.hpp"
#include "attrsense/models/neural_net.hpp"
#include "attrsense/models/random_forest.hpp"
#include "attrsense/models/types.hpp"
#include "attrsense/vectorize.hpp"

namespace attrsense {

inline bool uses_standardizer(Algorithm algorithm) {
    return algorithm == Algorithm::linear_svc || algorithm == Algorithm::knn ||
           algorithm == Algorithm::neural_net;
}

/// Trains one model on a task dataset. Margin- and distance-based families
/// (SVC, k-NN, neural net) see standardized features; trees and boosting
/// consume raw features.
inline TrainedModel train_model(const TaskDataset& dataset, const ModelParams& params,
                                std::uint64_t seed, int threads = 1) {
    if (dataset.size() == 0) throw std::invalid_argument("train_model: empty dataset");
    std::set<int> distinct(dataset.labels.begin(), dataset.labels.end());
    if (distinct.size() < 2)
        throw std::invalid_argument("train_model: dataset has a single class");
    const int num_classes = static_cast<int>(dataset.class_names.size());

    TrainedModel model;
    model.algorithm = algorithm_of(params);
    model.params = params;
    model.class_names = dataset.class_names;
    model.dim = static_cast<int>(dataset.rows.cols());
    model.seed = seed;

    const Matrix* features = &dataset.rows;
    Matrix standardized;
    if (uses_standardizer(model.algorithm)) {
        model.standardizer = Standardizer::fit(dataset.rows);
        standardized = model.standardizer->transform(dataset.rows);
        features = &standardized;
    }

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, SvcParams>) {
                model.state = fit_linear_svc(*features, dataset.labels, num_classes, p, seed);
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                model.state = fit_knn(*features, dataset.labels, p);
            } else if constexpr (std::is_same_v<P, AdaBoostParams>) {
                model.state = fit_adaboost(*features, dataset.labels, num_classes, p);
            } else if constexpr (std::is_same_v<P, RandomForestParams>) {
                model.state =
                    fit_random_forest(*features, dataset.labels, num_classes, p, seed, threads);
            } else {
                model.state = fit_neural_net(*features, dataset.labels, num_classes, p, seed);
            }
        },
        params);
    return model;
}

inline Prediction predict(const TrainedModel& model, const Matrix& rows) {
    const int num_classes = static_cast<int>(model.class_names.size());
    Prediction out;
    out.scores = Matrix(rows.rows(), num_classes);
    if (rows.rows() == 0) return out;
    if (static_cast<int>(rows.cols()) != model.dim)
        throw std::invalid_argument("predict: row dimension " + std::to_string(rows.cols()) +
                                    " does not match model dimension " +
                                    std::to_string(model.dim));
    Matrix transformed;
    const Matrix* features = &rows;
    if (model.standardizer) {
        transformed = model.standardizer->transform(rows);
        features = &transformed;
    }
    out.labels.resize(rows.rows());
    for (std::size_t i = 0; i < features->rows(); ++i) {
        auto row = features->row(i);
        auto scores = out.scores.row(i);
        std::visit(
            [&](const auto& state) {
                using S = std::decay_t<decltype(state)>;
                if constexpr (std::is_same_v<S, SvcState>) {
                    svc_scores(state, row, scores);
                } else if constexpr (std::is_same_v<S, KnnState>) {
                    knn_scores(state, std::get<KnnParams>(model.params).k, num_classes,
                               row, scores);
                } else if constexpr (std::is_same_v<S, AdaBoostState>) {
                    adaboost_scores(state, row, scores);
                } else if constexpr (std::is_same_v<S, RandomForestState>) {
                    forest_scores(state, row, scores);
                } else {
                    nn_scores(state, row, scores);
                }
            },
            model.state);
        out.labels[i] = argmax_label(scores);
    }
    return out;
}

/// Column of scores for one class, e.g. the task's positive class.
inline std::vector<double> class_scores(const Prediction& prediction, int class_id) {
    std::vector<double> out(prediction.scores.rows());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = prediction.scores(i, class_id);
    return out;
}

// --- serialization ---

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data() = j.at("data").get<std::vector<double>>();
    if (m.data().size() != m.rows() * m.cols())
        throw input_error("model file: matrix size mismatch");
    return m;
}

} // namespace detail

inline nlohmann::json params_to_json(const ModelParams& params) {
    nlohmann::json j;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, SvcParams>) {
                j = {{"C", p.C}, {"epochs", p.epochs}};
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                j = {{"k", p.k}};
            } else if constexpr (std::is_same_v<P, AdaBoostParams>) {
                j = {{"rounds", p.rounds}};
            } else if constexpr (std::is_same_v<P, RandomForestParams>) {
                j = {{"trees", p.trees},
                     {"max_depth", p.max_depth},
                     {"min_samples_leaf", p.min_samples_leaf},
                     {"bootstrap", p.bootstrap}};
            } else {
                j = {{"hidden", p.hidden},
                     {"activation", p.activation == Activation::relu ? "relu" : "tanh"},
                     {"lr", p.lr},
                     {"batch", p.batch},
                     {"epochs", p.epochs},
                     {"patience", p.patience}};
            }
        },
        params);
    return j;
}

inline ModelParams params_from_json(Algorithm algorithm, const nlohmann::json& j) {
    switch (algorithm) {
        case Algorithm::linear_svc: {
            SvcParams p;
            p.C = j.value("C", p.C);
            p.epochs = j.value("epochs", p.epochs);
            return p;
        }
        case Algorithm::knn: {
            KnnParams p;
            p.k = j.value("k", p.k);
            return p;
        }
        case Algorithm::adaboost: {
            AdaBoostParams p;
            p.rounds = j.value("rounds", p.rounds);
            return p;
        }
        case Algorithm::random_forest: {
            RandomForestParams p;
            p.trees = j.value("trees", p.trees);
            p.max_depth = j.value("max_depth", p.max_depth);
            p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
            p.bootstrap = j.value("bootstrap", p.bootstrap);
            return p;
        }
        case Algorithm::neural_net: {
            NeuralNetParams p;
            p.hidden = j.value("hidden", p.hidden);
            p.activation = j.value("activation", "relu") == std::string("tanh")
                               ? Activation::tanh
                               : Activation::relu;
            p.lr = j.value("lr", p.lr);
            p.batch = j.value("batch", p.batch);
            p.epochs = j.value("epochs", p.epochs);
            p.patience = j.value("patience", p.patience);
            return p;
        }
    }
    throw input_error("params_from_json: bad algorithm");
}

inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["algorithm"] = to_string(model.algorithm);
    j["params"] = params_to_json(model.params);
    j["class_names"] = model.class_names;
    j["dim"] = model.dim;
    j["seed"] = model.seed;
    if (model.standardizer)
        j["standardizer"] = {{"mean", model.standardizer->mean},
                             {"scale", model.standardizer->scale}};
    else
        j["standardizer"] = nullptr;

    nlohmann::json s;
    std::visit(
        [&](const auto& state) {
            using S = std::decay_t<decltype(state)>;
            if constexpr (std::is_same_v<S, SvcState>) {
                s = {{"weights", detail::matrix_to_json(state.weights)},
                     {"bias", state.bias}};
            } else if constexpr (std::is_same_v<S, KnnState>) {
                s = {{"rows", detail::matrix_to_json(state.rows)},
                     {"labels", state.labels}};
            } else if constexpr (std::is_same_v<S, AdaBoostState>) {
                nlohmann::json stumps = nlohmann::json::array();
                for (const auto& st : state.stumps)
                    stumps.push_back({{"feature", st.feature},
                                      {"threshold", st.threshold},
                                      {"left", st.left_label},
                                      {"right", st.right_label}});
                s = {{"stumps", stumps},
                     {"alphas", state.alphas},
                     {"epsilons", state.epsilons}};
            } else if constexpr (std::is_same_v<S, RandomForestState>) {
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& tree : state.trees) {
                    nlohmann::json nodes = nlohmann::json::array();
                    for (const auto& n : tree.nodes)
                        nodes.push_back({{"feature", n.feature},
                                         {"threshold", n.threshold},
                                         {"left", n.left},
                                         {"right", n.right},
                                         {"label", n.label}});
                    trees.push_back(std::move(nodes));
                }
                s = {{"trees", trees}};
            } else {
                nlohmann::json weights = nlohmann::json::array();
                for (const auto& w : state.weights)
                    weights.push_back(detail::matrix_to_json(w));
                s = {{"weights", weights},
                     {"biases", state.biases},
                     {"activation",
                      state.activation == Activation::relu ? "relu" : "tanh"}};
            }
        },
        model.state);
    j["state"] = std::move(s);
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != 1)
        throw input_error("model file: unsupported format_version");
    TrainedModel model;
    model.algorithm = enum_from_string<Algorithm>(j.at("algorithm").get<std::string>());
    model.params = params_from_json(model.algorithm, j.at("params"));
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.dim = j.at("dim").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("standardizer").is_null()) {
        Standardizer s;
        s.mean = j["standardizer"].at("mean").get<std::vector<double>>();
        s.scale = j["standardizer"].at("scale").get<std::vector<double>>();
        model.standardizer = std::move(s);
    }
    const nlohmann::json& s = j.at("state");
    switch (model.algorithm) {
        case Algorithm::linear_svc: {
            SvcState state;
            state.weights = detail::matrix_from_json(s.at("weights"));
            state.bias = s.at("bias").get<std::vector<double>>();
            model.state = std::move(state);
            break;
        }
        case Algorithm::knn: {
            KnnState state;
            state.rows = detail::matrix_from_json(s.at("rows"));
            state.labels = s.at("labels").get<std::vector<int>>();
            model.state = std::move(state);
            break;
        }
        case Algorithm::adaboost: {
            AdaBoostState state;
            for (const auto& st : s.at("stumps"))
                state.stumps.push_back(Stump{st.at("feature").get<int>(),
                                             st.at("threshold").get<double>(),
                                             st.at("left").get<int>(),
                                             st.at("right").get<int>()});
            state.alphas = s.at("alphas").get<std::vector<double>>();
            state.epsilons = s.at("epsilons").get<std::vector<double>>();
            model.state = std::move(state);
            break;
        }
        case Algorithm::random_forest: {
            RandomForestState state;
            for (const auto& tj : s.at("trees")) {
                DecisionTree tree;
                for (const auto& nj : tj)
                    tree.nodes.push_back(TreeNode{nj.at("feature").get<int>(),
                                                  nj.at("threshold").get<double>(),
                                                  nj.at("left").get<int>(),
                                                  nj.at("right").get<int>(),
                                                  nj.at("label").get<int>()});
                state.trees.push_back(std::move(tree));
            }
            model.state = std::move(state);
            break;
        }
        case Algorithm::neural_net: {
            NeuralNetState state;
            for (const auto& wj : s.at("weights"))
                state.weights.push_back(detail::matrix_from_json(wj));
            state.biases = s.at("biases").get<std::vector<std::vector<double>>>();
            state.activation = s.at("activation").get<std::string>() == "tanh"
                                   ? Activation::tanh
                                   : Activation::relu;
            model.state = std::move(state);
            break;
        }
    }
    return model;
}

inline void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << '\n';
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open model file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed model file: " + path);
    return model_from_json(j);
}

} // namespace attrsense
