#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "attrsense/models.hpp"
#include "attrsense/synthetic.hpp"
#include "helpers.hpp"

using namespace attrsense;

namespace {

TaskDataset two_point_dataset() {
    TaskDataset ds;
    ds.task = Task::gender;
    ds.class_names = {"A", "B"};
    ds.rows.append_row(std::vector<double>{-1.0, 0.0});
    ds.rows.append_row(std::vector<double>{1.0, 0.0});
    ds.labels = {0, 1};
    ds.groups = {"u0", "u1"};
    return ds;
}

double training_accuracy(const TrainedModel& model, const TaskDataset& ds) {
    auto pred = predict(model, ds.rows);
    int hits = 0;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (pred.labels[i] == ds.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ds.labels.size());
}

Matrix single_row(std::vector<double> v) {
    Matrix m;
    m.append_row(v);
    return m;
}

TaskDataset random_dataset(Rng& rng, int rows, int dim, int classes) {
    TaskDataset ds;
    ds.task = Task::occupation;
    for (int c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    std::vector<double> row(dim);
    for (int i = 0; i < rows; ++i) {
        for (double& v : row) v = rng.uniform(-1, 1);
        ds.rows.append_row(row);
        ds.labels.push_back(i < classes ? i : static_cast<int>(rng.below(classes)));
        ds.groups.push_back("u" + std::to_string(i));
    }
    return ds;
}

} // namespace

TEST_CASE("linear SVC separates a trivial pair") {
    auto ds = two_point_dataset();
    auto model = train_model(ds, SvcParams{1.0, 100}, 7);
    CHECK(training_accuracy(model, ds) == 1.0);
    CHECK(predict(model, single_row({-0.1, 0.0})).labels[0] == 0);
    CHECK(predict(model, single_row({0.1, 0.0})).labels[0] == 1);
}

TEST_CASE("linear SVC cannot fit XOR") {
    auto ds = make_xor();
    auto model = train_model(ds, SvcParams{1.0, 200}, 3);
    CHECK(training_accuracy(model, ds) <= 0.75);
}

TEST_CASE("linear SVC reaches Bayes-level accuracy on separated blobs") {
    auto train = make_blobs(100, 5, 4.0, 21);
    auto test = make_blobs(100, 5, 4.0, 22);
    auto model = train_model(train, SvcParams{1.0, 50}, 5);
    CHECK(training_accuracy(model, test) >= 0.95);
}

TEST_CASE("linear SVC is shift invariant through the standardizer") {
    auto train = make_blobs(50, 3, 4.0, 31);
    auto shifted = train;
    for (std::size_t i = 0; i < shifted.rows.rows(); ++i)
        for (std::size_t j = 0; j < shifted.rows.cols(); ++j)
            shifted.rows(i, j) += 100.0;
    auto m1 = train_model(train, SvcParams{}, 9);
    auto m2 = train_model(shifted, SvcParams{}, 9);

    auto probe = make_blobs(30, 3, 4.0, 32);
    auto shifted_probe = probe;
    for (std::size_t i = 0; i < shifted_probe.rows.rows(); ++i)
        for (std::size_t j = 0; j < shifted_probe.rows.cols(); ++j)
            shifted_probe.rows(i, j) += 100.0;
    CHECK(predict(m1, probe.rows).labels == predict(m2, shifted_probe.rows).labels);
}

TEST_CASE("training rejects single-class datasets") {
    TaskDataset ds;
    ds.class_names = {"A", "B"};
    ds.rows.append_row(std::vector<double>{1.0});
    ds.rows.append_row(std::vector<double>{2.0});
    ds.labels = {0, 0};
    ds.groups = {"u", "u"};
    CHECK_THROWS_AS(train_model(ds, SvcParams{}, 1), std::invalid_argument);
}

TEST_CASE("knn recalls exact training rows at k=1") {
    auto ds = make_blobs(50, 4, 1.0, 41);
    auto model = train_model(ds, KnnParams{1}, 1);
    CHECK(training_accuracy(model, ds) == 1.0);
}

TEST_CASE("knn majority vote with k=3") {
    TaskDataset ds;
    ds.class_names = {"A", "B"};
    ds.rows.append_row(std::vector<double>{0.0});
    ds.rows.append_row(std::vector<double>{0.2});
    ds.rows.append_row(std::vector<double>{0.4});
    ds.rows.append_row(std::vector<double>{10.0});
    ds.labels = {0, 0, 1, 1};
    ds.groups = {"a", "b", "c", "d"};
    auto model = train_model(ds, KnnParams{3}, 1);
    // Neighbors of 0.1: rows 0 (A), 1 (A), 2 (B) -> majority A.
    CHECK(predict(model, single_row({0.1})).labels[0] == 0);
}

TEST_CASE("knn k=1 returns the nearest row's label") {
    TaskDataset ds;
    ds.class_names = {"A", "B", "C"};
    ds.rows.append_row(std::vector<double>{1.0});
    ds.rows.append_row(std::vector<double>{2.0});
    ds.rows.append_row(std::vector<double>{3.0});
    ds.labels = {1, 1, 2};
    ds.groups = {"a", "b", "c"};
    auto model = train_model(ds, KnnParams{1}, 1);
    CHECK(predict(model, single_row({2.9})).labels[0] == 2);
}

TEST_CASE("knn rejects k larger than the training set and even k") {
    auto ds = two_point_dataset();
    CHECK_THROWS_AS(train_model(ds, KnnParams{3}, 1), std::invalid_argument);
    auto blobs = make_blobs(10, 2, 1.0, 5);
    CHECK_THROWS_AS(train_model(blobs, KnnParams{4}, 1), std::invalid_argument);
}

TEST_CASE("adaboost solves threshold-separable data in one round") {
    TaskDataset ds;
    ds.class_names = {"A", "B"};
    for (int i = 0; i < 10; ++i) {
        ds.rows.append_row(std::vector<double>{static_cast<double>(i)});
        ds.labels.push_back(i < 5 ? 0 : 1);
        ds.groups.push_back("u" + std::to_string(i));
    }
    auto model = train_model(ds, AdaBoostParams{10}, 1);
    const auto& state = std::get<AdaBoostState>(model.state);
    CHECK(state.stumps.size() == 1);
    CHECK(state.epsilons[0] == 0.0);
    CHECK(training_accuracy(model, ds) == 1.0);
}

TEST_CASE("adaboost round errors stay below chance while boosting continues") {
    auto ds = make_blobs(40, 3, 1.5, 77);
    auto model = train_model(ds, AdaBoostParams{30}, 2);
    const auto& state = std::get<AdaBoostState>(model.state);
    REQUIRE(!state.epsilons.empty());
    for (std::size_t t = 0; t + 1 < state.epsilons.size(); ++t)
        CHECK(state.epsilons[t] < 0.5); // K=2 chance level
}

TEST_CASE("adaboost training error respects the classical bound") {
    auto ds = make_blobs(25, 2, 2.0, 13); // 50 samples, binary
    auto model = train_model(ds, AdaBoostParams{20}, 4);
    const auto& state = std::get<AdaBoostState>(model.state);
    REQUIRE(!state.stumps.empty());

    double bound = 1.0;
    std::vector<double> votes(2);
    for (std::size_t t = 0; t < state.stumps.size(); ++t) {
        double eps = std::clamp(state.epsilons[t], 1e-12, 1.0 - 1e-12);
        bound *= 2.0 * std::sqrt(eps * (1.0 - eps));
        // Staged training error of the first t+1 stumps.
        int errors = 0;
        for (std::size_t i = 0; i < ds.rows.rows(); ++i) {
            std::fill(votes.begin(), votes.end(), 0.0);
            for (std::size_t s = 0; s <= t; ++s)
                votes[stump_predict(state.stumps[s], ds.rows.row(i))] += state.alphas[s];
            int label = votes[1] > votes[0] ? 1 : 0;
            if (label != ds.labels[i]) ++errors;
        }
        double staged = static_cast<double>(errors) / static_cast<double>(ds.rows.rows());
        CHECK(staged <= bound + 1e-12);
    }
}

TEST_CASE("adaboost staged error is non-increasing on separable data") {
    auto ds = make_blobs(30, 2, 6.0, 19);
    auto model = train_model(ds, AdaBoostParams{15}, 6);
    const auto& state = std::get<AdaBoostState>(model.state);
    std::vector<double> votes(2);
    double prev = 1.0;
    for (std::size_t t = 0; t < state.stumps.size(); ++t) {
        int errors = 0;
        for (std::size_t i = 0; i < ds.rows.rows(); ++i) {
            std::fill(votes.begin(), votes.end(), 0.0);
            for (std::size_t s = 0; s <= t; ++s)
                votes[stump_predict(state.stumps[s], ds.rows.row(i))] += state.alphas[s];
            if ((votes[1] > votes[0] ? 1 : 0) != ds.labels[i]) ++errors;
        }
        double staged = static_cast<double>(errors) / static_cast<double>(ds.rows.rows());
        CHECK(staged <= prev + 1e-12);
        prev = staged;
    }
}

TEST_CASE("adaboost handles identical rows with mixed labels") {
    TaskDataset ds;
    ds.class_names = {"A", "B"};
    for (int i = 0; i < 10; ++i) {
        ds.rows.append_row(std::vector<double>{1.0});
        ds.labels.push_back(i < 6 ? 0 : 1);
        ds.groups.push_back("u" + std::to_string(i));
    }
    auto model = train_model(ds, AdaBoostParams{5}, 1);
    CHECK(training_accuracy(model, ds) == 0.6); // noise floor = majority share
}

TEST_CASE("a single unbounded tree memorizes distinct rows") {
    Rng rng(55);
    auto ds = random_dataset(rng, 60, 4, 3);
    RandomForestParams params;
    params.trees = 1;
    params.bootstrap = false;
    auto model = train_model(ds, params, 8);
    CHECK(training_accuracy(model, ds) == 1.0);
}

TEST_CASE("random forest is deterministic for a fixed seed") {
    auto ds = make_blobs(40, 3, 2.0, 61);
    auto test = make_blobs(20, 3, 2.0, 62);
    auto m1 = train_model(ds, RandomForestParams{25}, 17);
    auto m2 = train_model(ds, RandomForestParams{25}, 17);
    CHECK(model_to_json(m1) == model_to_json(m2));
    CHECK(predict(m1, test.rows).labels == predict(m2, test.rows).labels);
    // Same seed, parallel tree construction: identical forest.
    auto m3 = train_model(ds, RandomForestParams{25}, 17, 2);
    CHECK(model_to_json(m1) == model_to_json(m3));
}

TEST_CASE("random forest reaches Bayes-level accuracy on separated blobs") {
    auto train = make_blobs(100, 5, 4.0, 23);
    auto test = make_blobs(100, 5, 4.0, 24);
    auto model = train_model(train, RandomForestParams{60}, 5);
    CHECK(training_accuracy(model, test) >= 0.95);
}

TEST_CASE("forest vote fractions sum to one over the trees") {
    auto ds = make_blobs(30, 3, 1.0, 71);
    RandomForestParams params;
    params.trees = 37;
    auto model = train_model(ds, params, 3);
    auto pred = predict(model, ds.rows);
    for (std::size_t i = 0; i < pred.scores.rows(); ++i) {
        double votes = 0.0;
        for (std::size_t c = 0; c < pred.scores.cols(); ++c) {
            double v = pred.scores(i, c) * params.trees;
            CHECK(std::abs(v - std::round(v)) < 1e-9);
            votes += v;
        }
        CHECK(std::lround(votes) == params.trees);
    }
}

TEST_CASE("neural net fits XOR with one hidden layer") {
    auto ds = make_xor();
    NeuralNetParams params;
    params.hidden = {8};
    params.activation = Activation::tanh;
    params.lr = 0.3;
    params.batch = 4;
    params.epochs = 3000;
    params.patience = 0;
    auto model = train_model(ds, params, 2);
    CHECK(training_accuracy(model, ds) == 1.0);
}

TEST_CASE("neural net gradients match finite differences") {
    NeuralNetState state = init_neural_net(5, {8}, 3, Activation::tanh, 11);
    Rng rng(12);
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> row(5);
        for (double& v : row) v = rng.uniform(-1, 1);
        x.append_row(row);
        y.push_back(static_cast<int>(rng.below(3)));
    }
    auto analytic = nn_gradients(state, x, y);
    const double h = 1e-5;
    double worst = 0.0;
    auto probe = [&](double& slot, double expected) {
        double keep = slot;
        slot = keep + h;
        double hi = nn_loss(state, x, y);
        slot = keep - h;
        double lo = nn_loss(state, x, y);
        slot = keep;
        double fd = (hi - lo) / (2 * h);
        double rel =
            std::abs(fd - expected) / std::max({std::abs(fd), std::abs(expected), 1e-8});
        worst = std::max(worst, rel);
    };
    for (std::size_t l = 0; l < state.weights.size(); ++l) {
        for (std::size_t j = 0; j < state.weights[l].data().size(); ++j)
            probe(state.weights[l].data()[j], analytic.weights[l].data()[j]);
        for (std::size_t j = 0; j < state.biases[l].size(); ++j)
            probe(state.biases[l][j], analytic.biases[l][j]);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("a zero-hidden-layer net behaves like logistic regression on blobs") {
    auto train = make_blobs(100, 5, 4.0, 25);
    auto test = make_blobs(100, 5, 4.0, 26);
    NeuralNetParams params;
    params.hidden = {};
    params.lr = 0.1;
    params.epochs = 60;
    auto model = train_model(train, params, 5);
    CHECK(training_accuracy(model, test) >= 0.95);
}

TEST_CASE("neural net scores are softmax probabilities") {
    auto ds = make_blobs(20, 3, 2.0, 81);
    NeuralNetParams params;
    params.hidden = {6};
    params.epochs = 10;
    auto model = train_model(ds, params, 1);
    auto pred = predict(model, ds.rows);
    for (std::size_t i = 0; i < pred.scores.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < pred.scores.cols(); ++c) {
            CHECK(pred.scores(i, c) >= 0.0);
            sum += pred.scores(i, c);
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("neural net rejects zero hidden widths") {
    auto ds = make_blobs(10, 2, 2.0, 91);
    NeuralNetParams params;
    params.hidden = {8, 0};
    CHECK_THROWS_AS(train_model(ds, params, 1), std::invalid_argument);
}

TEST_CASE("predict on an empty row list returns empty outputs") {
    auto ds = make_blobs(10, 3, 2.0, 14);
    auto model = train_model(ds, KnnParams{3}, 1);
    Matrix empty;
    auto pred = predict(model, empty);
    CHECK(pred.labels.empty());
    CHECK(pred.scores.rows() == 0);
}

TEST_CASE("predict rejects dimension mismatches") {
    auto ds = make_blobs(10, 3, 2.0, 15);
    auto model = train_model(ds, SvcParams{}, 1);
    CHECK_THROWS_AS(predict(model, single_row({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("every family is deterministic and argmax-consistent") {
    Rng rng(101);
    auto ds = random_dataset(rng, 50, 4, 3);
    auto probe = random_dataset(rng, 20, 4, 3);
    std::vector<ModelParams> all = {SvcParams{1.0, 20}, KnnParams{3}, AdaBoostParams{10},
                                    RandomForestParams{15},
                                    NeuralNetParams{{8}, Activation::relu, 0.05, 16, 15, 0}};
    for (const auto& params : all) {
        auto m1 = train_model(ds, params, 33);
        auto m2 = train_model(ds, params, 33);
        auto p1 = predict(m1, probe.rows);
        auto p2 = predict(m2, probe.rows);
        CHECK(p1.labels == p2.labels);
        CHECK(p1.scores == p2.scores);
        for (std::size_t i = 0; i < p1.labels.size(); ++i)
            CHECK(p1.labels[i] == argmax_label(p1.scores.row(i)));
    }
}

TEST_CASE("model serialization round-trips predictions exactly") {
    Rng rng(202);
    auto ds = random_dataset(rng, 40, 3, 3);
    auto probe = random_dataset(rng, 15, 3, 3);
    auto dir = testutil::temp_dir();
    std::vector<ModelParams> all = {SvcParams{1.0, 20}, KnnParams{3}, AdaBoostParams{10},
                                    RandomForestParams{10},
                                    NeuralNetParams{{6}, Activation::tanh, 0.05, 16, 10, 0}};
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto model = train_model(ds, all[i], 44);
        auto path = (dir / ("model" + std::to_string(i) + ".json")).string();
        save_model(model, path);
        auto loaded = load_model(path);
        auto before = predict(model, probe.rows);
        auto after = predict(loaded, probe.rows);
        CHECK(before.labels == after.labels);
        CHECK(before.scores == after.scores);
    }
}
