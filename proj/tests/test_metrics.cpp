#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "attrsense/metrics.hpp"
#include "attrsense/random.hpp"

using namespace attrsense;

namespace {

/// Pair-counting AUC: (concordant + 0.5 * tied) / (n+ * n-).
double pair_count_auc(const std::vector<double>& scores,
                      const std::vector<bool>& is_positive) {
    double concordant = 0.0, tied = 0.0;
    std::int64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!is_positive[i]) continue;
        ++pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (is_positive[j]) continue;
            if (scores[i] > scores[j])
                concordant += 1.0;
            else if (scores[i] == scores[j])
                tied += 1.0;
        }
    }
    for (bool p : is_positive)
        if (!p) ++neg;
    return (concordant + 0.5 * tied) / (static_cast<double>(pos) * static_cast<double>(neg));
}

} // namespace

TEST_CASE("confusion_matrix basics") {
    auto diag = confusion_matrix({0, 1, 0}, {0, 1, 0}, 2);
    CHECK(diag == Confusion{{2, 0}, {0, 1}});
    auto anti = confusion_matrix({0, 1}, {1, 0}, 2);
    CHECK(anti == Confusion{{0, 1}, {1, 0}});
    CHECK_THROWS_AS(confusion_matrix({0, 2}, {0, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(confusion_matrix({0}, {0, 1}, 2), std::invalid_argument);
}

TEST_CASE("confusion_matrix matches a brute-force counting oracle") {
    Rng rng(5);
    std::vector<int> pred(1000), truth(1000);
    for (int i = 0; i < 1000; ++i) {
        pred[i] = static_cast<int>(rng.below(3));
        truth[i] = static_cast<int>(rng.below(3));
    }
    auto m = confusion_matrix(pred, truth, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            std::int64_t count = 0;
            for (int r = 0; r < 1000; ++r)
                if (truth[r] == i && pred[r] == j) ++count;
            CHECK(m[i][j] == count);
        }
}

TEST_CASE("roc_auc on perfect separation is 1") {
    auto auc = roc_auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false});
    REQUIRE(auc.value);
    CHECK(*auc.value == Catch::Approx(1.0));
}

TEST_CASE("roc_auc interleaved example equals 0.75") {
    auto auc = roc_auc({0.8, 0.6, 0.4, 0.2}, {true, false, true, false});
    REQUIRE(auc.value);
    CHECK(*auc.value == Catch::Approx(0.75));
}

TEST_CASE("roc_auc is undefined with a single true class") {
    auto auc = roc_auc({0.5, 0.6}, {true, true});
    CHECK(!auc.value);
    CHECK(!auc.reason.empty());
}

TEST_CASE("trapezoidal AUC equals pair counting with ties") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng.below(199);
        std::vector<double> scores(n);
        std::vector<bool> labels(n);
        bool saw_pos = false, saw_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Quantized scores inject ties.
            scores[i] = std::round(rng.uniform() * 20.0) / 20.0;
            labels[i] = rng.uniform() < 0.5;
            (labels[i] ? saw_pos : saw_neg) = true;
        }
        if (!saw_pos || !saw_neg) {
            labels[0] = true;
            labels[1] = false;
        }
        auto auc = roc_auc(scores, labels);
        REQUIRE(auc.value);
        CHECK(std::abs(*auc.value - pair_count_auc(scores, labels)) < 1e-9);
    }
}

TEST_CASE("negating scores mirrors AUC") {
    Rng rng(37);
    std::vector<double> scores(50);
    std::vector<bool> labels(50);
    for (int i = 0; i < 50; ++i) {
        scores[i] = rng.uniform();
        labels[i] = i % 3 == 0;
    }
    auto auc = roc_auc(scores, labels);
    std::vector<double> negated(scores);
    for (double& s : negated) s = -s;
    auto mirrored = roc_auc(negated, labels);
    REQUIRE(auc.value);
    REQUIRE(mirrored.value);
    CHECK(*mirrored.value == Catch::Approx(1.0 - *auc.value).margin(1e-12));
}

TEST_CASE("binary_metrics on a perfect confusion") {
    Confusion confusion{{50, 0}, {0, 50}};
    std::vector<double> scores;
    std::vector<int> truth;
    for (int i = 0; i < 50; ++i) {
        scores.push_back(0.9);
        truth.push_back(0);
    }
    for (int i = 0; i < 50; ++i) {
        scores.push_back(0.1);
        truth.push_back(1);
    }
    auto m = binary_metrics(confusion, scores, truth, 0);
    CHECK(m.accuracy == Catch::Approx(1.0));
    CHECK(m.f1 == Catch::Approx(1.0));
    REQUIRE(m.auc.value);
    CHECK(*m.auc.value == Catch::Approx(1.0));
}

TEST_CASE("binary F1 is 0 when precision and recall are both 0") {
    Confusion confusion{{0, 3}, {0, 5}}; // positive class 0 never predicted
    std::vector<double> scores{0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.2, 0.2};
    std::vector<int> truth{0, 0, 0, 1, 1, 1, 1, 1};
    auto m = binary_metrics(confusion, scores, truth, 0);
    CHECK(m.f1 == 0.0);
}

TEST_CASE("multiclass metrics on perfect predictions") {
    Confusion confusion{{4, 0, 0}, {0, 4, 0}, {0, 0, 4}};
    Matrix scores(12, 3);
    std::vector<int> truth;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 4; ++i) {
            truth.push_back(c);
            scores(truth.size() - 1, c) = 1.0;
        }
    auto m = multiclass_metrics(confusion, scores, truth);
    CHECK(m.accuracy == Catch::Approx(1.0));
    CHECK(m.macro_f1 == Catch::Approx(1.0));
    REQUIRE(m.macro_auc.value);
    CHECK(*m.macro_auc.value == Catch::Approx(1.0));
}

TEST_CASE("uniform random scores give macro AUC near one half") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const int n = 3000;
        std::vector<int> truth(n), pred(n);
        Matrix scores(n, 3);
        for (int i = 0; i < n; ++i) {
            truth[i] = i % 3;
            for (int c = 0; c < 3; ++c) scores(i, c) = rng.uniform();
            pred[i] = argmax_label(scores.row(i));
        }
        auto m = multiclass_metrics(confusion_matrix(pred, truth, 3), scores, truth);
        REQUIRE(m.macro_auc.value);
        CHECK(*m.macro_auc.value == Catch::Approx(0.5).margin(0.03));
    }
}

TEST_CASE("a never-predicted class keeps F1 = 0 in the macro mean") {
    // Class 2 has support but is never predicted.
    Confusion confusion{{5, 0, 0}, {0, 5, 0}, {3, 2, 0}};
    Matrix scores(15, 3);
    std::vector<int> truth;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 5; ++i) truth.push_back(c);
    for (std::size_t i = 0; i < 15; ++i) scores(i, truth[i] == 2 ? 0 : truth[i]) = 1.0;
    auto m = multiclass_metrics(confusion, scores, truth);
    CHECK(m.excluded_classes.empty());
    CHECK(m.macro_f1 ==
          Catch::Approx((2.0 * (5.0 / 8) * 1.0 / ((5.0 / 8) + 1.0) +
                         2.0 * (5.0 / 7) * 1.0 / ((5.0 / 7) + 1.0) + 0.0) /
                        3.0)
              .margin(1e-9));
}

TEST_CASE("zero-support classes are excluded from the macro mean with a note") {
    Confusion confusion{{5, 0, 0}, {0, 5, 0}, {0, 0, 0}};
    Matrix scores(10, 3);
    std::vector<int> truth;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 5; ++i) truth.push_back(c);
    for (std::size_t i = 0; i < 10; ++i) scores(i, truth[i]) = 1.0;
    auto m = multiclass_metrics(confusion, scores, truth);
    CHECK(m.excluded_classes == std::vector<int>{2});
    CHECK(m.macro_f1 == Catch::Approx(1.0));
}

TEST_CASE("accuracy equals the support-weighted mean of per-class recall") {
    Rng rng(41);
    std::vector<int> pred(300), truth(300);
    for (int i = 0; i < 300; ++i) {
        pred[i] = static_cast<int>(rng.below(4));
        truth[i] = static_cast<int>(rng.below(4));
    }
    auto confusion = confusion_matrix(pred, truth, 4);
    std::int64_t total = 0, trace = 0;
    double weighted = 0.0;
    for (int c = 0; c < 4; ++c) {
        std::int64_t support = 0;
        for (int j = 0; j < 4; ++j) support += confusion[c][j];
        total += support;
        trace += confusion[c][c];
        if (support > 0)
            weighted += static_cast<double>(confusion[c][c]);
    }
    CHECK(static_cast<double>(trace) / static_cast<double>(total) ==
          Catch::Approx(weighted / static_cast<double>(total)).margin(1e-12));
}

TEST_CASE("make_report applies the gender positive-class convention") {
    std::vector<int> truth{0, 0, 1, 1};
    Prediction pred;
    pred.labels = {0, 1, 1, 1};
    pred.scores = Matrix(4, 2);
    pred.scores(0, 0) = 0.9;
    pred.scores(1, 0) = 0.4;
    pred.scores(2, 0) = 0.2;
    pred.scores(3, 0) = 0.1;
    for (int i = 0; i < 4; ++i) pred.scores(i, 1) = 1.0 - pred.scores(i, 0);
    auto report = make_report(Task::gender, Algorithm::linear_svc, 50, 10,
                              gender_names(), truth, pred);
    REQUIRE(report.positive_class);
    CHECK(*report.positive_class == "male");
    CHECK(report.accuracy == Catch::Approx(0.75));
    // male: tp=1, fn=1, fp=0 -> precision 1, recall 0.5, f1 = 2/3.
    CHECK(report.f1 == Catch::Approx(2.0 / 3.0));
    CHECK(report.per_class_recall[0] == Catch::Approx(0.5));
    CHECK(report.per_class_recall[1] == Catch::Approx(1.0));

    std::string row = metrics_csv_row(report);
    CHECK(row.starts_with("gender,linear_svc,50,10,0.750000,"));
    CHECK(row.ends_with(",male"));
}
