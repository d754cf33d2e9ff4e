#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "attrsense/metrics.hpp"

namespace attrsense {

namespace detail {

/// Continued-fraction kernel for the regularized incomplete beta function
/// (modified Lentz's method).
inline double beta_cont_frac(double a, double b, double x) {
    const double eps = 1e-16;
    const double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b), absolute error well
/// below 1e-10 over the t-distribution range used here.
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * detail::beta_cont_frac(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

/// Upper-tail probability P(T > t) of Student's t distribution.
inline double student_t_sf(double t, double df) {
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? tail : 1.0 - tail;
}

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;     // two-tailed
    bool degenerate = false;
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom. Zero variance in both samples degenerates to p = 1 (equal
/// means) or p = 0 with a flag (differing means).
inline WelchResult welch_t_test(const std::vector<double>& a,
                                const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test: each sample needs size >= 2");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double ma = 0.0, mb = 0.0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    ma /= na;
    mb /= nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;

    WelchResult out;
    if (va == 0.0 && vb == 0.0) {
        out.df = na + nb - 2.0;
        if (ma == mb) {
            out.t = 0.0;
            out.p = 1.0;
        } else {
            out.t = ma > mb ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
            out.p = 0.0;
            out.degenerate = true;
        }
        return out;
    }
    const double sa = va / na, sb = vb / nb;
    const double se2 = sa + sb;
    out.t = (ma - mb) / std::sqrt(se2);
    out.df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    out.p = 2.0 * student_t_sf(std::abs(out.t), out.df);
    return out;
}

/// Collects one entity's recall across all grid cells of one task, the
/// sample behind the per-attribute predictability distributions. Cells
/// where the entity had no support are skipped.
inline std::vector<double> per_entity_recall(const std::vector<MetricsReport>& reports,
                                             Task task, const std::string& entity) {
    auto names = task_class_names(task);
    auto it = std::find(names.begin(), names.end(), entity);
    if (it == names.end())
        throw std::invalid_argument("per_entity_recall: entity '" + entity +
                                    "' is not a class of task " + to_string(task));
    const std::size_t idx = static_cast<std::size_t>(it - names.begin());
    std::vector<double> values;
    for (const auto& r : reports) {
        if (r.task != task) continue;
        if (idx < r.per_class_recall.size() && !std::isnan(r.per_class_recall[idx]))
            values.push_back(r.per_class_recall[idx]);
    }
    return values;
}

struct BlockPrediction {
    std::string account_id;
    int label = 0;
    double score = 0.0; // score of the predicted label, used for tie-breaks
};

/// Majority label per account; vote ties go to the tied label with the
/// highest mean score, then to the lowest class id.
inline std::map<std::string, int> account_vote(const std::vector<BlockPrediction>& blocks) {
    if (blocks.empty()) throw std::invalid_argument("account_vote: empty group");
    struct Tally {
        std::map<int, int> votes;
        std::map<int, double> score_sum;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& b : blocks) {
        auto& t = tallies[b.account_id];
        ++t.votes[b.label];
        t.score_sum[b.label] += b.score;
    }
    std::map<std::string, int> out;
    for (const auto& [account, tally] : tallies) {
        int best_label = -1;
        int best_votes = -1;
        double best_mean = 0.0;
        for (const auto& [label, votes] : tally.votes) {
            double mean = tally.score_sum.at(label) / votes;
            bool better = votes > best_votes ||
                          (votes == best_votes && mean > best_mean);
            if (better) {
                best_label = label;
                best_votes = votes;
                best_mean = mean;
            }
        }
        out[account] = best_label;
    }
    return out;
}

} // namespace attrsense
