#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "attrsense/models/types.hpp"
#include "attrsense/random.hpp"

namespace attrsense {

namespace detail {

struct TreeBuilder {
    const Matrix& rows;
    const std::vector<int>& labels;
    int num_classes;
    const RandomForestParams& params;
    Rng rng;
    DecisionTree tree;

    static double gini(const std::vector<double>& by_class, double total) {
        if (total <= 0.0) return 0.0;
        double s = 0.0;
        for (double c : by_class) s += (c / total) * (c / total);
        return 1.0 - s;
    }

    int majority(const std::vector<int>& idxs) const {
        std::vector<int> counts(num_classes, 0);
        for (int i : idxs) ++counts[labels[i]];
        return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                counts.begin());
    }

    bool pure(const std::vector<int>& idxs) const {
        for (std::size_t i = 1; i < idxs.size(); ++i)
            if (labels[idxs[i]] != labels[idxs[0]]) return false;
        return true;
    }

    int make_leaf(const std::vector<int>& idxs) {
        TreeNode node;
        node.label = majority(idxs);
        tree.nodes.push_back(node);
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    /// Scans features in a random permutation; the first floor(sqrt(dim))
    /// features are always examined, and scanning continues past them until
    /// some usable split is found (so constant features never stall growth).
    int build(std::vector<int>& idxs, int depth) {
        if (pure(idxs) ||
            idxs.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf) ||
            (params.max_depth > 0 && depth >= params.max_depth))
            return make_leaf(idxs);

        const std::size_t dim = rows.cols();
        std::vector<std::size_t> features(dim);
        std::iota(features.begin(), features.end(), 0);
        rng.shuffle(features);
        const std::size_t want =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(dim))));

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        std::vector<int> order;
        std::vector<double> left_by_class(num_classes), total_by_class(num_classes, 0.0);
        for (int i : idxs) total_by_class[labels[i]] += 1.0;
        const double total = static_cast<double>(idxs.size());

        for (std::size_t fi = 0; fi < dim; ++fi) {
            if (fi >= want && best_feature >= 0) break;
            std::size_t f = features[fi];
            order = idxs;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return rows(a, f) < rows(b, f); });
            std::fill(left_by_class.begin(), left_by_class.end(), 0.0);
            double left_total = 0.0;
            for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                left_by_class[labels[order[pos]]] += 1.0;
                left_total += 1.0;
                double lo = rows(order[pos], f);
                double hi = rows(order[pos + 1], f);
                if (lo == hi) continue;
                if (left_total < params.min_samples_leaf ||
                    total - left_total < params.min_samples_leaf)
                    continue;
                double right_total = total - left_total;
                std::vector<double> right_by_class(num_classes);
                for (int c = 0; c < num_classes; ++c)
                    right_by_class[c] = total_by_class[c] - left_by_class[c];
                double score = left_total * gini(left_by_class, left_total) +
                               right_total * gini(right_by_class, right_total);
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (lo + hi);
                }
            }
        }
        if (best_feature < 0) return make_leaf(idxs);

        std::vector<int> left_idx, right_idx;
        for (int i : idxs)
            (rows(i, best_feature) < best_threshold ? left_idx : right_idx).push_back(i);

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size()) - 1;
        tree.nodes[self].left = build(left_idx, depth + 1);
        tree.nodes[self].right = build(right_idx, depth + 1);
        return self;
    }
};

inline DecisionTree build_tree(const Matrix& rows, const std::vector<int>& labels,
                               int num_classes, const RandomForestParams& params,
                               std::uint64_t tree_seed) {
    TreeBuilder builder{rows, labels, num_classes, params, Rng(tree_seed), {}};
    const std::size_t m = rows.rows();
    std::vector<int> idxs;
    idxs.reserve(m);
    if (params.bootstrap) {
        for (std::size_t i = 0; i < m; ++i)
            idxs.push_back(static_cast<int>(builder.rng.below(m)));
    } else {
        idxs.resize(m);
        std::iota(idxs.begin(), idxs.end(), 0);
    }
    builder.build(idxs, 0);
    return std::move(builder.tree);
}

} // namespace detail

/// Bootstrap-sampled CART trees with Gini splits over floor(sqrt(dim)) random
/// features per node. Per-tree seeds derive from the model seed, so the
/// forest is identical however tree construction is scheduled.
inline RandomForestState fit_random_forest(const Matrix& rows,
                                           const std::vector<int>& labels,
                                           int num_classes,
                                           const RandomForestParams& params,
                                           std::uint64_t seed, int threads = 1) {
    if (params.trees < 1) throw std::invalid_argument("random_forest: trees must be >= 1");
    if (params.min_samples_leaf < 1)
        throw std::invalid_argument("random_forest: min_samples_leaf must be >= 1");
    RandomForestState state;
    state.trees.resize(params.trees);
    auto build_range = [&](int from, int to) {
        for (int t = from; t < to; ++t)
            state.trees[t] = detail::build_tree(rows, labels, num_classes, params,
                                                derive_seed(seed, "tree-" + std::to_string(t)));
    };
    if (threads <= 1 || params.trees == 1) {
        build_range(0, params.trees);
    } else {
        int workers = std::min(threads, params.trees);
        std::vector<std::thread> pool;
        int chunk = (params.trees + workers - 1) / workers;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(build_range, w * chunk,
                              std::min(params.trees, (w + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    return state;
}

/// Vote fractions over the trees; votes always sum to the tree count.
inline void forest_scores(const RandomForestState& state, std::span<const double> row,
                          std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : state.trees) out[tree.predict(row)] += 1.0;
    for (double& s : out) s /= static_cast<double>(state.trees.size());
}

} // namespace attrsense
