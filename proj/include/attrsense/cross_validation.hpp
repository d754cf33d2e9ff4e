#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <vector>

#include "attrsense/models.hpp"
#include "attrsense/random.hpp"
#include "attrsense/vectorize.hpp"

namespace attrsense {

struct CvResult {
    std::vector<ModelParams> grid;
    Matrix fold_scores; // candidates x folds, held-out accuracy
    std::size_t best_index = 0;
    std::vector<int> fold_of_row;
};

/// Stratified, group-aware fold assignment: all blocks of one account land
/// in one fold; within each class, accounts are dealt greedily onto the
/// fold with the fewest samples of that class. When every account
/// contributes one row this reduces to exact stratification (counts per
/// fold within +-1 per class).
inline std::vector<int> assign_folds(const TaskDataset& dataset, int folds,
                                     std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("assign_folds: folds must be >= 2");
    struct Group {
        std::string name;
        int label;
        std::vector<std::size_t> rows;
    };
    std::map<std::string, std::size_t> group_index;
    std::vector<Group> groups;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto [it, inserted] = group_index.try_emplace(dataset.groups[i], groups.size());
        if (inserted) groups.push_back({dataset.groups[i], dataset.labels[i], {}});
        groups[it->second].rows.push_back(i);
    }

    const int k = static_cast<int>(dataset.class_names.size());
    std::vector<std::vector<std::size_t>> by_class(k);
    std::vector<std::int64_t> class_rows(k, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        by_class[groups[g].label].push_back(g);
        class_rows[groups[g].label] += static_cast<std::int64_t>(groups[g].rows.size());
    }
    for (int c = 0; c < k; ++c) {
        if (class_rows[c] == 0) continue; // absent class: nothing to stratify
        if (class_rows[c] < folds || by_class[c].size() < static_cast<std::size_t>(folds))
            throw std::invalid_argument(
                "assign_folds: class '" + dataset.class_names[c] + "' has " +
                std::to_string(by_class[c].size()) + " accounts / " +
                std::to_string(class_rows[c]) + " rows, needs >= " + std::to_string(folds) +
                " of each");
    }

    std::vector<int> fold_of_row(dataset.size(), -1);
    for (int c = 0; c < k; ++c) {
        auto& class_groups = by_class[c];
        if (class_groups.empty()) continue;
        Rng rng(derive_seed(seed, "cv-class-" + std::to_string(c)));
        rng.shuffle(class_groups);
        std::stable_sort(class_groups.begin(), class_groups.end(),
                         [&](std::size_t a, std::size_t b) {
                             return groups[a].rows.size() > groups[b].rows.size();
                         });
        std::vector<std::int64_t> load(folds, 0);
        for (std::size_t g : class_groups) {
            int best = 0;
            for (int f = 1; f < folds; ++f)
                if (load[f] < load[best]) best = f;
            load[best] += static_cast<std::int64_t>(groups[g].rows.size());
            for (std::size_t row : groups[g].rows) fold_of_row[row] = best;
        }
    }
    return fold_of_row;
}

namespace detail {

inline TaskDataset subset_dataset(const TaskDataset& dataset,
                                  const std::vector<std::size_t>& rows) {
    TaskDataset out;
    out.task = dataset.task;
    out.class_names = dataset.class_names;
    for (std::size_t i : rows) {
        out.rows.append_row(dataset.rows.row(i));
        out.labels.push_back(dataset.labels[i]);
        out.groups.push_back(dataset.groups[i]);
    }
    return out;
}

} // namespace detail

/// Selects hyperparameters by stratified group-aware k-fold cross
/// validation: each candidate is trained on k-1 folds and scored by
/// held-out accuracy; best = highest mean accuracy, ties to the first
/// candidate in grid order.
inline CvResult cross_validate(Algorithm algorithm, const TaskDataset& dataset,
                               const std::vector<ModelParams>& grid, int folds,
                               std::uint64_t seed, int threads = 1) {
    if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
    for (const auto& params : grid)
        if (algorithm_of(params) != algorithm)
            throw std::invalid_argument(
                "cross_validate: grid candidate family does not match the algorithm");

    CvResult result;
    result.grid = grid;
    result.fold_of_row = assign_folds(dataset, folds, seed);
    result.fold_scores = Matrix(grid.size(), folds);

    std::vector<std::vector<std::size_t>> fold_rows(folds);
    for (std::size_t i = 0; i < result.fold_of_row.size(); ++i)
        fold_rows[result.fold_of_row[i]].push_back(i);

    struct Cell {
        std::size_t candidate;
        int fold;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < grid.size(); ++c)
        for (int f = 0; f < folds; ++f) cells.push_back({c, f});

    auto run_cell = [&](const Cell& cell) {
        std::vector<std::size_t> train_rows, held_out;
        for (int f = 0; f < folds; ++f) {
            auto& rows = fold_rows[f];
            auto& sink = f == cell.fold ? held_out : train_rows;
            sink.insert(sink.end(), rows.begin(), rows.end());
        }
        auto train_ds = detail::subset_dataset(dataset, train_rows);
        auto model = train_model(train_ds, grid[cell.candidate],
                                 derive_seed(seed, "cv-c" + std::to_string(cell.candidate) +
                                                       "-f" + std::to_string(cell.fold)));
        auto held = detail::subset_dataset(dataset, held_out);
        auto pred = predict(model, held.rows);
        int hits = 0;
        for (std::size_t i = 0; i < held.labels.size(); ++i)
            if (pred.labels[i] == held.labels[i]) ++hits;
        result.fold_scores(cell.candidate, cell.fold) =
            held.labels.empty() ? 0.0
                                : static_cast<double>(hits) /
                                      static_cast<double>(held.labels.size());
    };

    if (threads <= 1) {
        for (const auto& cell : cells) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < cells.size();
                 i = next.fetch_add(1))
                run_cell(cells[i]);
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(threads, static_cast<int>(cells.size())); ++w)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    double best_mean = -1.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double mean = 0.0;
        for (int f = 0; f < folds; ++f) mean += result.fold_scores(c, f);
        mean /= folds;
        if (mean > best_mean) {
            best_mean = mean;
            result.best_index = c;
        }
    }
    return result;
}

} // namespace attrsense
