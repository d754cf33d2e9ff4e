#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrsense/common.hpp"
#include "attrsense/corpus.hpp"
#include "attrsense/sgns.hpp"
#include "attrsense/vocab.hpp"

namespace attrsense {

struct TweetVector {
    std::string account_id;
    std::int64_t seq = 0;
    std::vector<double> vec;
    int used_tokens = 0;    // in-vocabulary tokens averaged into vec
    int skipped_tokens = 0; // out-of-vocabulary tokens
};

/// Mean of the word vectors of the in-vocabulary tokens. Out-of-vocabulary
/// tokens are skipped and counted; a tweet whose tokens are all
/// out-of-vocabulary yields no vector.
inline std::optional<TweetVector> tweet_vector(const std::vector<std::string>& tokens,
                                               const WordVectorTable& table,
                                               const Vocabulary& vocab) {
    TweetVector tv;
    tv.vec.assign(table.dim, 0.0);
    for (const auto& tok : tokens) {
        int id = vocab.id_of(tok);
        if (id < 0) {
            ++tv.skipped_tokens;
            continue;
        }
        axpy(1.0, table.input_vectors.row(id), tv.vec);
        ++tv.used_tokens;
    }
    if (tv.used_tokens == 0) return std::nullopt;
    for (double& v : tv.vec) v /= tv.used_tokens;
    return tv;
}

inline std::optional<TweetVector> tweet_vector(const TweetRecord& record,
                                               const WordVectorTable& table,
                                               const Vocabulary& vocab) {
    auto tv = tweet_vector(record.tokens, table, vocab);
    if (tv) {
        tv->account_id = record.account_id;
        tv->seq = record.seq;
    }
    return tv;
}

struct BlockSample {
    std::string account_id;
    int block_index = 0;
    std::vector<double> vec;
    int size = 0;
    Gender gender = Gender::male;
    Occupation occupation = Occupation::politician;
    AgeGroup age_group = AgeGroup::unknown;
};

struct BlockingResult {
    std::vector<BlockSample> blocks;
    int dropped_tweets = 0; // trailing partial block
};

/// Groups one account's tweet vectors into consecutive non-overlapping blocks
/// of exactly L, in seq order; a trailing partial block is dropped and
/// counted. The block vector is the component-wise mean of its members.
inline BlockingResult make_blocks(std::vector<TweetVector> tweet_vectors, int block_size,
                                  const LabeledAccount& owner) {
    if (block_size < 1)
        throw std::invalid_argument("make_blocks: block size must be >= 1");
    std::stable_sort(tweet_vectors.begin(), tweet_vectors.end(),
                     [](const TweetVector& a, const TweetVector& b) { return a.seq < b.seq; });
    BlockingResult out;
    const std::size_t full_blocks = tweet_vectors.size() / block_size;
    out.dropped_tweets =
        static_cast<int>(tweet_vectors.size() - full_blocks * block_size);
    if (full_blocks == 0) return out;
    const std::size_t dim = tweet_vectors.front().vec.size();
    out.blocks.reserve(full_blocks);
    for (std::size_t b = 0; b < full_blocks; ++b) {
        BlockSample block;
        block.account_id = owner.account_id;
        block.block_index = static_cast<int>(b);
        block.size = block_size;
        block.gender = owner.gender;
        block.occupation = owner.occupation;
        block.age_group = owner.age_group;
        block.vec.assign(dim, 0.0);
        for (int i = 0; i < block_size; ++i)
            axpy(1.0, std::span<const double>(tweet_vectors[b * block_size + i].vec),
                 block.vec);
        for (double& v : block.vec) v /= block_size;
        out.blocks.push_back(std::move(block));
    }
    return out;
}

struct TaskDataset {
    Task task = Task::gender;
    Matrix rows;
    std::vector<int> labels;         // dense class ids into class_names
    std::vector<std::string> groups; // owning account per row
    std::vector<std::string> class_names;

    std::size_t size() const { return rows.rows(); }
};

inline std::vector<std::string> task_class_names(Task task) {
    switch (task) {
        case Task::gender:
            return gender_names();
        case Task::occupation:
            return occupation_names();
        case Task::age_group:
            return {"digital_native", "digital_immigrant"};
    }
    throw std::invalid_argument("task_class_names: bad task");
}

/// Builds the labeled feature dataset for one task. Every block must belong
/// to an account with the requested role; for the age task, blocks whose
/// account's age group is unknown are excluded.
inline TaskDataset assemble_dataset(const std::vector<BlockSample>& blocks,
                                    const std::vector<LabeledAccount>& accounts,
                                    Task task, Role role) {
    std::unordered_map<std::string, const LabeledAccount*> by_id;
    for (const auto& acc : accounts) by_id.emplace(acc.account_id, &acc);

    TaskDataset ds;
    ds.task = task;
    ds.class_names = task_class_names(task);
    for (const auto& block : blocks) {
        auto it = by_id.find(block.account_id);
        if (it == by_id.end())
            throw input_error("assemble_dataset: block references unknown account '" +
                              block.account_id + "'");
        const LabeledAccount& acc = *it->second;
        if (acc.role != role)
            throw input_error("assemble_dataset: account '" + block.account_id +
                              "' does not have role " + to_string(role));
        int label;
        switch (task) {
            case Task::gender:
                label = static_cast<int>(block.gender);
                break;
            case Task::occupation:
                label = static_cast<int>(block.occupation);
                break;
            case Task::age_group:
                if (block.age_group == AgeGroup::unknown) continue;
                label = static_cast<int>(block.age_group);
                break;
            default:
                throw std::invalid_argument("assemble_dataset: bad task");
        }
        ds.rows.append_row(block.vec);
        ds.labels.push_back(label);
        ds.groups.push_back(block.account_id);
    }
    return ds;
}

/// Columnar dump of a task dataset: account_id, block_index, label (class
/// name), v0..v{N-1}. block_index is the per-account running index.
inline void save_dataset_csv(const TaskDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write dataset file: " + path);
    out << "account_id,block_index,label";
    for (std::size_t d = 0; d < dataset.rows.cols(); ++d) out << ",v" << d;
    out << '\n';
    std::unordered_map<std::string, int> running;
    char buf[64];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.groups[i] << ',' << running[dataset.groups[i]]++ << ','
            << dataset.class_names[dataset.labels[i]];
        auto row = dataset.rows.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof buf, ",%.9g", v);
            out << buf;
        }
        out << '\n';
    }
}

inline TaskDataset load_dataset_csv(const std::string& path, Task task) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open dataset file: " + path);
    TaskDataset ds;
    ds.task = task;
    ds.class_names = task_class_names(task);
    std::string line;
    if (!std::getline(in, line)) throw input_error(path + ": empty dataset file");
    std::size_t line_no = 1;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 4)
            throw input_error(path + ":" + std::to_string(line_no) + ": too few columns");
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), fields[2]);
        if (it == ds.class_names.end())
            throw input_error(path + ":" + std::to_string(line_no) + ": label '" +
                              fields[2] + "' is not a class of task " + to_string(task));
        row.clear();
        for (std::size_t f = 3; f < fields.size(); ++f) {
            try {
                row.push_back(std::stod(fields[f]));
            } catch (...) {
                throw input_error(path + ":" + std::to_string(line_no) +
                                  ": bad numeric value '" + fields[f] + "'");
            }
        }
        ds.rows.append_row(row);
        ds.labels.push_back(static_cast<int>(it - ds.class_names.begin()));
        ds.groups.push_back(fields[0]);
    }
    return ds;
}

} // namespace attrsense
