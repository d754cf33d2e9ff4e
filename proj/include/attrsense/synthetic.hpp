#pragma once

#include <string>
#include <vector>

#include "attrsense/corpus.hpp"
#include "attrsense/random.hpp"
#include "attrsense/vectorize.hpp"

namespace attrsense {

/// Two separable Gaussian blobs: class means at +-(separation/2) along every
/// coordinate axis direction dim 0, unit variance. One account per
/// rows_per_group rows so group-aware folding has structure.
inline TaskDataset make_blobs(int per_class, int dim, double separation,
                              std::uint64_t seed, int rows_per_group = 1) {
    Rng rng(seed);
    TaskDataset ds;
    ds.task = Task::gender;
    ds.class_names = {"neg", "pos"};
    std::vector<double> row(dim);
    for (int c = 0; c < 2; ++c) {
        double center = (c == 0 ? -0.5 : 0.5) * separation;
        for (int i = 0; i < per_class; ++i) {
            row[0] = center + rng.gaussian();
            for (int d = 1; d < dim; ++d) row[d] = rng.gaussian();
            ds.rows.append_row(row);
            ds.labels.push_back(c);
            ds.groups.push_back("g" + std::to_string(c) + "_" +
                                std::to_string(i / rows_per_group));
        }
    }
    return ds;
}

/// The four XOR points, labels A=(0,0),(1,1) / B=(0,1),(1,0).
inline TaskDataset make_xor() {
    TaskDataset ds;
    ds.task = Task::gender;
    ds.class_names = {"A", "B"};
    const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const int labels[4] = {0, 0, 1, 1};
    for (int i = 0; i < 4; ++i) {
        ds.rows.append_row(std::span<const double>(pts[i], 2));
        ds.labels.push_back(labels[i]);
        ds.groups.push_back("p" + std::to_string(i));
    }
    return ds;
}

/// Corpus where {a,b} and {c,d} co-occur within tweets but never across.
inline std::vector<TweetRecord> two_cluster_corpus(int tweets_per_cluster = 150) {
    std::vector<TweetRecord> records;
    for (int i = 0; i < tweets_per_cluster; ++i) {
        for (int cluster = 0; cluster < 2; ++cluster) {
            TweetRecord rec;
            rec.account_id = "acct";
            rec.seq = static_cast<std::int64_t>(records.size());
            const char* x = cluster == 0 ? "a" : "c";
            const char* y = cluster == 0 ? "b" : "d";
            for (int t = 0; t < 4; ++t) {
                rec.tokens.push_back(x);
                rec.tokens.push_back(y);
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

struct PlantedCorpusSpec {
    int accounts = 40;
    int train_accounts = 20;
    int tweets_per_account = 300;
    int min_tokens = 8;
    int max_tokens = 15;
    int shared_vocab = 500;
    int gender_markers = 50;  // class-exclusive marker tokens per gender
    double gender_rate = 0.2; // probability a token position is a gender marker
    int occupation_markers = 0;
    double occupation_rate = 0.0;
    int age_markers = 0;
    double age_rate = 0.0;
    std::uint64_t seed = 1;
};

struct SyntheticCorpus {
    std::vector<TweetRecord> tweets;
    std::vector<LabeledAccount> accounts;
};

/// Synthetic author corpus with class-exclusive marker tokens mixed into a
/// shared vocabulary, giving each attribute a known recoverable signal.
inline SyntheticCorpus planted_marker_corpus(const PlantedCorpusSpec& spec) {
    Rng rng(derive_seed(spec.seed, "planted-corpus"));
    SyntheticCorpus corpus;
    for (int a = 0; a < spec.accounts; ++a) {
        LabeledAccount acc;
        acc.account_id = "acct" + std::to_string(a);
        acc.gender = a % 2 == 0 ? Gender::male : Gender::female;
        acc.occupation = static_cast<Occupation>(a % 10);
        acc.age_group = (a / 2) % 2 == 0 ? AgeGroup::digital_native
                                         : AgeGroup::digital_immigrant;
        acc.role = a < spec.train_accounts ? Role::train : Role::test;
        corpus.accounts.push_back(acc);
    }
    auto marker = [](const char* kind, int cls, int i) {
        return std::string(kind) + std::to_string(cls) + "m" + std::to_string(i);
    };
    for (const auto& acc : corpus.accounts) {
        for (int t = 0; t < spec.tweets_per_account; ++t) {
            TweetRecord rec;
            rec.account_id = acc.account_id;
            rec.seq = t;
            int len = static_cast<int>(
                rng.uniform_int(spec.min_tokens, spec.max_tokens));
            for (int p = 0; p < len; ++p) {
                double u = rng.uniform();
                if (u < spec.gender_rate && spec.gender_markers > 0) {
                    rec.tokens.push_back(marker("g", static_cast<int>(acc.gender),
                                                static_cast<int>(rng.below(spec.gender_markers))));
                } else if (u < spec.gender_rate + spec.occupation_rate &&
                           spec.occupation_markers > 0) {
                    rec.tokens.push_back(
                        marker("o", static_cast<int>(acc.occupation),
                               static_cast<int>(rng.below(spec.occupation_markers))));
                } else if (u < spec.gender_rate + spec.occupation_rate + spec.age_rate &&
                           spec.age_markers > 0) {
                    rec.tokens.push_back(
                        marker("a", static_cast<int>(acc.age_group),
                               static_cast<int>(rng.below(spec.age_markers))));
                } else {
                    rec.tokens.push_back(
                        "w" + std::to_string(rng.below(spec.shared_vocab)));
                }
            }
            std::string text;
            for (std::size_t p = 0; p < rec.tokens.size(); ++p) {
                if (p) text += ' ';
                text += rec.tokens[p];
            }
            rec.text = std::move(text);
            corpus.tweets.push_back(std::move(rec));
        }
    }
    return corpus;
}

/// Writes tweets.jsonl and labels.csv for a synthetic corpus.
inline void write_corpus_files(const SyntheticCorpus& corpus,
                               const std::string& tweets_path,
                               const std::string& labels_path) {
    std::ofstream tweets(tweets_path);
    if (!tweets) throw input_error("cannot write " + tweets_path);
    for (const auto& rec : corpus.tweets) {
        tweets << "{\"account_id\":\"" << rec.account_id << "\",\"text\":\"" << rec.text
               << "\"}\n";
    }
    std::ofstream labels(labels_path);
    if (!labels) throw input_error("cannot write " + labels_path);
    labels << "account_id,gender,occupation,age_group,role\n";
    for (const auto& acc : corpus.accounts)
        labels << acc.account_id << ',' << to_string(acc.gender) << ','
               << to_string(acc.occupation) << ',' << to_string(acc.age_group) << ','
               << to_string(acc.role) << '\n';
}

} // namespace attrsense
