#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "attrsense/corpus.hpp"
#include "attrsense/cross_validation.hpp"
#include "attrsense/metrics.hpp"
#include "attrsense/models.hpp"
#include "attrsense/sgns.hpp"
#include "attrsense/stats.hpp"
#include "attrsense/vector_io.hpp"
#include "attrsense/vectorize.hpp"
#include "attrsense/vocab.hpp"

namespace attrsense {

inline std::vector<ModelParams> default_cv_grid(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::linear_svc:
            return {SvcParams{0.1, 50}, SvcParams{1.0, 50}, SvcParams{10.0, 50}};
        case Algorithm::knn:
            return {KnnParams{5}, KnnParams{15}};
        case Algorithm::adaboost:
            return {AdaBoostParams{50}};
        case Algorithm::random_forest:
            return {RandomForestParams{100}};
        case Algorithm::neural_net:
            return {NeuralNetParams{}};
    }
    throw std::invalid_argument("default_cv_grid: bad algorithm");
}

struct SweepConfig {
    std::vector<Task> tasks = {Task::gender, Task::occupation, Task::age_group};
    std::vector<Algorithm> algorithms = {Algorithm::linear_svc, Algorithm::knn,
                                         Algorithm::adaboost, Algorithm::random_forest,
                                         Algorithm::neural_net};
    std::vector<int> n_values = {50, 200, 500};
    std::vector<int> l_values = {1, 50, 100, 200, 300};
    std::vector<std::uint64_t> seeds = {1};

    std::string tweets_path;
    std::string labels_path;
    std::string output_dir = "out";
    std::string cache_dir; // defaults to <output_dir>/cache; ATTRSENSE_CACHE overrides

    TokenizerSpec tokenizer;
    int min_tokens = 4;

    // Embedding settings shared across the grid; dim comes from n_values.
    int window = 5;
    int epochs = 20;
    int negatives = 5;
    int min_count = 1;
    double initial_lr = 0.025;
    double subsample_threshold = 0.0;
    std::uint64_t embedding_seed = 1;

    int cv_folds = 10;
    std::map<Algorithm, std::vector<ModelParams>> cv_grid; // empty: defaults

    bool deterministic = false;
    int threads = 1;

    void validate() const {
        if (tasks.empty() || algorithms.empty() || n_values.empty() ||
            l_values.empty() || seeds.empty())
            throw std::invalid_argument("sweep config: empty grid dimension");
        for (int n : n_values)
            if (n < 1) throw std::invalid_argument("sweep config: N must be >= 1");
        for (int l : l_values)
            if (l < 1) throw std::invalid_argument("sweep config: L must be >= 1");
        if (threads < 1) throw std::invalid_argument("sweep config: threads must be >= 1");
    }

    std::vector<ModelParams> grid_for(Algorithm algorithm) const {
        auto it = cv_grid.find(algorithm);
        if (it != cv_grid.end() && !it->second.empty()) return it->second;
        return default_cv_grid(algorithm);
    }
};

/// Reads the declarative sweep config (JSON). Paths are resolved relative
/// to the config file's directory.
inline SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed config file: " + path);

    namespace fs = std::filesystem;
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    SweepConfig config;
    if (j.contains("tasks")) {
        config.tasks.clear();
        for (const auto& t : j["tasks"])
            config.tasks.push_back(enum_from_string<Task>(t.get<std::string>()));
    }
    if (j.contains("algorithms")) {
        config.algorithms.clear();
        for (const auto& a : j["algorithms"])
            config.algorithms.push_back(enum_from_string<Algorithm>(a.get<std::string>()));
    }
    if (j.contains("N_values")) config.n_values = j["N_values"].get<std::vector<int>>();
    if (j.contains("L_values")) config.l_values = j["L_values"].get<std::vector<int>>();
    if (j.contains("seeds"))
        config.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    config.tweets_path = resolve(j.value("tweets", ""));
    config.labels_path = resolve(j.value("labels", ""));
    config.output_dir = resolve(j.value("output", "out"));
    config.cache_dir = resolve(j.value("cache", ""));
    config.min_tokens = j.value("min_tokens", config.min_tokens);
    config.cv_folds = j.value("cv_folds", config.cv_folds);
    config.deterministic = j.value("deterministic", config.deterministic);
    config.threads = j.value("threads", config.threads);
    if (j.contains("tokenizer")) {
        const auto& t = j["tokenizer"];
        std::string mode = t.value("mode", "unicode_default");
        if (mode == "unicode_default")
            config.tokenizer.mode = TokenizerMode::unicode_default;
        else if (mode == "pretokenized")
            config.tokenizer.mode = TokenizerMode::pretokenized;
        else if (mode == "external_command")
            config.tokenizer.mode = TokenizerMode::external_command;
        else
            throw input_error("config: unknown tokenizer mode '" + mode + "'");
        config.tokenizer.external_command = t.value("command", "");
    }
    if (j.contains("embedding")) {
        const auto& e = j["embedding"];
        config.window = e.value("window", config.window);
        config.epochs = e.value("epochs", config.epochs);
        config.negatives = e.value("negatives", config.negatives);
        config.min_count = e.value("min_count", config.min_count);
        config.initial_lr = e.value("initial_lr", config.initial_lr);
        config.subsample_threshold = e.value("subsample_threshold", config.subsample_threshold);
        config.embedding_seed = e.value("seed", config.embedding_seed);
    }
    if (j.contains("cv_grid")) {
        for (const auto& [name, candidates] : j["cv_grid"].items()) {
            Algorithm algo = enum_from_string<Algorithm>(name);
            std::vector<ModelParams> grid;
            for (const auto& c : candidates) grid.push_back(params_from_json(algo, c));
            config.cv_grid[algo] = std::move(grid);
        }
    }
    config.validate();
    return config;
}

// --- embedding cache ---

namespace detail {

inline std::uint64_t corpus_digest(const std::vector<TweetRecord>& records) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view text) {
        for (unsigned char c : text) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    };
    for (const auto& r : records) {
        mix(r.account_id);
        mix(std::to_string(r.seq));
        for (const auto& t : r.tokens) mix(t);
    }
    return h;
}

inline std::uint64_t sgns_config_digest(const SgnsConfig& c) {
    std::string key = std::to_string(c.dim) + "|" + std::to_string(c.window) + "|" +
                      std::to_string(c.epochs) + "|" + std::to_string(c.negatives) + "|" +
                      std::to_string(c.initial_lr) + "|" + std::to_string(c.min_count) +
                      "|" + std::to_string(c.subsample_threshold) + "|" +
                      std::to_string(c.unigram_power) + "|" + std::to_string(c.seed);
    return fnv1a64(key);
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace detail

struct CacheCounters {
    int trainings = 0;
    int hits = 0;
};

/// Content-addressed embedding cache: key = (corpus digest, config digest).
/// A hit loads the stored vector file; a corrupt entry is retrained and
/// overwritten with a warning. Writes are atomic (temp file then rename).
inline std::pair<Vocabulary, WordVectorTable> cache_embeddings(
    const std::vector<TweetRecord>& train_records, const SgnsConfig& config,
    const std::string& cache_dir, CacheCounters* counters = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(cache_dir);
    const std::uint64_t key =
        splitmix64(detail::corpus_digest(train_records) ^
                   splitmix64(detail::sgns_config_digest(config)));
    const fs::path path = fs::path(cache_dir) / ("sgns_" + detail::hex64(key) + ".vec");

    if (fs::exists(path)) {
        try {
            auto loaded = load_vectors(path.string());
            if (loaded.second.dim != config.dim)
                throw input_error("cached dim mismatch");
            if (counters) ++counters->hits;
            return loaded;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: corrupt embedding cache entry %s (%s); retraining\n",
                         path.string().c_str(), e.what());
        }
    }
    auto vocab = build_vocab(train_records, config.min_count);
    auto table = train_sgns(train_records, vocab, config);
    if (counters) ++counters->trainings;
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    save_vectors(table, vocab, tmp.string());
    fs::rename(tmp, path);
    // Reload so cache hits and misses hand identical (quantized) vectors to
    // the rest of the pipeline.
    return load_vectors(path.string());
}

// --- sweep execution ---

struct CellKey {
    Task task = Task::gender;
    Algorithm algorithm = Algorithm::linear_svc;
    int n = 0;
    int l = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    CellKey key;
    bool ok = false;
    std::string error;
    MetricsReport report;
    nlohmann::json best_params;
    double account_accuracy = 0.0; // majority vote per test account
    double embed_seconds = 0.0;
    double train_seconds = 0.0;
    double eval_seconds = 0.0;
    int dropped_blocks_train = 0;
    int dropped_blocks_test = 0;
};

struct SweepOutcome {
    std::vector<SweepResult> results;
    CacheCounters cache;
    std::int64_t tweets_ingested = 0;
    std::int64_t tweets_kept = 0;
};

inline SweepOutcome run_sweep(const SweepConfig& config) {
    config.validate();
    namespace fs = std::filesystem;

    auto accounts = load_labels(config.labels_path);
    std::unordered_map<std::string, const LabeledAccount*> account_by_id;
    for (const auto& a : accounts) account_by_id.emplace(a.account_id, &a);

    auto raw = ingest_tweets(config.tweets_path, config.tokenizer);
    for (const auto& r : raw)
        if (!account_by_id.count(r.account_id))
            throw input_error("tweets reference unlabeled account '" + r.account_id + "'");
    auto kept = filter_short(raw, config.min_tokens);

    std::vector<TweetRecord> train_records, test_records;
    for (auto& r : kept)
        (account_by_id.at(r.account_id)->role == Role::train ? train_records
                                                             : test_records)
            .push_back(r);

    SweepOutcome outcome;
    outcome.tweets_ingested = static_cast<std::int64_t>(raw.size());
    outcome.tweets_kept = static_cast<std::int64_t>(kept.size());

    std::string cache_dir = config.cache_dir;
    if (const char* env = std::getenv("ATTRSENSE_CACHE"); env && *env) cache_dir = env;
    if (cache_dir.empty()) cache_dir = (fs::path(config.output_dir) / "cache").string();

    // Preallocate one slot per cell in canonical order.
    struct CellJob {
        CellKey key;
        const TaskDataset* train_ds;
        const TaskDataset* test_ds;
        std::size_t slot;
        double embed_seconds;
        int dropped_train;
        int dropped_test;
    };

    for (int n : config.n_values) {
        SgnsConfig sgns;
        sgns.dim = n;
        sgns.window = config.window;
        sgns.epochs = config.epochs;
        sgns.negatives = config.negatives;
        sgns.min_count = config.min_count;
        sgns.initial_lr = config.initial_lr;
        sgns.subsample_threshold = config.subsample_threshold;
        sgns.seed = derive_seed(config.embedding_seed, "embedding-N" + std::to_string(n));
        sgns.threads = config.deterministic ? 1 : config.threads;

        auto embed_start = std::chrono::steady_clock::now();
        auto [vocab, table] = cache_embeddings(train_records, sgns, cache_dir, &outcome.cache);
        double embed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - embed_start)
                .count();

        // Tweet vectors per account, shared by every L and algorithm.
        std::map<std::string, std::vector<TweetVector>> train_tvs, test_tvs;
        for (const auto& r : train_records)
            if (auto tv = tweet_vector(r, table, vocab)) train_tvs[r.account_id].push_back(*tv);
        for (const auto& r : test_records)
            if (auto tv = tweet_vector(r, table, vocab)) test_tvs[r.account_id].push_back(*tv);

        for (int l : config.l_values) {
            std::vector<BlockSample> train_blocks, test_blocks;
            int dropped_train = 0, dropped_test = 0;
            for (auto& [account_id, tvs] : train_tvs) {
                auto blocked = make_blocks(tvs, l, *account_by_id.at(account_id));
                dropped_train += blocked.dropped_tweets;
                for (auto& b : blocked.blocks) train_blocks.push_back(std::move(b));
            }
            for (auto& [account_id, tvs] : test_tvs) {
                auto blocked = make_blocks(tvs, l, *account_by_id.at(account_id));
                dropped_test += blocked.dropped_tweets;
                for (auto& b : blocked.blocks) test_blocks.push_back(std::move(b));
            }

            // Datasets per task, shared across algorithms and seeds.
            std::map<int, std::pair<TaskDataset, TaskDataset>> datasets;
            std::map<int, std::string> dataset_errors;
            for (Task task : config.tasks) {
                try {
                    datasets[static_cast<int>(task)] = {
                        assemble_dataset(train_blocks, accounts, task, Role::train),
                        assemble_dataset(test_blocks, accounts, task, Role::test)};
                } catch (const std::exception& e) {
                    dataset_errors[static_cast<int>(task)] = e.what();
                }
            }

            std::vector<CellJob> jobs;
            for (Task task : config.tasks)
                for (Algorithm algorithm : config.algorithms)
                    for (std::uint64_t seed : config.seeds) {
                        CellJob job;
                        job.key = CellKey{task, algorithm, n, l, seed};
                        job.embed_seconds = embed_seconds;
                        job.dropped_train = dropped_train;
                        job.dropped_test = dropped_test;
                        job.slot = outcome.results.size();
                        auto it = datasets.find(static_cast<int>(task));
                        if (it == datasets.end()) {
                            SweepResult failed;
                            failed.key = job.key;
                            failed.ok = false;
                            failed.error = dataset_errors.at(static_cast<int>(task));
                            outcome.results.push_back(std::move(failed));
                            continue;
                        }
                        job.train_ds = &it->second.first;
                        job.test_ds = &it->second.second;
                        outcome.results.emplace_back();
                        jobs.push_back(job);
                    }

            auto run_job = [&](const CellJob& job) {
                SweepResult result;
                result.key = job.key;
                result.embed_seconds = job.embed_seconds;
                result.dropped_blocks_train = job.dropped_train;
                result.dropped_blocks_test = job.dropped_test;
                try {
                    const TaskDataset& train_ds = *job.train_ds;
                    const TaskDataset& test_ds = *job.test_ds;
                    std::uint64_t cell_seed = derive_seed(
                        job.key.seed, to_string(job.key.task) + "|" +
                                          to_string(job.key.algorithm) + "|N" +
                                          std::to_string(job.key.n) + "|L" +
                                          std::to_string(job.key.l));
                    auto train_start = std::chrono::steady_clock::now();
                    const auto& grid = config.grid_for(job.key.algorithm);
                    auto cv = cross_validate(job.key.algorithm, train_ds, grid,
                                             config.cv_folds, cell_seed, 1);
                    auto model =
                        train_model(train_ds, grid[cv.best_index], cell_seed);
                    result.train_seconds = std::chrono::duration<double>(
                                               std::chrono::steady_clock::now() - train_start)
                                               .count();

                    auto eval_start = std::chrono::steady_clock::now();
                    auto pred = predict(model, test_ds.rows);
                    result.report =
                        make_report(job.key.task, job.key.algorithm, job.key.n, job.key.l,
                                    test_ds.class_names, test_ds.labels, pred);
                    result.best_params = params_to_json(grid[cv.best_index]);

                    // Auxiliary account-level majority vote.
                    std::vector<BlockPrediction> block_preds;
                    for (std::size_t i = 0; i < pred.labels.size(); ++i)
                        block_preds.push_back({test_ds.groups[i], pred.labels[i],
                                               pred.scores(i, pred.labels[i])});
                    if (!block_preds.empty()) {
                        auto votes = account_vote(block_preds);
                        int hits = 0, total = 0;
                        std::map<std::string, int> truth;
                        for (std::size_t i = 0; i < test_ds.labels.size(); ++i)
                            truth[test_ds.groups[i]] = test_ds.labels[i];
                        for (const auto& [acct, label] : votes) {
                            ++total;
                            if (label == truth.at(acct)) ++hits;
                        }
                        result.account_accuracy =
                            total ? static_cast<double>(hits) / total : 0.0;
                    }
                    result.eval_seconds = std::chrono::duration<double>(
                                              std::chrono::steady_clock::now() - eval_start)
                                              .count();
                    result.ok = true;
                } catch (const std::exception& e) {
                    result.ok = false;
                    result.error = e.what();
                }
                outcome.results[job.slot] = std::move(result);
            };

            if (config.threads <= 1 || jobs.size() <= 1) {
                for (const auto& job : jobs) run_job(job);
            } else {
                std::atomic<std::size_t> next{0};
                auto worker = [&]() {
                    for (std::size_t i = next.fetch_add(1); i < jobs.size();
                         i = next.fetch_add(1))
                        run_job(jobs[i]);
                };
                std::vector<std::thread> pool;
                for (int w = 0; w < std::min<int>(config.threads,
                                                  static_cast<int>(jobs.size()));
                     ++w)
                    pool.emplace_back(worker);
                for (auto& t : pool) t.join();
            }
        }
    }
    if (config.deterministic) {
        for (auto& r : outcome.results)
            r.embed_seconds = r.train_seconds = r.eval_seconds = 0.0;
    }
    return outcome;
}

// --- reporting ---

namespace detail {

inline std::string csv_escape(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

} // namespace detail

inline std::string sweep_csv_header() {
    return metrics_csv_header() +
           ",seed,status,reason,account_accuracy,embed_seconds,train_seconds,"
           "eval_seconds,dropped_blocks_train,dropped_blocks_test";
}

inline std::string sweep_csv_row(const SweepResult& r) {
    std::string metrics;
    if (r.ok) {
        metrics = metrics_csv_row(r.report);
    } else {
        metrics = to_string(r.key.task) + "," + to_string(r.key.algorithm) + "," +
                  std::to_string(r.key.n) + "," + std::to_string(r.key.l) +
                  ",nan,nan,nan,";
    }
    return metrics + "," + std::to_string(r.key.seed) + "," + (r.ok ? "ok" : "failed") +
           "," + detail::csv_escape(r.error) + "," + format_metric(r.account_accuracy) +
           "," + format_metric(r.embed_seconds) + "," + format_metric(r.train_seconds) +
           "," + format_metric(r.eval_seconds) + "," +
           std::to_string(r.dropped_blocks_train) + "," +
           std::to_string(r.dropped_blocks_test);
}

/// Writes results.csv, per-cell JSON sidecars, best_by_task.csv,
/// entity_stats.json (per-entity recall distributions with pairwise Welch
/// t-tests), and a plain-text summary.
inline void emit_report(const SweepOutcome& outcome, const std::string& output_dir) {
    if (outcome.results.empty())
        throw std::invalid_argument("emit_report: no results");
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    fs::create_directories(fs::path(output_dir) / "cells");

    auto ordered = outcome.results;
    std::sort(ordered.begin(), ordered.end(), [](const SweepResult& a, const SweepResult& b) {
        auto key = [](const SweepResult& r) {
            return std::tuple(static_cast<int>(r.key.task), static_cast<int>(r.key.algorithm),
                              r.key.n, r.key.l, r.key.seed);
        };
        return key(a) < key(b);
    });

    {
        std::ofstream csv(fs::path(output_dir) / "results.csv");
        if (!csv) throw input_error("cannot write results.csv in " + output_dir);
        csv << sweep_csv_header() << '\n';
        for (const auto& r : ordered) csv << sweep_csv_row(r) << '\n';
    }

    for (const auto& r : ordered) {
        nlohmann::json j;
        j["task"] = to_string(r.key.task);
        j["algorithm"] = to_string(r.key.algorithm);
        j["N"] = r.key.n;
        j["L"] = r.key.l;
        j["seed"] = r.key.seed;
        j["status"] = r.ok ? "ok" : "failed";
        if (!r.ok) j["reason"] = r.error;
        if (r.ok) {
            j["report"] = report_to_json(r.report);
            j["best_params"] = r.best_params;
            j["account_accuracy"] = r.account_accuracy;
        }
        j["timing"] = {{"embed_seconds", r.embed_seconds},
                       {"train_seconds", r.train_seconds},
                       {"eval_seconds", r.eval_seconds}};
        j["dropped_blocks"] = {{"train", r.dropped_blocks_train},
                               {"test", r.dropped_blocks_test}};
        std::string name = to_string(r.key.task) + "_" + to_string(r.key.algorithm) + "_N" +
                           std::to_string(r.key.n) + "_L" + std::to_string(r.key.l) + "_s" +
                           std::to_string(r.key.seed) + ".json";
        std::ofstream cell(fs::path(output_dir) / "cells" / name);
        cell << j.dump(2) << '\n';
    }

    {
        std::ofstream best(fs::path(output_dir) / "best_by_task.csv");
        best << "task,algorithm,N,L,seed,accuracy\n";
        for (int t = 0; t < 3; ++t) {
            const SweepResult* winner = nullptr;
            for (const auto& r : ordered) {
                if (!r.ok || static_cast<int>(r.key.task) != t) continue;
                if (!winner) {
                    winner = &r;
                    continue;
                }
                auto key = [](const SweepResult& x) {
                    return std::tuple(-x.report.accuracy, x.key.n, x.key.l,
                                      static_cast<int>(x.key.algorithm), x.key.seed);
                };
                if (key(r) < key(*winner)) winner = &r;
            }
            if (winner)
                best << to_string(winner->key.task) << ','
                     << to_string(winner->key.algorithm) << ',' << winner->key.n << ','
                     << winner->key.l << ',' << winner->key.seed << ','
                     << format_metric(winner->report.accuracy) << '\n';
        }
    }

    {
        nlohmann::json stats;
        for (int t = 0; t < 3; ++t) {
            Task task = static_cast<Task>(t);
            auto class_names = task_class_names(task);
            nlohmann::json by_algorithm;
            for (int a = 0; a < 5; ++a) {
                Algorithm algorithm = static_cast<Algorithm>(a);
                std::vector<MetricsReport> reports;
                for (const auto& r : ordered)
                    if (r.ok && r.key.task == task && r.key.algorithm == algorithm)
                        reports.push_back(r.report);
                if (reports.empty()) continue;
                nlohmann::json entry;
                std::map<std::string, std::vector<double>> samples;
                for (const auto& name : class_names)
                    samples[name] = per_entity_recall(reports, task, name);
                for (const auto& [name, values] : samples)
                    entry["recall_distributions"][name] = values;
                nlohmann::json tests = nlohmann::json::array();
                for (std::size_t i = 0; i < class_names.size(); ++i)
                    for (std::size_t k = i + 1; k < class_names.size(); ++k) {
                        const auto& sa = samples[class_names[i]];
                        const auto& sb = samples[class_names[k]];
                        nlohmann::json test;
                        test["a"] = class_names[i];
                        test["b"] = class_names[k];
                        if (sa.size() >= 2 && sb.size() >= 2) {
                            auto w = welch_t_test(sa, sb);
                            test["t"] = std::isfinite(w.t) ? nlohmann::json(w.t)
                                                           : nlohmann::json(nullptr);
                            test["df"] = w.df;
                            test["p"] = w.p;
                            test["degenerate"] = w.degenerate;
                        } else {
                            test["skipped"] = "needs >= 2 cells per entity";
                        }
                        tests.push_back(std::move(test));
                    }
                entry["welch_tests"] = std::move(tests);
                by_algorithm[to_string(algorithm)] = std::move(entry);
            }
            if (!by_algorithm.empty()) stats[to_string(task)] = std::move(by_algorithm);
        }
        std::ofstream entity(fs::path(output_dir) / "entity_stats.json");
        entity << stats.dump(2) << '\n';
    }

    {
        std::ofstream summary(fs::path(output_dir) / "summary.txt");
        int ok = 0, failed = 0;
        for (const auto& r : ordered) (r.ok ? ok : failed)++;
        summary << "cells: " << ordered.size() << " (ok " << ok << ", failed " << failed
                << ")\n";
        summary << "tweets ingested: " << outcome.tweets_ingested << ", kept after filter: "
                << outcome.tweets_kept << '\n';
        summary << "embeddings trained: " << outcome.cache.trainings
                << ", cache hits: " << outcome.cache.hits << '\n';
        for (const auto& r : ordered) {
            summary << to_string(r.key.task) << '/' << to_string(r.key.algorithm) << " N="
                    << r.key.n << " L=" << r.key.l << " seed=" << r.key.seed << ": ";
            if (r.ok)
                summary << "accuracy " << format_metric(r.report.accuracy) << ", f1 "
                        << format_metric(r.report.f1) << ", auc "
                        << format_metric(r.report.auc.or_nan()) << '\n';
            else
                summary << "FAILED (" << r.error << ")\n";
        }
    }
}

} // namespace attrsense
