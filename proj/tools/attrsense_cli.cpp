#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrsense/corpus.hpp"
#include "attrsense/cross_validation.hpp"
#include "attrsense/metrics.hpp"
#include "attrsense/models.hpp"
#include "attrsense/sgns.hpp"
#include "attrsense/stats.hpp"
#include "attrsense/sweep.hpp"
#include "attrsense/vector_io.hpp"
#include "attrsense/vectorize.hpp"
#include "attrsense/vocab.hpp"

namespace fs = std::filesystem;
using namespace attrsense;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    bool deterministic = false;
};

TokenizerSpec tokenizer_from(const std::string& mode, const std::string& command) {
    TokenizerSpec spec;
    if (mode == "unicode_default")
        spec.mode = TokenizerMode::unicode_default;
    else if (mode == "pretokenized")
        spec.mode = TokenizerMode::pretokenized;
    else if (mode == "external_command")
        spec.mode = TokenizerMode::external_command;
    else
        throw input_error("unknown tokenizer mode '" + mode + "'");
    spec.external_command = command;
    if (spec.mode == TokenizerMode::external_command && command.empty())
        throw input_error("external_command tokenizer needs --tokenizer-command");
    return spec;
}

std::vector<TweetRecord> load_filtered(const std::string& tweets_path,
                                       const TokenizerSpec& tokenizer, int min_tokens) {
    auto records = ingest_tweets(tweets_path, tokenizer);
    return filter_short(records, min_tokens);
}

std::vector<TweetRecord> restrict_role(std::vector<TweetRecord> records,
                                       const std::vector<LabeledAccount>& accounts,
                                       Role role) {
    std::unordered_map<std::string, Role> roles;
    for (const auto& a : accounts) roles.emplace(a.account_id, a.role);
    std::vector<TweetRecord> kept;
    for (auto& r : records) {
        auto it = roles.find(r.account_id);
        if (it == roles.end())
            throw input_error("tweets reference unlabeled account '" + r.account_id + "'");
        if (it->second == role) kept.push_back(std::move(r));
    }
    return kept;
}

int run_ingest(const std::string& tweets_path, const std::string& out_path,
               const TokenizerSpec& tokenizer, int min_tokens) {
    auto records = ingest_tweets(tweets_path, tokenizer);
    auto kept = filter_short(records, min_tokens);
    std::ofstream out(out_path);
    if (!out) throw input_error("cannot write " + out_path);
    std::set<std::string> accounts;
    for (const auto& r : kept) {
        nlohmann::json j;
        j["account_id"] = r.account_id;
        j["text"] = r.text;
        j["tokens"] = r.tokens;
        if (r.timestamp) j["timestamp"] = *r.timestamp;
        out << j.dump() << '\n';
        accounts.insert(r.account_id);
    }
    std::printf("ingested %zu tweets, kept %zu with >= %d tokens from %zu accounts -> %s\n",
                records.size(), kept.size(), min_tokens, accounts.size(),
                out_path.c_str());
    return 0;
}

int run_train_embeddings(const std::string& tweets_path, const std::string& labels_path,
                         const std::string& out_path, const TokenizerSpec& tokenizer,
                         int min_tokens, SgnsConfig sgns, bool train_role_only) {
    auto records = load_filtered(tweets_path, tokenizer, min_tokens);
    if (train_role_only) {
        if (labels_path.empty())
            throw input_error("--train-role-only requires --labels");
        records = restrict_role(std::move(records), load_labels(labels_path), Role::train);
    }
    auto vocab = build_vocab(records, sgns.min_count);
    TrainStats stats;
    auto table = train_sgns(records, vocab, sgns, &stats);
    save_vectors(table, vocab, out_path);
    std::printf("trained %d-dim vectors for %zu words (%d epochs, final mean loss %.4f) -> %s\n",
                sgns.dim, vocab.size(), sgns.epochs,
                stats.epoch_mean_loss.empty() ? 0.0 : stats.epoch_mean_loss.back(),
                out_path.c_str());
    return 0;
}

int run_vectorize(const std::string& tweets_path, const std::string& vectors_path,
                  const std::string& labels_path, const TokenizerSpec& tokenizer,
                  int min_tokens, Task task, Role role, int block_size,
                  const std::string& out_path) {
    auto records = load_filtered(tweets_path, tokenizer, min_tokens);
    auto accounts = load_labels(labels_path);
    records = restrict_role(std::move(records), accounts, role);
    auto [vocab, table] = load_vectors(vectors_path);

    std::unordered_map<std::string, const LabeledAccount*> by_id;
    for (const auto& a : accounts) by_id.emplace(a.account_id, &a);
    std::map<std::string, std::vector<TweetVector>> per_account;
    std::int64_t all_oov = 0;
    for (const auto& r : records) {
        if (auto tv = tweet_vector(r, table, vocab))
            per_account[r.account_id].push_back(*tv);
        else
            ++all_oov;
    }
    std::vector<BlockSample> blocks;
    int dropped = 0;
    for (auto& [account_id, tvs] : per_account) {
        auto blocked = make_blocks(tvs, block_size, *by_id.at(account_id));
        dropped += blocked.dropped_tweets;
        for (auto& b : blocked.blocks) blocks.push_back(std::move(b));
    }
    auto dataset = assemble_dataset(blocks, accounts, task, role);
    save_dataset_csv(dataset, out_path);
    std::printf("vectorized %zu blocks (L=%d, N=%d, %d tweets dropped in partial blocks, "
                "%lld all-OOV tweets skipped) for task %s -> %s\n",
                dataset.size(), block_size, table.dim, dropped,
                static_cast<long long>(all_oov), to_string(task).c_str(),
                out_path.c_str());
    return 0;
}

int run_train(const std::string& dataset_path, Task task, Algorithm algorithm,
              const std::string& params_json, const std::string& grid_json, int cv_folds,
              const std::string& out_path, const GlobalOptions& global) {
    auto dataset = load_dataset_csv(dataset_path, task);
    ModelParams params = default_params(algorithm);
    if (!grid_json.empty()) {
        nlohmann::json j = nlohmann::json::parse(grid_json, nullptr, false);
        if (j.is_discarded() || !j.is_array())
            throw input_error("--cv-grid must be a JSON array of candidates");
        std::vector<ModelParams> grid;
        for (const auto& c : j) grid.push_back(params_from_json(algorithm, c));
        auto cv = cross_validate(algorithm, dataset, grid, cv_folds, global.seed,
                                 global.deterministic ? 1 : global.threads);
        params = grid[cv.best_index];
        std::printf("cross-validation selected candidate %zu of %zu: %s\n",
                    cv.best_index + 1, grid.size(), params_to_json(params).dump().c_str());
    } else if (!params_json.empty()) {
        nlohmann::json j = nlohmann::json::parse(params_json, nullptr, false);
        if (j.is_discarded()) throw input_error("--params must be valid JSON");
        params = params_from_json(algorithm, j);
    }
    auto model = train_model(dataset, params, global.seed,
                             global.deterministic ? 1 : global.threads);
    save_model(model, out_path);
    auto pred = predict(model, dataset.rows);
    int hits = 0;
    for (std::size_t i = 0; i < dataset.labels.size(); ++i)
        if (pred.labels[i] == dataset.labels[i]) ++hits;
    std::printf("trained %s on %zu rows (training accuracy %.4f) -> %s\n",
                to_string(algorithm).c_str(), dataset.size(),
                static_cast<double>(hits) / static_cast<double>(dataset.size()),
                out_path.c_str());
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& dataset_path,
                 Task task, int block_size, const std::string& out_prefix) {
    auto model = load_model(model_path);
    auto dataset = load_dataset_csv(dataset_path, task);
    auto pred = predict(model, dataset.rows);
    auto report = make_report(task, model.algorithm, model.dim, block_size,
                              dataset.class_names, dataset.labels, pred);
    {
        std::ofstream csv(out_prefix + ".csv");
        if (!csv) throw input_error("cannot write " + out_prefix + ".csv");
        csv << metrics_csv_header() << '\n' << metrics_csv_row(report) << '\n';
        std::ofstream json_out(out_prefix + ".json");
        json_out << report_to_json(report).dump(2) << '\n';
    }
    std::printf("%s %s: accuracy %.4f f1 %.4f auc %s on %zu rows -> %s.csv %s.json\n",
                to_string(task).c_str(), to_string(model.algorithm).c_str(),
                report.accuracy, report.f1, format_metric(report.auc.or_nan()).c_str(),
                dataset.size(), out_prefix.c_str(), out_prefix.c_str());
    return 0;
}

int run_sweep_cmd(const std::string& config_path, const GlobalOptions& global,
                  bool seed_set, bool threads_set, bool deterministic_set) {
    auto config = load_sweep_config(config_path);
    if (seed_set) config.seeds = {global.seed};
    if (threads_set) config.threads = global.threads;
    if (deterministic_set) config.deterministic = global.deterministic;
    auto outcome = run_sweep(config);
    emit_report(outcome, config.output_dir);
    int ok = 0, failed = 0;
    for (const auto& r : outcome.results) (r.ok ? ok : failed)++;
    std::printf("sweep complete: %d cells ok, %d failed, %d embeddings trained, "
                "%d cache hits -> %s/results.csv\n",
                ok, failed, outcome.cache.trainings, outcome.cache.hits,
                config.output_dir.c_str());
    return 0;
}

int run_report(const std::string& results_dir) {
    fs::path cells = fs::path(results_dir) / "cells";
    if (!fs::is_directory(cells))
        throw input_error("no cells/ directory under " + results_dir);
    SweepOutcome outcome;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cells))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw input_error("malformed cell file: " + file.string());
        SweepResult r;
        r.key.task = enum_from_string<Task>(j.at("task").get<std::string>());
        r.key.algorithm = enum_from_string<Algorithm>(j.at("algorithm").get<std::string>());
        r.key.n = j.at("N").get<int>();
        r.key.l = j.at("L").get<int>();
        r.key.seed = j.at("seed").get<std::uint64_t>();
        r.ok = j.at("status").get<std::string>() == "ok";
        if (r.ok) {
            r.report = report_from_json(j.at("report"));
            r.best_params = j.value("best_params", nlohmann::json());
            r.account_accuracy = j.value("account_accuracy", 0.0);
        } else {
            r.error = j.value("reason", "");
        }
        r.embed_seconds = j.at("timing").value("embed_seconds", 0.0);
        r.train_seconds = j.at("timing").value("train_seconds", 0.0);
        r.eval_seconds = j.at("timing").value("eval_seconds", 0.0);
        r.dropped_blocks_train = j.at("dropped_blocks").value("train", 0);
        r.dropped_blocks_test = j.at("dropped_blocks").value("test", 0);
        outcome.results.push_back(std::move(r));
    }
    emit_report(outcome, results_dir);
    std::printf("regenerated reports from %zu cells -> %s\n", outcome.results.size(),
                results_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"attrsense: infer author attributes from short-text posts"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    auto* seed_opt = app.add_option("--seed", global.seed, "Random seed");
    auto* threads_opt = app.add_option("--threads", global.threads, "Worker threads");
    auto* det_opt = app.add_flag("--deterministic", global.deterministic,
                                 "Single-threaded reproducible numerics");

    std::string tweets_path, labels_path, out_path, vectors_path, dataset_path,
        model_path, config_path, results_dir;
    std::string tokenizer_mode = "unicode_default", tokenizer_command;
    std::string task_name = "gender", algo_name = "linear_svc", role_name = "train";
    std::string params_json, grid_json;
    int min_tokens = 4, block_size = 1, cv_folds = 10;
    SgnsConfig sgns;

    auto add_tokenizer_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tokenizer", tokenizer_mode,
                        "unicode_default|pretokenized|external_command");
        cmd->add_option("--tokenizer-command", tokenizer_command,
                        "Command reading lines of text, writing lines of tokens");
        cmd->add_option("--min-tokens", min_tokens, "Minimum tokens per kept tweet");
    };

    auto* ingest = app.add_subcommand("ingest", "Tokenize and filter a tweets file");
    ingest->add_option("--tweets", tweets_path, "JSON-lines tweets file")->required();
    ingest->add_option("--out", out_path, "Output tokenized JSON-lines file")->required();
    add_tokenizer_flags(ingest);

    auto* embed = app.add_subcommand("train-embeddings",
                                     "Train skip-gram word vectors");
    embed->add_option("--tweets", tweets_path)->required();
    embed->add_option("--out", out_path, "Output vector file")->required();
    embed->add_option("--labels", labels_path);
    bool train_role_only = false;
    embed->add_flag("--train-role-only", train_role_only,
                    "Use tweets from train-role accounts only (needs --labels)");
    embed->add_option("--dim", sgns.dim, "Embedding dimension N");
    embed->add_option("--window", sgns.window);
    embed->add_option("--epochs", sgns.epochs);
    embed->add_option("--negatives", sgns.negatives);
    embed->add_option("--min-count", sgns.min_count);
    embed->add_option("--lr", sgns.initial_lr);
    embed->add_option("--subsample", sgns.subsample_threshold);
    add_tokenizer_flags(embed);

    auto* vectorize = app.add_subcommand("vectorize",
                                         "Build labeled block datasets from vectors");
    vectorize->add_option("--tweets", tweets_path)->required();
    vectorize->add_option("--vectors", vectors_path)->required();
    vectorize->add_option("--labels", labels_path)->required();
    vectorize->add_option("--out", out_path, "Output dataset CSV")->required();
    vectorize->add_option("--task", task_name, "gender|occupation|age_group");
    vectorize->add_option("--role", role_name, "train|test");
    vectorize->add_option("--block-size", block_size, "Tweets per block L");
    add_tokenizer_flags(vectorize);

    auto* train = app.add_subcommand("train", "Train one classifier on a dataset");
    train->add_option("--dataset", dataset_path)->required();
    train->add_option("--out", out_path, "Output model file")->required();
    train->add_option("--task", task_name);
    train->add_option("--algo", algo_name,
                      "linear_svc|knn|adaboost|random_forest|neural_net");
    train->add_option("--params", params_json, "Hyperparameters as inline JSON");
    train->add_option("--cv-grid", grid_json,
                      "JSON array of candidates; selects by cross-validation");
    train->add_option("--cv-folds", cv_folds);

    auto* evaluate = app.add_subcommand("evaluate", "Score a model on a dataset");
    evaluate->add_option("--model", model_path)->required();
    evaluate->add_option("--dataset", dataset_path)->required();
    evaluate->add_option("--out", out_path, "Output prefix for .csv/.json")->required();
    evaluate->add_option("--task", task_name);
    evaluate->add_option("--block-size", block_size, "L annotation for the report");

    auto* sweep = app.add_subcommand("sweep", "Run the full experiment grid");
    sweep->add_option("--config", config_path, "Sweep config file")->required();

    auto* report = app.add_subcommand("report", "Regenerate reports from sweep cells");
    report->add_option("--results", results_dir, "Sweep output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        auto tokenizer = tokenizer_from(tokenizer_mode, tokenizer_command);
        sgns.seed = global.seed;
        sgns.threads = global.deterministic ? 1 : global.threads;
        if (*ingest) return run_ingest(tweets_path, out_path, tokenizer, min_tokens);
        if (*embed)
            return run_train_embeddings(tweets_path, labels_path, out_path, tokenizer,
                                        min_tokens, sgns, train_role_only);
        if (*vectorize)
            return run_vectorize(tweets_path, vectors_path, labels_path, tokenizer,
                                 min_tokens, enum_from_string<Task>(task_name),
                                 enum_from_string<Role>(role_name), block_size, out_path);
        if (*train)
            return run_train(dataset_path, enum_from_string<Task>(task_name),
                             enum_from_string<Algorithm>(algo_name), params_json,
                             grid_json, cv_folds, out_path, global);
        if (*evaluate)
            return run_evaluate(model_path, dataset_path,
                                enum_from_string<Task>(task_name), block_size, out_path);
        if (*sweep)
            return run_sweep_cmd(config_path, global, seed_opt->count() > 0,
                                 threads_opt->count() > 0, det_opt->count() > 0);
        if (*report) return run_report(results_dir);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
