#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "attrsense/common.hpp"
#include "attrsense/corpus.hpp"
#include "attrsense/random.hpp"
#include "attrsense/vocab.hpp"

namespace attrsense {

struct SgnsConfig {
    int dim = 50;
    int window = 5;
    int epochs = 20;
    int negatives = 5;
    double initial_lr = 0.025;
    int min_count = 1;                 // applied by the caller via build_vocab
    double subsample_threshold = 0.0;  // 0 disables subsampling
    double unigram_power = 0.75;
    std::uint64_t seed = 1;
    int threads = 1;                   // >1 trains hogwild-style (non-deterministic)

    void validate() const {
        if (dim < 1) throw std::invalid_argument("sgns: dim must be >= 1");
        if (window < 1) throw std::invalid_argument("sgns: window must be >= 1");
        if (epochs < 1) throw std::invalid_argument("sgns: epochs must be >= 1");
        if (negatives < 1) throw std::invalid_argument("sgns: negatives must be >= 1");
        if (initial_lr <= 0.0) throw std::invalid_argument("sgns: initial_lr must be > 0");
        if (min_count < 1) throw std::invalid_argument("sgns: min_count must be >= 1");
        if (threads < 1) throw std::invalid_argument("sgns: threads must be >= 1");
    }
};

/// Trained word vectors. input_vectors holds the published embeddings, one
/// row per vocabulary word; context_vectors is the training-side table.
struct WordVectorTable {
    int dim = 0;
    Matrix input_vectors;
    Matrix context_vectors;
};

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::int64_t skipped_tokens = 0; // tokens absent from the vocabulary
    std::int64_t total_updates = 0;  // center/context pairs processed
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

struct PairObjective {
    double loss = 0.0;
    std::vector<double> d_center;
    std::vector<double> d_context;
    std::vector<std::vector<double>> d_negatives;
};

/// Negative-sampling loss for one (center, context) pair with k sampled
/// noise words:
///
///   loss = -log sigmoid(c.x) - sum_j log sigmoid(-n_j.x)
///
/// together with its exact partial derivatives. x is the center vector, c
/// the context vector, n_j the negatives.
inline PairObjective sgns_pair_objective(std::span<const double> center,
                                         std::span<const double> context,
                                         const std::vector<std::vector<double>>& negatives) {
    const std::size_t dim = center.size();
    if (context.size() != dim)
        throw std::invalid_argument("sgns_pair_objective: context dimension mismatch");
    for (const auto& n : negatives)
        if (n.size() != dim)
            throw std::invalid_argument("sgns_pair_objective: negative dimension mismatch");

    PairObjective out;
    out.d_center.assign(dim, 0.0);
    out.d_context.assign(dim, 0.0);
    out.d_negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));

    double cx = dot(context, center);
    out.loss = softplus(-cx);
    double g = sigmoid(cx) - 1.0; // d loss / d cx
    for (std::size_t i = 0; i < dim; ++i) {
        out.d_center[i] += g * context[i];
        out.d_context[i] = g * center[i];
    }
    for (std::size_t j = 0; j < negatives.size(); ++j) {
        double nx = dot(std::span<const double>(negatives[j]), center);
        out.loss += softplus(nx);
        double gn = sigmoid(nx); // d loss / d nx
        for (std::size_t i = 0; i < dim; ++i) {
            out.d_center[i] += gn * negatives[j][i];
            out.d_negatives[j][i] = gn * center[i];
        }
    }
    return out;
}

namespace detail {

struct SgnsCorpus {
    std::vector<std::vector<int>> sentences; // in-vocabulary token ids per tweet
    std::int64_t positions = 0;              // tokens in sentences of length >= 2
    std::int64_t skipped = 0;
};

inline SgnsCorpus index_corpus(const std::vector<TweetRecord>& tweets,
                               const Vocabulary& vocab) {
    SgnsCorpus out;
    for (const auto& t : tweets) {
        std::vector<int> ids;
        ids.reserve(t.tokens.size());
        for (const auto& tok : t.tokens) {
            int id = vocab.id_of(tok);
            if (id < 0)
                ++out.skipped;
            else
                ids.push_back(id);
        }
        if (ids.size() >= 2) out.positions += static_cast<std::int64_t>(ids.size());
        if (!ids.empty()) out.sentences.push_back(std::move(ids));
    }
    return out;
}

} // namespace detail

/// Trains skip-gram word vectors with negative sampling. Contexts are drawn
/// with a per-position window uniform in 1..window and never cross tweet
/// boundaries; negatives follow unigram^0.75; the learning rate decays
/// linearly from initial_lr to initial_lr/1e4 over all scheduled positions.
/// With threads == 1 the result is bit-reproducible for a fixed seed.
inline WordVectorTable train_sgns(const std::vector<TweetRecord>& tweets,
                                  const Vocabulary& vocab, const SgnsConfig& config,
                                  TrainStats* stats = nullptr) {
    config.validate();
    if (vocab.size() == 0) throw std::invalid_argument("train_sgns: empty vocabulary");

    detail::SgnsCorpus corpus = detail::index_corpus(tweets, vocab);
    if (corpus.positions == 0)
        throw std::invalid_argument("train_sgns: empty effective corpus");

    const int dim = config.dim;
    const std::size_t vocab_size = vocab.size();

    WordVectorTable table;
    table.dim = dim;
    table.input_vectors = Matrix(vocab_size, dim);
    table.context_vectors = Matrix(vocab_size, dim);
    {
        Rng init_rng(derive_seed(config.seed, "sgns-init"));
        auto& data = table.input_vectors.data();
        for (double& v : data) v = (init_rng.uniform() - 0.5) / dim;
    }

    std::vector<double> noise_weights(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i)
        noise_weights[i] = std::pow(static_cast<double>(vocab.counts[i]),
                                    config.unigram_power);
    AliasSampler noise(noise_weights);

    std::int64_t retained_tokens = 0;
    for (auto c : vocab.counts) retained_tokens += c;

    const std::int64_t schedule_total =
        static_cast<std::int64_t>(config.epochs) * corpus.positions;
    const double lr_floor_frac = 1e-4;

    std::atomic<std::int64_t> processed{0};
    std::vector<double> epoch_loss_sum(config.epochs, 0.0);
    std::vector<std::int64_t> epoch_loss_count(config.epochs, 0);
    std::mutex stats_mutex;

    double* input = table.input_vectors.data().data();
    double* context = table.context_vectors.data().data();

    auto worker = [&](int worker_id, int num_workers) {
        Rng rng(derive_seed(config.seed, "sgns-worker-" + std::to_string(worker_id)));
        std::vector<double> center_grad(dim);
        std::int64_t local_processed = 0;
        std::int64_t flush_at = 256;
        double lr = config.initial_lr;
        auto refresh_lr = [&]() {
            double frac = static_cast<double>(processed.load(std::memory_order_relaxed)) /
                          static_cast<double>(schedule_total);
            if (frac > 1.0) frac = 1.0;
            lr = config.initial_lr * (1.0 - (1.0 - lr_floor_frac) * frac);
        };
        refresh_lr();

        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            double loss_sum = 0.0;
            std::int64_t loss_count = 0;
            for (std::size_t s = worker_id; s < corpus.sentences.size(); s += num_workers) {
                const std::vector<int>& sentence_full = corpus.sentences[s];
                const std::vector<int>* sentence = &sentence_full;
                std::vector<int> subsampled;
                if (config.subsample_threshold > 0.0) {
                    subsampled.reserve(sentence_full.size());
                    for (int id : sentence_full) {
                        double freq = static_cast<double>(vocab.counts[id]) /
                                      static_cast<double>(retained_tokens);
                        double keep =
                            (std::sqrt(freq / config.subsample_threshold) + 1.0) *
                            config.subsample_threshold / freq;
                        if (keep >= 1.0 || rng.uniform() < keep) subsampled.push_back(id);
                    }
                    sentence = &subsampled;
                }
                const int len = static_cast<int>(sentence->size());
                if (len < 2) continue;
                for (int pos = 0; pos < len; ++pos) {
                    const int center_id = (*sentence)[pos];
                    double* x = input + static_cast<std::size_t>(center_id) * dim;
                    const int b = 1 + static_cast<int>(rng.below(config.window));
                    const int lo = std::max(0, pos - b);
                    const int hi = std::min(len - 1, pos + b);
                    for (int j = lo; j <= hi; ++j) {
                        if (j == pos) continue;
                        const int context_id = (*sentence)[j];
                        std::fill(center_grad.begin(), center_grad.end(), 0.0);
                        double bundle_loss = 0.0;
                        for (int k = 0; k <= config.negatives; ++k) {
                            int target;
                            double label;
                            if (k == 0) {
                                target = context_id;
                                label = 1.0;
                            } else {
                                target = static_cast<int>(noise.sample(rng));
                                if (target == context_id) continue;
                                label = 0.0;
                            }
                            double* c = context + static_cast<std::size_t>(target) * dim;
                            double f = 0.0;
                            for (int d = 0; d < dim; ++d) f += x[d] * c[d];
                            bundle_loss += label > 0.5 ? softplus(-f) : softplus(f);
                            const double g = label - sigmoid(f);
                            for (int d = 0; d < dim; ++d) {
                                center_grad[d] += g * c[d];
                                c[d] += lr * g * x[d];
                            }
                        }
                        for (int d = 0; d < dim; ++d) x[d] += lr * center_grad[d];
                        loss_sum += bundle_loss;
                        ++loss_count;
                    }
                    if (++local_processed >= flush_at) {
                        processed.fetch_add(local_processed, std::memory_order_relaxed);
                        local_processed = 0;
                        refresh_lr();
                    }
                }
            }
            std::lock_guard<std::mutex> lock(stats_mutex);
            epoch_loss_sum[epoch] += loss_sum;
            epoch_loss_count[epoch] += loss_count;
        }
        processed.fetch_add(local_processed, std::memory_order_relaxed);
    };

    const int num_workers =
        std::min<int>(config.threads, static_cast<int>(corpus.sentences.size()));
    if (num_workers <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(num_workers);
        for (int w = 0; w < num_workers; ++w)
            pool.emplace_back(worker, w, num_workers);
        for (auto& t : pool) t.join();
    }

    if (stats) {
        stats->skipped_tokens = corpus.skipped;
        stats->epoch_mean_loss.clear();
        stats->total_updates = 0;
        for (int e = 0; e < config.epochs; ++e) {
            stats->epoch_mean_loss.push_back(
                epoch_loss_count[e] ? epoch_loss_sum[e] / epoch_loss_count[e] : 0.0);
            stats->total_updates += epoch_loss_count[e];
        }
    }
    return table;
}

} // namespace attrsense
