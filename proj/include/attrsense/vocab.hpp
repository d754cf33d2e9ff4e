#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrsense/common.hpp"
#include "attrsense/corpus.hpp"

namespace attrsense {

struct Vocabulary {
    std::vector<std::string> words;            // ordered by count desc, ties lexicographic
    std::vector<std::int64_t> counts;          // aligned with words
    std::unordered_map<std::string, int> index;
    std::int64_t total_tokens = 0;             // all tokens before min_count exclusion

    std::size_t size() const { return words.size(); }

    /// Index of a word, or -1 when out of vocabulary.
    int id_of(const std::string& word) const {
        auto it = index.find(word);
        return it == index.end() ? -1 : it->second;
    }
};

inline Vocabulary build_vocab(const std::vector<TweetRecord>& tweets, int min_count = 1) {
    if (min_count < 1)
        throw std::invalid_argument("build_vocab: min_count must be >= 1");
    std::unordered_map<std::string, std::int64_t> counter;
    std::int64_t total = 0;
    for (const auto& t : tweets)
        for (const auto& tok : t.tokens) {
            ++counter[tok];
            ++total;
        }
    if (total == 0) throw std::invalid_argument("build_vocab: empty corpus");

    Vocabulary vocab;
    vocab.total_tokens = total;
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(counter.size());
    for (auto& [word, count] : counter)
        if (count >= min_count) entries.emplace_back(word, count);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    vocab.words.reserve(entries.size());
    vocab.counts.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        vocab.words.push_back(entries[i].first);
        vocab.counts.push_back(entries[i].second);
        vocab.index.emplace(entries[i].first, static_cast<int>(i));
    }
    return vocab;
}

} // namespace attrsense
