#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "attrsense/vocab.hpp"
#include "helpers.hpp"

using namespace attrsense;

TEST_CASE("build_vocab counts and orders words") {
    auto records = testutil::records_from_tokens({{"a", "a", "b"}});
    auto vocab = build_vocab(records, 1);
    REQUIRE(vocab.words == std::vector<std::string>{"a", "b"});
    CHECK(vocab.counts == std::vector<std::int64_t>{2, 1});
    CHECK(vocab.total_tokens == 3);
    CHECK(vocab.id_of("a") == 0);
    CHECK(vocab.id_of("b") == 1);
    CHECK(vocab.id_of("zzz") == -1);
}

TEST_CASE("build_vocab applies min_count but total counts everything") {
    auto records = testutil::records_from_tokens({{"a", "a", "b"}});
    auto vocab = build_vocab(records, 2);
    CHECK(vocab.words == std::vector<std::string>{"a"});
    CHECK(vocab.total_tokens == 3);
}

TEST_CASE("build_vocab matches a brute-force counter on a synthetic corpus") {
    auto records = testutil::records_from_tokens({
        {"the", "cat", "sat"},
        {"the", "dog", "sat", "sat"},
        {"a", "cat", "and", "a", "dog"},
        {"dog", "dog", "dog"},
        {"zebra"},
        {"and", "the", "cat"},
    });
    std::map<std::string, std::int64_t> oracle;
    std::int64_t total = 0;
    for (const auto& r : records)
        for (const auto& t : r.tokens) {
            ++oracle[t];
            ++total;
        }

    auto vocab = build_vocab(records, 1);
    CHECK(vocab.total_tokens == total);
    REQUIRE(vocab.size() == oracle.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
        CHECK(vocab.counts[i] == oracle.at(vocab.words[i]));
    // Ordering: count descending, ties lexicographic.
    for (std::size_t i = 1; i < vocab.size(); ++i) {
        bool ordered = vocab.counts[i - 1] > vocab.counts[i] ||
                       (vocab.counts[i - 1] == vocab.counts[i] &&
                        vocab.words[i - 1] < vocab.words[i]);
        CHECK(ordered);
    }
}

TEST_CASE("build_vocab rejects an empty corpus") {
    std::vector<TweetRecord> none;
    CHECK_THROWS_AS(build_vocab(none, 1), std::invalid_argument);
    auto empty_tokens = testutil::records_from_tokens({{}, {}});
    CHECK_THROWS_AS(build_vocab(empty_tokens, 1), std::invalid_argument);
}
