#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "attrsense/corpus.hpp"
#include "attrsense/random.hpp"
#include "helpers.hpp"

using namespace attrsense;

TEST_CASE("tokenize_default basic rules") {
    CHECK(tokenize_default("") == std::vector<std::string>{});
    CHECK(tokenize_default("a b c d") == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(tokenize_default("Hello, World!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize_default("see https://x.example now") ==
          std::vector<std::string>{"see", "<url>", "now"});
    CHECK(tokenize_default("ask @alice about it") ==
          std::vector<std::string>{"ask", "<mention>", "about", "it"});
    CHECK(tokenize_default("(@alice)") == std::vector<std::string>{"<mention>"});
    CHECK(tokenize_default("www.example.com rocks") ==
          std::vector<std::string>{"<url>", "rocks"});
    CHECK(tokenize_default("...") == std::vector<std::string>{});
    CHECK(tokenize_default("ÉTÉ Größe") == std::vector<std::string>{"été", "größe"});
    // Ideographic space and CJK punctuation.
    CHECK(tokenize_default("猫\u3000犬。") == std::vector<std::string>{"猫", "犬"});
}

TEST_CASE("tokenize_default matches whitespace split on plain words") {
    std::string text = "a b c d";
    std::istringstream ss(text);
    std::vector<std::string> reference;
    std::string w;
    while (ss >> w) reference.push_back(w);
    CHECK(tokenize_default(text) == reference);
}

TEST_CASE("tokenize_default never emits empty or whitespace-bearing tokens") {
    Rng rng(7);
    const std::string alphabet = "ab @.,!h:/t\tp\u00e9";
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        int len = static_cast<int>(rng.below(40));
        for (int i = 0; i < len; ++i) text += alphabet[rng.below(alphabet.size())];
        if (!utf8::valid(text)) continue;
        for (const auto& tok : tokenize_default(text)) {
            CHECK(!tok.empty());
            for (char c : tok) CHECK(!std::isspace(static_cast<unsigned char>(c)));
        }
    }
}

TEST_CASE("ingest_tweets assigns per-account seq in file order") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"one two three four"})" "\n"
        R"({"account_id":"u1","text":"second tweet here yes"})" "\n"
        R"({"account_id":"u1","text":"third tweet here yes"})" "\n");
    auto records = ingest_tweets(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].seq == 0);
    CHECK(records[1].seq == 1);
    CHECK(records[2].seq == 2);
    CHECK(records[0].tokens == std::vector<std::string>{"one", "two", "three", "four"});
}

TEST_CASE("ingest_tweets on an empty file returns an empty list") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "tweets.jsonl", "");
    CHECK(ingest_tweets(path).empty());
}

TEST_CASE("ingest_tweets reports malformed lines by number") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"fine tweet here ok"})" "\n"
        "{this is not json}\n");
    CHECK_THROWS_WITH(ingest_tweets(path), Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("ingest_tweets rejects invalid UTF-8 naming the line") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "tweets.jsonl",
                                     "{\"account_id\":\"u1\",\"text\":\"a\xff b\"}\n");
    CHECK_THROWS_WITH(ingest_tweets(path), Catch::Matchers::ContainsSubstring(":1"));
}

TEST_CASE("ingest_tweets timestamp overrides file order") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"late tweet","timestamp":200})" "\n"
        R"({"account_id":"u1","text":"early tweet","timestamp":100})" "\n");
    auto records = ingest_tweets(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].seq == 1); // late
    CHECK(records[1].seq == 0); // early
}

TEST_CASE("ingest_tweets rejects mixed timestamp presence within an account") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"with ts","timestamp":200})" "\n"
        R"({"account_id":"u1","text":"without ts"})" "\n");
    CHECK_THROWS_AS(ingest_tweets(path), input_error);
}

TEST_CASE("ingest_tweets pretokenized mode") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"ignored","tokens":["X","Y","Z","W"]})" "\n");
    TokenizerSpec spec;
    spec.mode = TokenizerMode::pretokenized;
    auto records = ingest_tweets(path, spec);
    REQUIRE(records.size() == 1);
    CHECK(records[0].tokens == std::vector<std::string>{"X", "Y", "Z", "W"});

    auto bad = testutil::write_file(dir / "bad.jsonl",
                                    R"({"account_id":"u1","text":"no tokens"})" "\n");
    CHECK_THROWS_AS(ingest_tweets(bad, spec), input_error);
}

TEST_CASE("ingest_tweets external command tokenizer") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(
        dir / "tweets.jsonl",
        R"({"account_id":"u1","text":"AA BB CC"})" "\n");
    TokenizerSpec spec;
    spec.mode = TokenizerMode::external_command;
    spec.external_command = "tr 'A-Z' 'a-z'";
    auto records = ingest_tweets(path, spec);
    REQUIRE(records.size() == 1);
    CHECK(records[0].tokens == std::vector<std::string>{"aa", "bb", "cc"});
}

TEST_CASE("filter_short keeps records with at least min_tokens tokens") {
    auto records = testutil::records_from_tokens({
        {"a", "b", "c"},
        {"a", "b", "c", "d"},
        {"a", "b", "c", "d", "e"},
    });
    auto kept = filter_short(records, 4);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].seq == 1);
    CHECK(kept[1].seq == 2);

    auto all = filter_short(testutil::records_from_tokens(
        std::vector<std::vector<std::string>>(10, {"a", "b", "c", "d"})));
    CHECK(all.size() == 10);
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(all[i].seq == static_cast<std::int64_t>(i));

    CHECK_THROWS_AS(filter_short(records, 0), std::invalid_argument);
}

TEST_CASE("filter_short is idempotent") {
    Rng rng(11);
    std::vector<std::vector<std::string>> lists;
    for (int i = 0; i < 50; ++i) {
        std::vector<std::string> toks(rng.below(8), "w");
        lists.push_back(toks);
    }
    auto records = testutil::records_from_tokens(lists);
    auto once = filter_short(records, 4);
    auto twice = filter_short(once, 4);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].seq == twice[i].seq);
        CHECK(once[i].tokens.size() >= 4);
    }
}

TEST_CASE("load_labels parses valid rows") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "labels.csv",
                                     "account_id,gender,occupation,age_group,role\n"
                                     "u1,male,politician,digital_immigrant,train\n"
                                     "u2,female,it_engineer,unknown,test\n");
    auto accounts = load_labels(path);
    REQUIRE(accounts.size() == 2);
    CHECK(accounts[0].account_id == "u1");
    CHECK(accounts[0].gender == Gender::male);
    CHECK(accounts[0].occupation == Occupation::politician);
    CHECK(accounts[0].age_group == AgeGroup::digital_immigrant);
    CHECK(accounts[0].role == Role::train);
    CHECK(accounts[1].occupation == Occupation::it_engineer);
}

TEST_CASE("load_labels rejects unknown enum literals naming row and field") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "labels.csv",
                                     "account_id,gender,occupation,age_group,role\n"
                                     "u2,male,astronaut,unknown,test\n");
    CHECK_THROWS_WITH(load_labels(path),
                      Catch::Matchers::ContainsSubstring("row 2") &&
                          Catch::Matchers::ContainsSubstring("occupation"));
}

TEST_CASE("load_labels rejects duplicate account ids") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "labels.csv",
                                     "account_id,gender,occupation,age_group,role\n"
                                     "u1,male,politician,unknown,train\n"
                                     "u1,female,writer,unknown,test\n");
    CHECK_THROWS_WITH(load_labels(path), Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("load_labels rejects a bad header") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "labels.csv", "id,g,o,a,r\nu1,male,writer,unknown,train\n");
    CHECK_THROWS_AS(load_labels(path), input_error);
}
