#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "attrsense/vector_io.hpp"
#include "helpers.hpp"

using namespace attrsense;

namespace {

std::pair<Vocabulary, WordVectorTable> random_table(int words, int dim, std::uint64_t seed) {
    Vocabulary vocab;
    for (int i = 0; i < words; ++i) {
        vocab.words.push_back("w" + std::to_string(i));
        vocab.counts.push_back(1);
        vocab.index.emplace(vocab.words.back(), i);
    }
    WordVectorTable table;
    table.dim = dim;
    table.input_vectors = Matrix(words, dim);
    Rng rng(seed);
    for (double& v : table.input_vectors.data()) v = rng.uniform(-2.0, 2.0);
    return {vocab, table};
}

} // namespace

TEST_CASE("save_vectors writes header plus one line per word") {
    auto [vocab, table] = random_table(2, 3, 1);
    auto dir = testutil::temp_dir();
    auto path = (dir / "vecs.txt").string();
    save_vectors(table, vocab, path);

    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "2 3");
    CHECK(lines[1].starts_with("w0 "));
}

TEST_CASE("vector file round-trip preserves components") {
    auto [vocab, table] = random_table(20, 50, 2);
    auto dir = testutil::temp_dir();
    auto path = (dir / "vecs.txt").string();
    save_vectors(table, vocab, path);
    auto [loaded_vocab, loaded] = load_vectors(path);

    REQUIRE(loaded.dim == 50);
    REQUIRE(loaded_vocab.words == vocab.words);
    double worst = 0.0;
    for (std::size_t i = 0; i < table.input_vectors.data().size(); ++i)
        worst = std::max(worst, std::abs(table.input_vectors.data()[i] -
                                         loaded.input_vectors.data()[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("load_vectors rejects arity mismatches with a line number") {
    auto dir = testutil::temp_dir();
    auto path = testutil::write_file(dir / "bad.txt", "2 3\nw0 0.1 0.2 0.3\nw1 0.1 0.2\n");
    CHECK_THROWS_WITH(load_vectors(path), Catch::Matchers::ContainsSubstring(":3"));
}

TEST_CASE("load_vectors rejects malformed headers") {
    auto dir = testutil::temp_dir();
    CHECK_THROWS_AS(load_vectors(testutil::write_file(dir / "h1.txt", "banana\n")),
                    input_error);
    CHECK_THROWS_AS(load_vectors(testutil::write_file(dir / "h2.txt", "2\nw0 1\nw1 2\n")),
                    input_error);
}

TEST_CASE("load_vectors checks row counts against the header") {
    auto dir = testutil::temp_dir();
    CHECK_THROWS_AS(load_vectors(testutil::write_file(dir / "few.txt", "2 2\nw0 1 2\n")),
                    input_error);
    CHECK_THROWS_AS(load_vectors(testutil::write_file(
                        dir / "many.txt", "1 2\nw0 1 2\nw1 3 4\n")),
                    input_error);
}
