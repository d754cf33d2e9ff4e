#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "attrsense/common.hpp"
#include "attrsense/sgns.hpp"
#include "attrsense/vocab.hpp"

namespace attrsense {

/// Writes the input vectors in the common word2vec text layout:
/// "<vocab_size> <dim>" header, then one "word v0 v1 ..." line per word.
inline void save_vectors(const WordVectorTable& table, const Vocabulary& vocab,
                         const std::string& path) {
    if (vocab.size() != table.input_vectors.rows())
        throw std::invalid_argument("save_vectors: vocabulary/table size mismatch");
    std::ofstream out(path);
    if (!out) throw input_error("cannot write vector file: " + path);
    out << vocab.size() << ' ' << table.dim << '\n';
    char buf[64];
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << vocab.words[i];
        auto row = table.input_vectors.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof buf, " %.9g", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw input_error("write failed: " + path);
}

/// Loads a vector file produced by save_vectors. The returned Vocabulary is a
/// stub: word list and index only, counts zero.
inline std::pair<Vocabulary, WordVectorTable> load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open vector file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error(path + ": empty vector file");
    std::size_t vocab_size = 0;
    int dim = 0;
    {
        std::istringstream header(line);
        long long vs = -1, d = -1;
        if (!(header >> vs >> d) || vs < 0 || d < 1 ||
            (header >> std::ws, !header.eof()))
            throw input_error(path + ":1: malformed header '" + line + "'");
        vocab_size = static_cast<std::size_t>(vs);
        dim = static_cast<int>(d);
    }

    Vocabulary vocab;
    WordVectorTable table;
    table.dim = dim;
    table.input_vectors = Matrix(vocab_size, dim);
    std::size_t row = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (row >= vocab_size)
            throw input_error(path + ":" + std::to_string(line_no) +
                              ": more rows than the header declares");
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word))
            throw input_error(path + ":" + std::to_string(line_no) + ": missing word");
        for (int d = 0; d < dim; ++d) {
            if (!(ss >> table.input_vectors(row, d)))
                throw input_error(path + ":" + std::to_string(line_no) +
                                  ": expected " + std::to_string(dim) +
                                  " components, got " + std::to_string(d));
        }
        double extra;
        if (ss >> extra)
            throw input_error(path + ":" + std::to_string(line_no) +
                              ": more components than the header declares");
        vocab.index.emplace(word, static_cast<int>(row));
        vocab.words.push_back(std::move(word));
        vocab.counts.push_back(0);
        ++row;
    }
    if (row != vocab_size)
        throw input_error(path + ": header declares " + std::to_string(vocab_size) +
                          " words, file has " + std::to_string(row));
    return {std::move(vocab), std::move(table)};
}

} // namespace attrsense
