#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "attrsense/corpus.hpp"

namespace testutil {

inline std::filesystem::path temp_dir() {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("attrsense_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& path,
                              const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path.string();
}

/// Records for a single account from explicit token lists.
inline std::vector<attrsense::TweetRecord> records_from_tokens(
    const std::vector<std::vector<std::string>>& token_lists,
    const std::string& account = "acct") {
    std::vector<attrsense::TweetRecord> records;
    for (std::size_t i = 0; i < token_lists.size(); ++i) {
        attrsense::TweetRecord rec;
        rec.account_id = account;
        rec.seq = static_cast<std::int64_t>(i);
        rec.tokens = token_lists[i];
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace testutil
