#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "attrsense/common.hpp"

namespace attrsense {

struct LabeledAccount {
    std::string account_id;
    Gender gender = Gender::male;
    Occupation occupation = Occupation::politician;
    AgeGroup age_group = AgeGroup::unknown;
    Role role = Role::train;
};

struct TweetRecord {
    std::string account_id;
    std::int64_t seq = 0;
    std::string text;
    std::vector<std::string> tokens;
    std::optional<std::int64_t> timestamp;
};

enum class TokenizerMode { unicode_default, pretokenized, external_command };

struct TokenizerSpec {
    TokenizerMode mode = TokenizerMode::unicode_default;
    std::string external_command; // required for external_command mode
};

namespace utf8 {

/// Decodes the codepoint at position i, advancing i. Returns false on a
/// malformed sequence (overlong forms and stray continuation bytes included).
inline bool next(std::string_view s, std::size_t& i, char32_t& cp) {
    if (i >= s.size()) return false;
    unsigned char b0 = s[i];
    if (b0 < 0x80) {
        cp = b0;
        i += 1;
        return true;
    }
    int len;
    char32_t min_cp;
    if ((b0 & 0xe0) == 0xc0) {
        len = 2;
        cp = b0 & 0x1f;
        min_cp = 0x80;
    } else if ((b0 & 0xf0) == 0xe0) {
        len = 3;
        cp = b0 & 0x0f;
        min_cp = 0x800;
    } else if ((b0 & 0xf8) == 0xf0) {
        len = 4;
        cp = b0 & 0x07;
        min_cp = 0x10000;
    } else {
        return false;
    }
    if (i + len > s.size()) return false;
    for (int k = 1; k < len; ++k) {
        unsigned char b = s[i + k];
        if ((b & 0xc0) != 0x80) return false;
        cp = (cp << 6) | (b & 0x3f);
    }
    if (cp < min_cp || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += len;
    return true;
}

inline bool valid(std::string_view s) {
    std::size_t i = 0;
    char32_t cp;
    while (i < s.size())
        if (!next(s, i, cp)) return false;
    return true;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

} // namespace utf8

namespace detail {

inline bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\f':
        case U'\v':
        case 0x0085:
        case 0x00a0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202f:
        case 0x205f:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200a;
    }
}

inline bool is_strip_punct_cp(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
               (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
    }
    // Latin-1 punctuation and common quote/dash/CJK/fullwidth ranges.
    if (cp == 0x00a1 || cp == 0x00ab || cp == 0x00b7 || cp == 0x00bb || cp == 0x00bf)
        return true;
    if (cp >= 0x2010 && cp <= 0x2027) return true;
    if (cp >= 0x2030 && cp <= 0x205e) return true;
    if (cp >= 0x3001 && cp <= 0x303f) return true;
    if (cp >= 0xff01 && cp <= 0xff0f) return true;
    if (cp >= 0xff1a && cp <= 0xff20) return true;
    if (cp >= 0xff3b && cp <= 0xff40) return true;
    if (cp >= 0xff5b && cp <= 0xff65) return true;
    return false;
}

inline char32_t to_lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    // Latin-1 supplement (except the multiplication sign).
    if (cp >= 0x00c0 && cp <= 0x00de && cp != 0x00d7) return cp + 0x20;
    // Latin Extended-A: even/odd case pairs plus the Z-with-mark triples.
    if (cp >= 0x0100 && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
    if (cp == 0x0179 || cp == 0x017b || cp == 0x017d) return cp + 1;
    // Greek.
    if (cp >= 0x0391 && cp <= 0x03ab && cp != 0x03a2) return cp + 0x20;
    // Cyrillic.
    if (cp >= 0x0400 && cp <= 0x040f) return cp + 0x50;
    if (cp >= 0x0410 && cp <= 0x042f) return cp + 0x20;
    return cp;
}

inline bool looks_like_url(std::string_view token) {
    return token.starts_with("http://") || token.starts_with("https://") ||
           token.starts_with("www.");
}

inline bool looks_like_mention(std::string_view token) {
    if (token.size() < 2 || token[0] != '@') return false;
    unsigned char c = token[1];
    return std::isalnum(c) || c == '_';
}

} // namespace detail

/// Default tokenizer: splits on Unicode whitespace, collapses URLs to
/// "<url>" and @mentions to "<mention>", strips leading/trailing
/// punctuation, lowercases cased scripts, and drops empty tokens.
inline std::vector<std::string> tokenize_default(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    std::string raw;
    auto flush = [&]() {
        if (raw.empty()) return;
        std::string token = std::move(raw);
        raw.clear();
        std::vector<char32_t> cps;
        {
            std::size_t k = 0;
            char32_t cp;
            while (k < token.size() && utf8::next(token, k, cp)) cps.push_back(cp);
        }
        std::size_t lo = 0, hi = cps.size();
        // Strip leading punctuation one codepoint at a time, re-checking the
        // sentinels after each removal so "(@name)" still collapses.
        auto remainder = [&]() {
            std::string s;
            for (std::size_t p = lo; p < hi; ++p) utf8::append(s, cps[p]);
            return s;
        };
        std::string current = remainder();
        while (true) {
            if (detail::looks_like_url(current)) {
                tokens.emplace_back("<url>");
                return;
            }
            if (detail::looks_like_mention(current)) {
                tokens.emplace_back("<mention>");
                return;
            }
            if (lo < hi && detail::is_strip_punct_cp(cps[lo])) {
                ++lo;
                current = remainder();
            } else {
                break;
            }
        }
        while (hi > lo && detail::is_strip_punct_cp(cps[hi - 1])) --hi;
        if (lo >= hi) return;
        std::string lowered;
        for (std::size_t p = lo; p < hi; ++p)
            utf8::append(lowered, detail::to_lower_cp(cps[p]));
        tokens.push_back(std::move(lowered));
    };
    char32_t cp;
    while (i < text.size()) {
        std::size_t start = i;
        if (!utf8::next(text, i, cp))
            throw std::invalid_argument("tokenize_default: invalid UTF-8");
        if (detail::is_space_cp(cp))
            flush();
        else
            raw.append(text.substr(start, i - start));
    }
    flush();
    return tokens;
}

namespace detail {

inline std::vector<std::string> split_whitespace(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::exchange(cur, {}));
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// Runs an external tokenizer once over the whole batch: one input line per
/// tweet in, one line of space-separated tokens out.
inline std::vector<std::vector<std::string>> run_external_tokenizer(
    const std::string& command, const std::vector<std::string>& texts) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path();
    fs::path in_path = dir / ("attrsense_tok_in_" + std::to_string(::getpid()) + ".txt");
    std::ofstream in(in_path);
    for (const std::string& t : texts) {
        std::string flat = t;
        std::replace(flat.begin(), flat.end(), '\n', ' ');
        std::replace(flat.begin(), flat.end(), '\r', ' ');
        in << flat << '\n';
    }
    in.close();
    std::string full = command + " < " + in_path.string();
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) throw input_error("failed to run tokenizer command: " + command);
    std::vector<std::vector<std::string>> out;
    std::string line;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) {
        line += buf;
        if (!line.empty() && line.back() == '\n') {
            line.pop_back();
            out.push_back(split_whitespace(line));
            line.clear();
        }
    }
    if (!line.empty()) out.push_back(split_whitespace(line));
    int rc = ::pclose(pipe);
    fs::remove(in_path);
    if (rc != 0) throw input_error("tokenizer command failed: " + command);
    if (out.size() != texts.size())
        throw input_error("tokenizer command returned " + std::to_string(out.size()) +
                          " lines for " + std::to_string(texts.size()) + " tweets");
    return out;
}

} // namespace detail

/// Reads a JSON-lines tweets file. Each line: {"account_id": str, "text": str,
/// "tokens": [str]?, "timestamp": int?}. seq is assigned 0,1,2,... per account
/// in file order; when an account carries timestamps, they override file order.
inline std::vector<TweetRecord> ingest_tweets(const std::string& path,
                                              const TokenizerSpec& tokenizer = {}) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open tweets file: " + path);

    std::vector<TweetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!utf8::valid(line))
            throw input_error(path + ":" + std::to_string(line_no) +
                              ": invalid UTF-8");
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("account_id") ||
            !j["account_id"].is_string() || !j.contains("text") ||
            !j["text"].is_string())
            throw input_error(path + ":" + std::to_string(line_no) +
                              ": malformed tweet record");
        TweetRecord rec;
        rec.account_id = j["account_id"].get<std::string>();
        rec.text = j["text"].get<std::string>();
        if (j.contains("timestamp")) {
            if (!j["timestamp"].is_number_integer())
                throw input_error(path + ":" + std::to_string(line_no) +
                                  ": timestamp must be an integer");
            rec.timestamp = j["timestamp"].get<std::int64_t>();
        }
        if (tokenizer.mode == TokenizerMode::pretokenized) {
            if (!j.contains("tokens") || !j["tokens"].is_array())
                throw input_error(path + ":" + std::to_string(line_no) +
                                  ": pretokenized mode requires a tokens field");
            for (const auto& t : j["tokens"]) {
                if (!t.is_string())
                    throw input_error(path + ":" + std::to_string(line_no) +
                                      ": tokens must be strings");
                rec.tokens.push_back(t.get<std::string>());
            }
        } else if (tokenizer.mode == TokenizerMode::unicode_default) {
            rec.tokens = tokenize_default(rec.text);
        }
        records.push_back(std::move(rec));
    }

    if (tokenizer.mode == TokenizerMode::external_command) {
        std::vector<std::string> texts;
        texts.reserve(records.size());
        for (const auto& r : records) texts.push_back(r.text);
        auto token_lists = detail::run_external_tokenizer(tokenizer.external_command, texts);
        for (std::size_t i = 0; i < records.size(); ++i)
            records[i].tokens = std::move(token_lists[i]);
    }

    // Assign per-account seq. Timestamped accounts are ordered by timestamp
    // (stable on ties); mixed presence within an account is rejected.
    std::unordered_map<std::string, std::vector<std::size_t>> by_account;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_account[records[i].account_id].push_back(i);
    for (auto& [account, idxs] : by_account) {
        std::size_t with_ts = 0;
        for (std::size_t i : idxs)
            if (records[i].timestamp) ++with_ts;
        if (with_ts != 0 && with_ts != idxs.size())
            throw input_error(path + ": account '" + account +
                              "' mixes timestamped and untimestamped tweets");
        std::vector<std::size_t> order = idxs;
        if (with_ts == idxs.size())
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return *records[a].timestamp < *records[b].timestamp;
            });
        for (std::size_t rank = 0; rank < order.size(); ++rank)
            records[order[rank]].seq = static_cast<std::int64_t>(rank);
    }
    return records;
}

/// Keeps exactly the records with at least min_tokens tokens; order and seq
/// values are preserved.
inline std::vector<TweetRecord> filter_short(const std::vector<TweetRecord>& tweets,
                                             int min_tokens = 4) {
    if (min_tokens < 1)
        throw std::invalid_argument("filter_short: min_tokens must be >= 1");
    std::vector<TweetRecord> kept;
    kept.reserve(tweets.size());
    for (const auto& t : tweets)
        if (t.tokens.size() >= static_cast<std::size_t>(min_tokens)) kept.push_back(t);
    return kept;
}

/// Loads the labels CSV (header: account_id,gender,occupation,age_group,role).
inline std::vector<LabeledAccount> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open labels file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error(path + ": empty labels file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "account_id,gender,occupation,age_group,role")
        throw input_error(path + ": unexpected header '" + line + "'");

    std::vector<LabeledAccount> accounts;
    std::unordered_set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5)
            throw input_error(path + ": row " + std::to_string(row) +
                              ": expected 5 fields, got " + std::to_string(fields.size()));
        LabeledAccount acc;
        acc.account_id = fields[0];
        try {
            acc.gender = enum_from_string<Gender>(fields[1]);
        } catch (const input_error& e) {
            throw input_error(path + ": row " + std::to_string(row) + ", field gender: " +
                              e.what());
        }
        try {
            acc.occupation = enum_from_string<Occupation>(fields[2]);
        } catch (const input_error& e) {
            throw input_error(path + ": row " + std::to_string(row) +
                              ", field occupation: " + e.what());
        }
        try {
            acc.age_group = enum_from_string<AgeGroup>(fields[3]);
        } catch (const input_error& e) {
            throw input_error(path + ": row " + std::to_string(row) +
                              ", field age_group: " + e.what());
        }
        try {
            acc.role = enum_from_string<Role>(fields[4]);
        } catch (const input_error& e) {
            throw input_error(path + ": row " + std::to_string(row) + ", field role: " +
                              e.what());
        }
        if (!seen.insert(acc.account_id).second)
            throw input_error(path + ": row " + std::to_string(row) +
                              ": duplicate account_id '" + acc.account_id + "'");
        accounts.push_back(std::move(acc));
    }
    return accounts;
}

} // namespace attrsense
