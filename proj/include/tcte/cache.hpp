#pragma once

#include <cstring>
#include <fstream>
#include <string>

#include "tcte/corpus.hpp"

namespace tcte {

namespace detail {

constexpr char kCacheMagic[4] = {'T', 'C', 'T', 'E'};
constexpr std::uint32_t kCacheVersion = 1;

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    os.write(b, 4);
}

inline void put_i64(std::ostream& os, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(u >> (8 * i));
    os.write(b, 8);
}

inline void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("cache: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::int64_t get_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw IoError("cache: truncated file");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

inline std::string get_str(std::istream& is) {
    const std::uint32_t n = get_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw IoError("cache: truncated file");
    return s;
}

inline void put_opt_id(std::ostream& os, const std::optional<Id>& v) {
    os.put(v ? 1 : 0);
    if (v) put_i64(os, *v);
}

inline std::optional<Id> get_opt_id(std::istream& is) {
    const int flag = is.get();
    if (flag == std::istream::traits_type::eof()) throw IoError("cache: truncated file");
    if (!flag) return std::nullopt;
    return get_i64(is);
}

}  // namespace detail

inline void cache_write(const Corpus& c, std::ostream& os) {
    using namespace detail;
    os.write(kCacheMagic, 4);
    put_u32(os, kCacheVersion);

    put_u32(os, static_cast<std::uint32_t>(c.questions.size()));
    for (const auto& q : c.questions) {
        put_i64(os, q.question_id);
        put_opt_id(os, q.asker_id);
        put_i64(os, q.created_at);
        put_u32(os, static_cast<std::uint32_t>(q.tags.size()));
        for (const auto& t : q.tags) put_str(os, t);
        put_opt_id(os, q.accepted_answer_id);
        put_i64(os, q.score);
    }
    put_u32(os, static_cast<std::uint32_t>(c.answers.size()));
    for (const auto& a : c.answers) {
        put_i64(os, a.answer_id);
        put_i64(os, a.parent_question_id);
        put_opt_id(os, a.answerer_id);
        put_i64(os, a.created_at);
        put_i64(os, a.score);
    }
    put_u32(os, static_cast<std::uint32_t>(c.tags.size()));
    for (const auto& t : c.tags) put_str(os, t);
    put_i64(os, c.t_min);
    put_i64(os, c.t_max);
    if (!os) throw IoError("cache: write failed");
}

inline Corpus cache_read(std::istream& is) {
    using namespace detail;
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCacheMagic, 4) != 0)
        throw IoError("cache: bad magic, not a corpus cache file");
    const std::uint32_t version = get_u32(is);
    if (version != kCacheVersion)
        throw IoError("cache: version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kCacheVersion) + ")");

    Corpus c;
    const std::uint32_t nq = get_u32(is);
    c.questions.reserve(nq);
    for (std::uint32_t i = 0; i < nq; ++i) {
        QuestionPost q;
        q.question_id = get_i64(is);
        q.asker_id = get_opt_id(is);
        q.created_at = get_i64(is);
        const std::uint32_t nt = get_u32(is);
        for (std::uint32_t j = 0; j < nt; ++j) q.tags.push_back(get_str(is));
        q.accepted_answer_id = get_opt_id(is);
        q.score = static_cast<int>(get_i64(is));
        c.questions.push_back(std::move(q));
    }
    const std::uint32_t na = get_u32(is);
    c.answers.reserve(na);
    for (std::uint32_t i = 0; i < na; ++i) {
        AnswerPost a;
        a.answer_id = get_i64(is);
        a.parent_question_id = get_i64(is);
        a.answerer_id = get_opt_id(is);
        a.created_at = get_i64(is);
        a.score = static_cast<int>(get_i64(is));
        c.answers.push_back(std::move(a));
    }
    const std::uint32_t ntags = get_u32(is);
    for (std::uint32_t i = 0; i < ntags; ++i) c.tags.insert(get_str(is));
    c.t_min = get_i64(is);
    c.t_max = get_i64(is);
    return c;
}

inline void cache_write(const Corpus& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cache: cannot open for write: " + path);
    cache_write(c, os);
}

inline Corpus cache_read(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cache: cannot open for read: " + path);
    return cache_read(is);
}

}  // namespace tcte
