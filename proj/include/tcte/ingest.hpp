#pragma once

#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcte/corpus.hpp"

namespace tcte {

struct IngestStats {
    std::size_t questions = 0;
    std::size_t answers = 0;
    std::size_t rows_skipped_missing_attr = 0;
    std::size_t rows_skipped_unknown_type = 0;
    std::size_t orphan_answers_dropped = 0;
    std::size_t answers_before_question_clamped = 0;

    std::string summary() const {
        std::ostringstream os;
        os << "questions=" << questions << " answers=" << answers
           << " skipped_missing_attr=" << rows_skipped_missing_attr
           << " skipped_unknown_type=" << rows_skipped_unknown_type
           << " orphan_answers=" << orphan_answers_dropped;
        return os.str();
    }
};

namespace detail {

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i);
        if (semi == std::string_view::npos) {
            out += s[i++];
            continue;
        }
        const std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
            long code = 0;
            if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                code = std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16);
            else
                code = std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10);
            if (code > 0 && code < 128) out += static_cast<char>(code);
            // non-ASCII code points are passed through untranslated
            else out += std::string(s.substr(i, semi - i + 1));
        } else {
            out += std::string(s.substr(i, semi - i + 1));
        }
        i = semi + 1;
    }
    return out;
}

// Attribute map of one `<row ... />` element.
using AttrMap = std::unordered_map<std::string, std::string>;

// Minimal pull parser for StackExchange dump files: a flat sequence of
// `<row .../>` elements under a single root. Calls `fn(attrs, offset)` per
// row; throws ParseError with the byte offset on malformed markup.
template <class Fn>
void for_each_row(std::istream& in, Fn&& fn) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t i = 0;
    const std::size_t n = data.size();
    bool saw_root = false;

    auto fail = [&](std::size_t at, const std::string& what) {
        throw ParseError(what + " at byte offset " + std::to_string(at));
    };

    while (i < n) {
        const auto lt = data.find('<', i);
        if (lt == std::string::npos) break;
        std::size_t j = lt + 1;
        if (j < n && (data[j] == '?' || data[j] == '!')) {  // declaration / comment
            const auto end = data.find('>', j);
            if (end == std::string::npos) fail(lt, "unterminated declaration");
            i = end + 1;
            continue;
        }
        if (j < n && data[j] == '/') {  // closing root tag
            const auto end = data.find('>', j);
            if (end == std::string::npos) fail(lt, "unterminated closing tag");
            i = end + 1;
            continue;
        }
        // element name
        std::size_t name_end = j;
        while (name_end < n && (std::isalnum(static_cast<unsigned char>(data[name_end])) ||
                                data[name_end] == '_'))
            ++name_end;
        if (name_end == j) fail(lt, "malformed element");
        const std::string_view name(data.data() + j, name_end - j);

        AttrMap attrs;
        std::size_t k = name_end;
        bool self_closing = false;
        while (true) {
            while (k < n && std::isspace(static_cast<unsigned char>(data[k]))) ++k;
            if (k >= n) fail(lt, "unterminated element");
            if (data[k] == '/') {
                if (k + 1 >= n || data[k + 1] != '>') fail(k, "malformed element end");
                self_closing = true;
                k += 2;
                break;
            }
            if (data[k] == '>') {
                ++k;
                break;
            }
            std::size_t ae = k;
            while (ae < n && data[ae] != '=' && !std::isspace(static_cast<unsigned char>(data[ae])))
                ++ae;
            if (ae >= n || data[ae] != '=') fail(k, "attribute without value");
            const std::string key(data.substr(k, ae - k));
            std::size_t vq = ae + 1;
            if (vq >= n || (data[vq] != '"' && data[vq] != '\'')) fail(vq, "unquoted attribute");
            const char quote = data[vq];
            const auto vend = data.find(quote, vq + 1);
            if (vend == std::string::npos) fail(vq, "unterminated attribute value");
            attrs[key] = decode_entities(std::string_view(data).substr(vq + 1, vend - vq - 1));
            k = vend + 1;
        }

        if (name == "row") {
            if (!self_closing) fail(lt, "row element not self-closing");
            fn(attrs, lt);
        } else {
            if (saw_root && self_closing == false) fail(lt, "unexpected nested element");
            saw_root = true;
        }
        i = k;
    }
    if (!saw_root) fail(0, "missing root element");
}

// "<git><git-pull>" -> ["git", "git-pull"], lowercased, deduplicated.
inline std::vector<std::string> parse_tag_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto open = s.find('<', i);
        if (open == std::string_view::npos) break;
        const auto close = s.find('>', open);
        if (close == std::string_view::npos) break;
        std::string tag(s.substr(open + 1, close - open - 1));
        for (auto& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        // trim
        const auto b = tag.find_first_not_of(" \t");
        const auto e = tag.find_last_not_of(" \t");
        if (b != std::string::npos) {
            tag = tag.substr(b, e - b + 1);
            if (std::find(out.begin(), out.end(), tag) == out.end()) out.push_back(tag);
        }
        i = close + 1;
    }
    return out;
}

}  // namespace detail

// Parses Posts.xml (+ optional Tags.xml) into a validated Corpus.
// Rows with missing required attributes are skipped and counted; answers
// whose parent question is absent are dropped and counted.
inline Corpus parse_dump(std::istream& posts, std::istream* tags_file = nullptr,
                         IngestStats* stats_out = nullptr) {
    IngestStats stats;
    Corpus corpus;
    std::vector<AnswerPost> pending_answers;

    detail::for_each_row(posts, [&](const detail::AttrMap& a, std::size_t) {
        auto get = [&](const char* key) -> const std::string* {
            auto it = a.find(key);
            return it == a.end() ? nullptr : &it->second;
        };
        const std::string* id = get("Id");
        const std::string* type = get("PostTypeId");
        const std::string* created = get("CreationDate");
        if (!id || !type || !created) {
            ++stats.rows_skipped_missing_attr;
            return;
        }
        if (*type == "1") {
            const std::string* tags = get("Tags");
            if (!tags) {
                ++stats.rows_skipped_missing_attr;
                return;
            }
            QuestionPost q;
            q.question_id = std::stoll(*id);
            q.created_at = parse_timestamp(*created);
            q.tags = detail::parse_tag_list(*tags);
            if (q.tags.empty() || q.tags.size() > 5) {
                ++stats.rows_skipped_missing_attr;
                return;
            }
            if (const std::string* owner = get("OwnerUserId")) q.asker_id = std::stoll(*owner);
            if (const std::string* acc = get("AcceptedAnswerId"))
                q.accepted_answer_id = std::stoll(*acc);
            if (const std::string* score = get("Score")) q.score = std::stoi(*score);
            corpus.questions.push_back(std::move(q));
        } else if (*type == "2") {
            const std::string* parent = get("ParentId");
            if (!parent) {
                ++stats.rows_skipped_missing_attr;
                return;
            }
            AnswerPost ans;
            ans.answer_id = std::stoll(*id);
            ans.parent_question_id = std::stoll(*parent);
            ans.created_at = parse_timestamp(*created);
            if (const std::string* owner = get("OwnerUserId")) ans.answerer_id = std::stoll(*owner);
            if (const std::string* score = get("Score")) ans.score = std::stoi(*score);
            pending_answers.push_back(std::move(ans));
        } else {
            ++stats.rows_skipped_unknown_type;
        }
    });

    std::sort(corpus.questions.begin(), corpus.questions.end(),
              [](const QuestionPost& x, const QuestionPost& y) {
                  return x.question_id < y.question_id;
              });
    std::unordered_map<Id, Timestamp> question_times;
    for (const auto& q : corpus.questions) question_times.emplace(q.question_id, q.created_at);

    for (auto& ans : pending_answers) {
        auto it = question_times.find(ans.parent_question_id);
        if (it == question_times.end()) {
            ++stats.orphan_answers_dropped;
            continue;
        }
        if (ans.created_at < it->second) {
            // dumps occasionally carry clock skew; clamp to the question time
            ans.created_at = it->second;
            ++stats.answers_before_question_clamped;
        }
        corpus.answers.push_back(std::move(ans));
    }
    // accepted-answer links must resolve inside the corpus
    corpus.finalize();
    for (auto& q : corpus.questions) {
        if (!q.accepted_answer_id) continue;
        const AnswerPost* acc = corpus.find_answer(*q.accepted_answer_id);
        if (!acc || acc->parent_question_id != q.question_id) q.accepted_answer_id.reset();
    }

    if (tags_file) {
        detail::for_each_row(*tags_file, [&](const detail::AttrMap& a, std::size_t) {
            auto it = a.find("TagName");
            if (it == a.end()) return;
            std::string t = it->second;
            for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            corpus.tags.insert(t);
        });
    }

    stats.questions = corpus.questions.size();
    stats.answers = corpus.answers.size();
    if (stats_out) *stats_out = stats;
    return corpus;
}

}  // namespace tcte
