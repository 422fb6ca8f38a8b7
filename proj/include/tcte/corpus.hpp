#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tcte/common.hpp"

namespace tcte {

using Id = std::int64_t;

struct QuestionPost {
    Id question_id = 0;
    std::optional<Id> asker_id;
    Timestamp created_at = 0;
    std::vector<std::string> tags;  // 1..5, distinct, lowercase
    std::optional<Id> accepted_answer_id;
    int score = 0;

    bool operator==(const QuestionPost&) const = default;
};

struct AnswerPost {
    Id answer_id = 0;
    Id parent_question_id = 0;
    std::optional<Id> answerer_id;
    Timestamp created_at = 0;
    int score = 0;

    bool operator==(const AnswerPost&) const = default;

    bool positively_scored() const { return score >= 1; }
};

// Immutable after construction; posts are kept sorted by id so every
// iteration order is deterministic.
struct Corpus {
    std::vector<QuestionPost> questions;  // sorted by question_id
    std::vector<AnswerPost> answers;      // sorted by answer_id
    std::set<std::string> tags;
    Timestamp t_min = 0;
    Timestamp t_max = 0;

    bool operator==(const Corpus&) const = default;

    const QuestionPost* find_question(Id id) const {
        auto it = std::lower_bound(questions.begin(), questions.end(), id,
                                   [](const QuestionPost& q, Id v) { return q.question_id < v; });
        return (it != questions.end() && it->question_id == id) ? &*it : nullptr;
    }

    const AnswerPost* find_answer(Id id) const {
        auto it = std::lower_bound(answers.begin(), answers.end(), id,
                                   [](const AnswerPost& a, Id v) { return a.answer_id < v; });
        return (it != answers.end() && it->answer_id == id) ? &*it : nullptr;
    }

    // Re-derives the tag set and time range and sorts the post vectors.
    void finalize() {
        std::sort(questions.begin(), questions.end(),
                  [](const QuestionPost& a, const QuestionPost& b) {
                      return a.question_id < b.question_id;
                  });
        std::sort(answers.begin(), answers.end(),
                  [](const AnswerPost& a, const AnswerPost& b) { return a.answer_id < b.answer_id; });
        tags.clear();
        bool any = false;
        t_min = 0;
        t_max = 0;
        auto see = [&](Timestamp t) {
            if (!any) {
                t_min = t_max = t;
                any = true;
            } else {
                t_min = std::min(t_min, t);
                t_max = std::max(t_max, t);
            }
        };
        for (const auto& q : questions) {
            see(q.created_at);
            for (const auto& t : q.tags) tags.insert(t);
        }
        for (const auto& a : answers) see(a.created_at);
    }
};

struct SplitSpec {
    Timestamp train_start = 0;
    Timestamp train_end = 0;  // exclusive
    Timestamp test_start = 0;
    Timestamp test_end = 0;  // exclusive
    int min_train_answers = 5;

    void validate() const {
        if (train_start >= train_end || test_start >= test_end)
            throw ConfigError("split: empty train or test interval");
        if (train_end > test_start)
            throw ConfigError("split: train interval must end before test interval starts");
        if (min_train_answers < 0) throw ConfigError("split: min_train_answers negative");
    }
};

struct Split {
    Corpus train;
    Corpus test;  // only questions with accepted answers, plus those answers
    std::vector<Id> candidates;  // sorted user ids with >= min_train_answers train answers
    // Test question ids whose accepted answerer is outside the candidate set.
    std::unordered_set<Id> unreachable;
};

// Train/test split with the cold-start candidate filter. Test questions
// keep their accepted answer so the ground-truth answerer is recoverable.
inline Split split(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();
    Split out;

    auto in = [](Timestamp t, Timestamp lo, Timestamp hi) { return lo <= t && t < hi; };

    for (const auto& q : corpus.questions)
        if (in(q.created_at, spec.train_start, spec.train_end)) out.train.questions.push_back(q);
    std::unordered_set<Id> train_qids;
    for (const auto& q : out.train.questions) train_qids.insert(q.question_id);
    std::unordered_map<Id, int> train_answer_counts;
    for (const auto& a : corpus.answers)
        if (in(a.created_at, spec.train_start, spec.train_end) &&
            train_qids.count(a.parent_question_id)) {
            out.train.answers.push_back(a);
            if (a.answerer_id) ++train_answer_counts[*a.answerer_id];
        }
    out.train.finalize();

    for (auto [user, n] : train_answer_counts)
        if (n >= spec.min_train_answers) out.candidates.push_back(user);
    std::sort(out.candidates.begin(), out.candidates.end());
    if (out.candidates.empty())
        throw ConfigError("split: no candidate answerers pass the min-answer filter");
    std::unordered_set<Id> candidate_set(out.candidates.begin(), out.candidates.end());

    for (const auto& q : corpus.questions) {
        if (!in(q.created_at, spec.test_start, spec.test_end) || !q.accepted_answer_id) continue;
        const AnswerPost* acc = corpus.find_answer(*q.accepted_answer_id);
        if (!acc || !acc->answerer_id) continue;  // ground truth unattributable
        out.test.questions.push_back(q);
        out.test.answers.push_back(*acc);
        if (!candidate_set.count(*acc->answerer_id)) out.unreachable.insert(q.question_id);
    }
    out.test.finalize();
    return out;
}

// Accepted answerer of a test question, if recoverable.
inline std::optional<Id> ground_truth(const Corpus& test, const QuestionPost& q) {
    if (!q.accepted_answer_id) return std::nullopt;
    const AnswerPost* a = test.find_answer(*q.accepted_answer_id);
    if (!a || !a->answerer_id) return std::nullopt;
    return *a->answerer_id;
}

}  // namespace tcte
