#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tcte/activity.hpp"
#include "tcte/factorization.hpp"

namespace tcte {

enum class Method { random, indegree, zscore, tmf, tcqr, tcteqr };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::random: return "random";
        case Method::indegree: return "indegree";
        case Method::zscore: return "zscore";
        case Method::tmf: return "tmf";
        case Method::tcqr: return "tcqr";
        case Method::tcteqr: return "tcteqr";
    }
    return "?";
}

struct NewQuestion {
    std::vector<std::string> tags;
    Timestamp timestamp = 0;
};

// A question none of whose tags map to any topic; reported and excluded
// from metric denominators upstream.
struct UnroutableQuestion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Ranking {
    Id question_id = 0;
    std::vector<std::pair<Id, double>> entries;  // (user, score), descending score
    Method method = Method::random;

    // 1-based position of a user; 0 when absent
    std::size_t position_of(Id user) const {
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i].first == user) return i + 1;
        return 0;
    }
};

namespace detail {

// Descending by score, ties by ascending user id.
inline void sort_ranking(std::vector<std::pair<Id, double>>& entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
}

}  // namespace detail

// Eq-14 topic weights for a new question. Unmapped tags are dropped from the
// denominator (strict_denominator uses all tags instead; the ordering is
// unaffected, weights may then sum below 1).
inline std::map<int, double> topic_weights(const NewQuestion& q, const TopicMap& topics,
                                           bool strict_denominator = false) {
    std::map<int, int> counts;
    int mappable = 0;
    for (const auto& t : q.tags) {
        const int c = topics.topic_of(t);
        if (c < 0) continue;
        ++mappable;
        ++counts[c];
    }
    if (mappable == 0) throw UnroutableQuestion("no tag of the question maps to any topic");
    const int denom = strict_denominator ? static_cast<int>(q.tags.size()) : mappable;
    std::map<int, double> w;
    for (auto [c, k] : counts) w[c] = static_cast<double>(k) / static_cast<double>(denom);
    return w;
}

// Eq-13 ranking: per-candidate score is the topic-weight-averaged predicted
// expertise. Serves TCTE-QR, TC-QR and T-MF, which differ only in how the
// model and topic map were built.
inline Ranking rank_by_model(const NewQuestion& q, const FactorModel& model,
                             const TopicMap& topics, const std::vector<Id>& candidates,
                             Method method, bool strict_denominator = false) {
    const auto weights = topic_weights(q, topics, strict_denominator);
    Ranking r;
    r.method = method;
    r.entries.reserve(candidates.size());
    for (Id u : candidates) {
        const int row = model.row_of(u);
        double score = 0.0;
        if (row >= 0)
            for (auto [topic, w] : weights) score += w * model.predict(row, topic);
        r.entries.emplace_back(u, score);
    }
    detail::sort_ranking(r.entries);
    return r;
}

inline Ranking rank_tcteqr(const NewQuestion& q, const FactorModel& model, const TopicMap& topics,
                           const std::vector<Id>& candidates) {
    return rank_by_model(q, model, topics, candidates, Method::tcteqr);
}

inline Ranking rank_tcqr(const NewQuestion& q, const FactorModel& model, const TopicMap& topics,
                         const std::vector<Id>& candidates) {
    return rank_by_model(q, model, topics, candidates, Method::tcqr);
}

inline Ranking rank_tmf(const NewQuestion& q, const FactorModel& tag_model,
                        const TopicMap& singleton_topics, const std::vector<Id>& candidates) {
    return rank_by_model(q, tag_model, singleton_topics, candidates, Method::tmf);
}

// Question-independent: count of positively scored train answers.
inline Ranking rank_indegree(const std::vector<Id>& candidates, const Corpus& train) {
    std::map<Id, double> counts;
    for (const auto& a : train.answers)
        if (a.positively_scored() && a.answerer_id) counts[*a.answerer_id] += 1.0;
    Ranking r;
    r.method = Method::indegree;
    for (Id u : candidates) {
        auto it = counts.find(u);
        r.entries.emplace_back(u, it == counts.end() ? 0.0 : it->second);
    }
    detail::sort_ranking(r.entries);
    return r;
}

// z = (a - q) / sqrt(a + q), a = answers given, q = questions asked in train.
inline Ranking rank_zscore(const std::vector<Id>& candidates, const Corpus& train) {
    std::map<Id, double> answered, asked;
    for (const auto& a : train.answers)
        if (a.answerer_id) answered[*a.answerer_id] += 1.0;
    for (const auto& q : train.questions)
        if (q.asker_id) asked[*q.asker_id] += 1.0;
    Ranking r;
    r.method = Method::zscore;
    for (Id u : candidates) {
        const double a = answered.count(u) ? answered[u] : 0.0;
        const double q = asked.count(u) ? asked[u] : 0.0;
        const double z = (a + q) > 0.0 ? (a - q) / std::sqrt(a + q) : 0.0;
        r.entries.emplace_back(u, z);
    }
    detail::sort_ranking(r.entries);
    return r;
}

// Seeded uniform shuffle; the "score" is the negated position so the entry
// list still sorts descending.
inline Ranking rank_random(const std::vector<Id>& candidates, std::uint64_t seed) {
    std::vector<Id> order = candidates;
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    Ranking r;
    r.method = Method::random;
    for (std::size_t i = 0; i < order.size(); ++i)
        r.entries.emplace_back(order[i], -static_cast<double>(i));
    return r;
}

// `question_id<TAB>rank<TAB>user_id<TAB>score`
inline void export_ranking(const Ranking& r, std::ostream& os) {
    os.precision(17);
    for (std::size_t i = 0; i < r.entries.size(); ++i)
        os << r.question_id << '\t' << (i + 1) << '\t' << r.entries[i].first << '\t'
           << r.entries[i].second << '\n';
}

}  // namespace tcte
