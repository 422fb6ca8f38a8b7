#pragma once

#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcte/communities.hpp"
#include "tcte/corpus.hpp"
#include "tcte/tag_graph.hpp"

namespace tcte {

// tag name -> topic community id, total over the tag graph's node set
struct TopicMap {
    std::unordered_map<std::string, int> tag_to_topic;
    int num_topics = 0;

    // -1 when the tag is unmapped
    int topic_of(const std::string& tag) const {
        auto it = tag_to_topic.find(tag);
        return it == tag_to_topic.end() ? -1 : it->second;
    }
};

inline TopicMap make_topic_map(const TagGraph& g, const Partition& part) {
    if (part.assignment.size() != g.num_nodes())
        throw ConfigError("make_topic_map: partition does not cover the graph");
    TopicMap tm;
    tm.num_topics = 0;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        tm.tag_to_topic.emplace(g.node_names[i], part.assignment[i]);
        tm.num_topics = std::max(tm.num_topics, part.assignment[i] + 1);
    }
    return tm;
}

// One community per tag: the T-MF bridge.
inline TopicMap singleton_topic_map(const TagGraph& g) {
    TopicMap tm;
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
        tm.tag_to_topic.emplace(g.node_names[i], static_cast<int>(i));
    tm.num_topics = static_cast<int>(g.num_nodes());
    return tm;
}

enum class KernelKind { hyperbolic, none };

struct DiscountKernel {
    KernelKind kind = KernelKind::hyperbolic;
    int window_months = 1;  // delta, in calendar months
    int j_offset = 0;       // 1 reproduces the strictly 1-based window index

    double weight(std::int64_t j) const {
        if (kind == KernelKind::none) return 1.0;
        return 1.0 / (1.0 + static_cast<double>(j + j_offset));
    }
};

// Sparse user x topic matrix; absent entries mean "unknown", never zero.
struct ActivityMatrix {
    std::vector<Id> user_ids;                            // sorted; row index -> user
    std::vector<std::vector<std::pair<int, double>>> rows;  // per row: (topic, value), topic-sorted
    int num_topics = 0;
    Timestamp as_of = 0;
    DiscountKernel kernel;

    std::size_t num_users() const { return user_ids.size(); }

    std::size_t num_entries() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.size();
        return n;
    }

    int row_of(Id user) const {
        auto it = std::lower_bound(user_ids.begin(), user_ids.end(), user);
        return (it != user_ids.end() && *it == user) ? static_cast<int>(it - user_ids.begin()) : -1;
    }

    double at(int row, int topic) const {
        for (auto [t, v] : rows[row])
            if (t == topic) return v;
        return 0.0;
    }
};

// Eq-7 style fraction: tags of q inside topic `omega` over all mappable tags.
inline double question_topic_fraction(const QuestionPost& q, const TopicMap& topics, int omega) {
    int mappable = 0, in_topic = 0;
    for (const auto& t : q.tags) {
        const int c = topics.topic_of(t);
        if (c < 0) continue;
        ++mappable;
        if (c == omega) ++in_topic;
    }
    if (mappable == 0) throw ConfigError("question_topic_fraction: no mappable tags");
    return static_cast<double>(in_topic) / static_cast<double>(mappable);
}

namespace detail {

// Window index of an answer: complete delta-month steps back from as_of.
inline std::int64_t window_back(Timestamp answer_time, Timestamp as_of, int window_months) {
    const std::int64_t diff = month_index(as_of) - month_index(answer_time);
    return diff < 0 ? -1 : diff / window_months;
}

// Per-topic fractions of a question's tags; empty when nothing is mappable.
inline std::vector<std::pair<int, double>> topic_fractions(const QuestionPost& q,
                                                           const TopicMap& topics) {
    std::map<int, int> counts;
    int mappable = 0;
    for (const auto& t : q.tags) {
        const int c = topics.topic_of(t);
        if (c < 0) continue;
        ++mappable;
        ++counts[c];
    }
    std::vector<std::pair<int, double>> out;
    out.reserve(counts.size());
    for (auto [c, k] : counts)
        out.emplace_back(c, static_cast<double>(k) / static_cast<double>(mappable));
    return out;
}

template <class WeightFn>
ActivityMatrix accumulate_activity(const Corpus& train, const TopicMap& topics, Timestamp as_of,
                                   const DiscountKernel& kernel, WeightFn&& weight_of_answer) {
    std::unordered_map<Id, const QuestionPost*> qindex;
    for (const auto& q : train.questions) qindex.emplace(q.question_id, &q);

    std::map<Id, std::map<int, double>> acc;  // user -> topic -> value
    for (const auto& a : train.answers) {
        if (!a.positively_scored() || !a.answerer_id) continue;
        const double w = weight_of_answer(a);
        if (w == 0.0) continue;
        auto qit = qindex.find(a.parent_question_id);
        if (qit == qindex.end()) continue;
        for (auto [topic, frac] : topic_fractions(*qit->second, topics))
            acc[*a.answerer_id][topic] += w * frac;
    }

    ActivityMatrix m;
    m.num_topics = topics.num_topics;
    m.as_of = as_of;
    m.kernel = kernel;
    for (auto& [user, row] : acc) {
        std::vector<std::pair<int, double>> r;
        for (auto [topic, v] : row)
            if (v > 0.0) r.emplace_back(topic, v);
        if (r.empty()) continue;
        m.user_ids.push_back(user);
        m.rows.push_back(std::move(r));
    }
    return m;
}

}  // namespace detail

// Activity restricted to a single window j (counting backward from as_of).
inline ActivityMatrix windowed_activity(const Corpus& train, const TopicMap& topics,
                                        std::int64_t j, int window_months, Timestamp as_of) {
    DiscountKernel k{KernelKind::none, window_months, 0};
    return detail::accumulate_activity(train, topics, as_of, k, [&](const AnswerPost& a) {
        return detail::window_back(a.created_at, as_of, window_months) == j ? 1.0 : 0.0;
    });
}

// The temporally discounted user-topic activity matrix: sum over windows of
// g(j) * S_j. Kernel `none` degenerates to the plain all-history sum.
inline ActivityMatrix temporal_matrix(const Corpus& train, const TopicMap& topics,
                                      const DiscountKernel& kernel, Timestamp as_of) {
    return detail::accumulate_activity(train, topics, as_of, kernel, [&](const AnswerPost& a) {
        const std::int64_t j = detail::window_back(a.created_at, as_of, kernel.window_months);
        return j < 0 ? 0.0 : kernel.weight(j);
    });
}

inline double density(const ActivityMatrix& m) {
    const std::size_t cells = m.num_users() * static_cast<std::size_t>(m.num_topics);
    return cells == 0 ? 0.0 : static_cast<double>(m.num_entries()) / static_cast<double>(cells);
}

// `user_id<TAB>topic_id<TAB>value`
inline void export_matrix(const ActivityMatrix& m, std::ostream& os) {
    os.precision(17);
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        for (auto [topic, v] : m.rows[r]) os << m.user_ids[r] << '\t' << topic << '\t' << v << '\n';
}

}  // namespace tcte
