#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tcte/corpus.hpp"

namespace tcte {

using NodeId = std::int32_t;

struct Edge {
    NodeId a = 0;  // a < b
    NodeId b = 0;
    std::int64_t weight = 1;

    bool operator==(const Edge&) const = default;
};

// Weighted undirected tag co-occurrence graph. Simple by construction:
// edges are stored with a < b, no self-loops.
struct TagGraph {
    std::vector<std::string> node_names;  // NodeId -> tag name, sorted
    std::vector<Edge> edges;
    std::int64_t support_threshold = 1;
    // rewire_random sets this when no valid swap sequence could be found
    bool rewire_incomplete = false;

    std::size_t num_nodes() const { return node_names.size(); }
    std::size_t num_edges() const { return edges.size(); }

    NodeId node_id(const std::string& name) const {
        auto it = std::lower_bound(node_names.begin(), node_names.end(), name);
        if (it == node_names.end() || *it != name) return -1;
        return static_cast<NodeId>(it - node_names.begin());
    }

    std::vector<std::int64_t> degrees(bool weighted) const {
        std::vector<std::int64_t> d(num_nodes(), 0);
        for (const auto& e : edges) {
            const std::int64_t w = weighted ? e.weight : 1;
            d[e.a] += w;
            d[e.b] += w;
        }
        return d;
    }

    std::int64_t total_weight(bool weighted) const {
        std::int64_t m = 0;
        for (const auto& e : edges) m += weighted ? e.weight : 1;
        return m;
    }

    std::set<std::pair<NodeId, NodeId>> edge_set() const {
        std::set<std::pair<NodeId, NodeId>> s;
        for (const auto& e : edges) s.emplace(e.a, e.b);
        return s;
    }

    void sort_edges() {
        std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
            return std::tie(x.a, x.b) < std::tie(y.a, y.b);
        });
    }
};

// Co-occurrence graph over the training corpus: edge weight is the number
// of questions carrying both tags; pairs below the support threshold n_q
// are dropped but their endpoints stay as isolated nodes.
inline TagGraph build_tag_graph(const Corpus& train, std::int64_t n_q) {
    if (n_q < 1) throw ConfigError("build_tag_graph: n_q must be >= 1");
    TagGraph g;
    g.support_threshold = n_q;
    g.node_names.assign(train.tags.begin(), train.tags.end());

    std::map<std::pair<NodeId, NodeId>, std::int64_t> counts;
    for (const auto& q : train.questions) {
        std::vector<NodeId> ids;
        ids.reserve(q.tags.size());
        for (const auto& t : q.tags) {
            const NodeId id = g.node_id(t);
            if (id >= 0) ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                ++counts[{ids[i], ids[j]}];
    }
    for (const auto& [pair, w] : counts)
        if (w >= n_q) g.edges.push_back({pair.first, pair.second, w});
    return g;
}

// Degree-preserving double-edge swaps, repeated until every edge has been
// swapped at least once or the attempt budget (100 * |E|) runs out. Weights
// travel with their edge. Deterministic given seed.
inline TagGraph rewire_random(const TagGraph& g, std::uint64_t seed) {
    if (g.edges.size() < 2) throw ConfigError("rewire_random: need at least 2 edges");
    TagGraph out = g;
    out.rewire_incomplete = false;

    auto present = out.edge_set();
    std::vector<bool> swapped(out.edges.size(), false);
    std::size_t remaining = out.edges.size();
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, out.edges.size() - 1);

    const std::size_t budget = 100 * out.edges.size();
    for (std::size_t attempt = 0; attempt < budget && remaining > 0; ++attempt) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (i == j) continue;
        Edge& e1 = out.edges[i];
        Edge& e2 = out.edges[j];
        // (a,b),(c,d) -> (a,d),(c,b)
        NodeId a = e1.a, b = e1.b, c = e2.a, d = e2.b;
        // randomize orientation of the second edge
        if (rng() & 1) std::swap(c, d);
        if (a == d || c == b) continue;  // self-loop
        auto norm = [](NodeId x, NodeId y) {
            return x < y ? std::make_pair(x, y) : std::make_pair(y, x);
        };
        const auto n1 = norm(a, d);
        const auto n2 = norm(c, b);
        if (n1 == n2 || present.count(n1) || present.count(n2)) continue;  // duplicate
        present.erase(norm(e1.a, e1.b));
        present.erase(norm(e2.a, e2.b));
        present.insert(n1);
        present.insert(n2);
        e1.a = n1.first;
        e1.b = n1.second;
        e2.a = n2.first;
        e2.b = n2.second;
        for (std::size_t k : {i, j})
            if (!swapped[k]) {
                swapped[k] = true;
                --remaining;
            }
    }
    out.rewire_incomplete = remaining > 0;
    out.sort_edges();
    return out;
}

// Removes exactly floor(p * |E|) edges (chosen uniformly) and replaces each
// with a uniformly random non-existing edge carrying the removed weight.
inline TagGraph perturb(const TagGraph& g, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw ConfigError("perturb: p must be in [0,1]");
    TagGraph out = g;
    const std::size_t k = static_cast<std::size_t>(p * static_cast<double>(g.edges.size()));
    if (k == 0 || g.num_nodes() < 2) return out;

    Rng rng(seed);
    // choose k distinct victim edges
    std::vector<std::size_t> idx(out.edges.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());

    const auto original = g.edge_set();
    auto present = out.edge_set();
    for (std::size_t i : idx) present.erase({out.edges[i].a, out.edges[i].b});

    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.num_nodes()) - 1);
    for (std::size_t i : idx) {
        // prefer edges absent from the original graph so the symmetric
        // difference really is 2k; fall back after enough rejections
        for (std::size_t tries = 0;; ++tries) {
            NodeId u = pick(rng), v = pick(rng);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (present.count({u, v})) continue;
            if (tries < 1000 && original.count({u, v})) continue;
            present.insert({u, v});
            out.edges[i].a = u;
            out.edges[i].b = v;
            break;
        }
    }
    out.sort_edges();
    return out;
}

// `tag_a<TAB>tag_b<TAB>weight` per line.
inline void export_edge_list(const TagGraph& g, std::ostream& os) {
    for (const auto& e : g.edges)
        os << g.node_names[e.a] << '\t' << g.node_names[e.b] << '\t' << e.weight << '\n';
}

}  // namespace tcte
