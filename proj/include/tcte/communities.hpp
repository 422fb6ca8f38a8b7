#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <vector>

#include "tcte/tag_graph.hpp"

namespace tcte {

enum class CommunityAlgo { louvain, greedy_modularity };

inline const char* to_string(CommunityAlgo a) {
    return a == CommunityAlgo::louvain ? "louvain" : "greedy_modularity";
}

struct Partition {
    std::vector<int> assignment;  // node -> community id, dense 0..C-1
    double modularity = 0.0;
    CommunityAlgo algorithm = CommunityAlgo::louvain;
    bool weighted = true;

    int num_communities() const {
        int c = 0;
        for (int a : assignment) c = std::max(c, a + 1);
        return c;
    }
};

// Renumbers community labels to dense ids in order of first appearance.
inline void renumber(std::vector<int>& assignment) {
    std::map<int, int> remap;
    for (int& a : assignment) {
        auto [it, fresh] = remap.emplace(a, static_cast<int>(remap.size()));
        a = it->second;
    }
}

// Plain Newman-Girvan modularity of a partition. With `weighted`, A is the
// co-occurrence weight matrix and degrees are weighted.
inline double modularity(const TagGraph& g, const Partition& part, bool weighted) {
    if (part.assignment.size() != g.num_nodes())
        throw ConfigError("modularity: partition does not cover the graph's node set");
    const double m = static_cast<double>(g.total_weight(weighted));
    if (m == 0.0) return 0.0;
    const int nc = *std::max_element(part.assignment.begin(), part.assignment.end()) + 1;
    std::vector<double> intra(nc, 0.0), tot(nc, 0.0);
    const auto deg = g.degrees(weighted);
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
        tot[part.assignment[i]] += static_cast<double>(deg[i]);
    for (const auto& e : g.edges) {
        if (part.assignment[e.a] == part.assignment[e.b])
            intra[part.assignment[e.a]] += static_cast<double>(weighted ? e.weight : 1);
    }
    double q = 0.0;
    for (int c = 0; c < nc; ++c) {
        const double t = tot[c] / (2.0 * m);
        q += intra[c] / m - t * t;
    }
    return q;
}

namespace detail {

// Aggregatable multigraph used inside Louvain. Self-loops store A_ii
// (twice the internal weight), so degree = selfw + sum of incident weights.
struct LocalGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> selfw;

    int n() const { return static_cast<int>(adj.size()); }

    std::vector<double> degrees() const {
        std::vector<double> d(adj.size(), 0.0);
        for (int i = 0; i < n(); ++i) {
            d[i] = selfw[i];
            for (auto [j, w] : adj[i]) d[i] += w;
        }
        return d;
    }
};

inline LocalGraph to_local(const TagGraph& g, bool weighted) {
    LocalGraph lg;
    lg.adj.resize(g.num_nodes());
    lg.selfw.assign(g.num_nodes(), 0.0);
    for (const auto& e : g.edges) {
        const double w = weighted ? static_cast<double>(e.weight) : 1.0;
        lg.adj[e.a].emplace_back(e.b, w);
        lg.adj[e.b].emplace_back(e.a, w);
    }
    return lg;
}

// One Louvain level: local moving until no gain, in a seeded node order.
// Returns true if any node moved.
inline bool local_move(const LocalGraph& lg, std::vector<int>& node2comm, Rng& rng) {
    const auto deg = lg.degrees();
    const double two_m = std::accumulate(deg.begin(), deg.end(), 0.0);
    if (two_m == 0.0) return false;

    std::vector<double> comm_tot(lg.n(), 0.0);
    std::vector<int> comm_size(lg.n(), 0);
    for (int i = 0; i < lg.n(); ++i) {
        comm_tot[node2comm[i]] += deg[i];
        ++comm_size[node2comm[i]];
    }
    std::vector<int> free_comms;
    for (int c = 0; c < lg.n(); ++c)
        if (comm_size[c] == 0) free_comms.push_back(c);

    std::vector<int> order(lg.n());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> links(lg.n(), 0.0);
    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i : order) {
            const int old_c = node2comm[i];
            std::vector<int> touched;
            for (auto [j, w] : lg.adj[i]) {
                const int c = node2comm[j];
                if (links[c] == 0.0) touched.push_back(c);
                links[c] += w;
            }
            comm_tot[old_c] -= deg[i];
            --comm_size[old_c];

            // staying put is the baseline
            double best_gain = links[old_c] - comm_tot[old_c] * deg[i] / two_m;
            int best_c = old_c;
            // isolation: an empty community has zero links and zero total
            if (!free_comms.empty() && comm_size[old_c] > 0 && 0.0 > best_gain + 1e-12) {
                best_gain = 0.0;
                best_c = free_comms.back();
            }
            // reservoir choice among moves tied at the best gain, so equal
            // options are explored across restarts instead of always taking
            // the first neighbor in adjacency order
            int ties = 0;
            for (int c : touched) {
                if (c == old_c) continue;
                const double gain = links[c] - comm_tot[c] * deg[i] / two_m;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_c = c;
                    ties = 1;
                } else if (best_c != old_c && gain > best_gain - 1e-12 &&
                           rng() % static_cast<std::uint64_t>(++ties) == 0) {
                    best_c = c;
                }
            }
            if (!free_comms.empty() && best_c == free_comms.back()) free_comms.pop_back();
            comm_tot[best_c] += deg[i];
            ++comm_size[best_c];
            if (comm_size[old_c] == 0 && best_c != old_c) free_comms.push_back(old_c);
            node2comm[i] = best_c;
            if (best_c != old_c) {
                improved = true;
                any_move = true;
            }
            for (int c : touched) links[c] = 0.0;
            links[old_c] = 0.0;
        }
    }
    return any_move;
}

inline LocalGraph aggregate(const LocalGraph& lg, const std::vector<int>& node2comm, int nc) {
    LocalGraph out;
    out.adj.resize(nc);
    out.selfw.assign(nc, 0.0);
    std::map<std::pair<int, int>, double> w;
    for (int i = 0; i < lg.n(); ++i) {
        out.selfw[node2comm[i]] += lg.selfw[i];
        for (auto [j, ww] : lg.adj[i]) {
            const int ci = node2comm[i], cj = node2comm[j];
            if (ci == cj)
                out.selfw[ci] += ww;  // each intra edge visited twice -> A_ii
            else if (ci < cj)
                w[{ci, cj}] += ww;
        }
    }
    for (const auto& [key, ww] : w) {
        out.adj[key.first].emplace_back(key.second, ww);
        out.adj[key.second].emplace_back(key.first, ww);
    }
    return out;
}

}  // namespace detail

// Louvain method: seeded local moving plus aggregation, repeated until the
// move phase stops improving. Isolated nodes stay in singleton communities.
inline Partition louvain(const TagGraph& g, std::uint64_t seed, bool weighted = true) {
    if (g.num_nodes() == 0) throw ConfigError("louvain: empty graph");
    Rng rng(seed);
    detail::LocalGraph lg = detail::to_local(g, weighted);

    std::vector<int> full(g.num_nodes());  // original node -> current community
    std::iota(full.begin(), full.end(), 0);

    while (true) {
        std::vector<int> node2comm(lg.n());
        std::iota(node2comm.begin(), node2comm.end(), 0);
        const bool moved = detail::local_move(lg, node2comm, rng);
        if (!moved) break;
        renumber(node2comm);
        const int nc = *std::max_element(node2comm.begin(), node2comm.end()) + 1;
        for (int& c : full) c = node2comm[c];
        if (nc == lg.n()) break;  // no aggregation possible
        lg = detail::aggregate(lg, node2comm, nc);
        if (lg.n() == 1) break;
    }
    renumber(full);

    Partition part;
    part.assignment = std::move(full);
    part.algorithm = CommunityAlgo::louvain;
    part.weighted = weighted;
    part.modularity = modularity(g, part, weighted);
    return part;
}

// Agglomerative modularity maximization: start from singletons and merge
// the community pair with the largest strictly positive gain, ties broken
// by the smallest (id, id) pair. Deterministic.
inline Partition greedy_modularity(const TagGraph& g, bool weighted = true) {
    if (g.num_nodes() == 0) throw ConfigError("greedy_modularity: empty graph");
    const int n = static_cast<int>(g.num_nodes());
    const double m = static_cast<double>(g.total_weight(weighted));

    std::vector<int> comm(n);
    std::iota(comm.begin(), comm.end(), 0);

    if (m > 0.0) {
        const auto deg = g.degrees(weighted);
        std::vector<double> tot(n, 0.0);
        for (int i = 0; i < n; ++i) tot[i] = static_cast<double>(deg[i]);
        // inter-community weights, keys normalized (lo, hi)
        std::map<std::pair<int, int>, double> between;
        for (const auto& e : g.edges) {
            if (e.a == e.b) continue;
            between[{std::min(e.a, e.b), std::max(e.a, e.b)}] +=
                static_cast<double>(weighted ? e.weight : 1);
        }
        while (!between.empty()) {
            double best_gain = 0.0;
            std::pair<int, int> best{-1, -1};
            for (const auto& [key, w] : between) {
                const double gain = w / m - tot[key.first] * tot[key.second] / (2.0 * m * m);
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best = key;
                }
            }
            if (best.first < 0) break;  // no strictly positive merge left
            const auto [a, b] = best;   // merge b into a (a < b)
            for (int& c : comm)
                if (c == b) c = a;
            tot[a] += tot[b];
            tot[b] = 0.0;
            std::map<std::pair<int, int>, double> next;
            for (const auto& [key, w] : between) {
                int x = key.first == b ? a : key.first;
                int y = key.second == b ? a : key.second;
                if (x == y) continue;
                next[{std::min(x, y), std::max(x, y)}] += w;
            }
            between = std::move(next);
        }
    }
    renumber(comm);

    Partition part;
    part.assignment = std::move(comm);
    part.algorithm = CommunityAlgo::greedy_modularity;
    part.weighted = weighted;
    part.modularity = modularity(g, part, weighted);
    return part;
}

inline Partition detect_communities(const TagGraph& g, CommunityAlgo algo, std::uint64_t seed,
                                    bool weighted = true) {
    return algo == CommunityAlgo::louvain ? louvain(g, seed, weighted)
                                          : greedy_modularity(g, weighted);
}

// VI(C, C') = H(C|C') + H(C'|C), in nats. A metric on partitions.
inline double variation_of_information(const Partition& p1, const Partition& p2) {
    if (p1.assignment.size() != p2.assignment.size())
        throw ConfigError("variation_of_information: node sets differ");
    const double n = static_cast<double>(p1.assignment.size());
    if (n == 0.0) return 0.0;

    std::map<int, double> c1, c2;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < p1.assignment.size(); ++i) {
        c1[p1.assignment[i]] += 1.0;
        c2[p2.assignment[i]] += 1.0;
        joint[{p1.assignment[i], p2.assignment[i]}] += 1.0;
    }
    auto entropy = [n](const auto& counts) {
        double h = 0.0;
        for (const auto& [k, c] : counts) h -= (c / n) * std::log(c / n);
        return h;
    };
    double h1 = entropy(c1), h2 = entropy(c2);
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        const double pxy = c / n;
        mi += pxy * std::log(pxy / ((c1[key.first] / n) * (c2[key.second] / n)));
    }
    return std::max(0.0, h1 + h2 - 2.0 * mi);
}

struct RobustnessCurve {
    std::vector<double> p_levels;
    std::vector<double> vi_mean;
    std::vector<double> vi_std;
    int repeats = 0;
};

struct RobustnessResult {
    RobustnessCurve original;  // VI_org
    RobustnessCurve random;    // VI_random, on the degree-preserving null
};

inline std::vector<double> default_p_levels(int count = 20) {
    std::vector<double> p(count);
    for (int i = 0; i < count; ++i) p[i] = static_cast<double>(i) / (count - 1);
    return p;
}

namespace detail {

inline RobustnessCurve robustness_curve(const TagGraph& g, CommunityAlgo algo, bool weighted,
                                        const std::vector<double>& p_levels, int repeats,
                                        std::uint64_t seed) {
    const std::uint64_t algo_seed = derive_seed(seed, "partition");
    const Partition base = detect_communities(g, algo, algo_seed, weighted);

    RobustnessCurve curve;
    curve.p_levels = p_levels;
    curve.repeats = repeats;
    for (std::size_t li = 0; li < p_levels.size(); ++li) {
        double sum = 0.0, sumsq = 0.0;
        for (int r = 0; r < repeats; ++r) {
            const std::uint64_t ps = derive_seed(
                seed, "perturb:" + std::to_string(li) + ":" + std::to_string(r));
            const TagGraph gp = perturb(g, p_levels[li], ps);
            const Partition part = detect_communities(gp, algo, algo_seed, weighted);
            const double vi = variation_of_information(base, part);
            sum += vi;
            sumsq += vi * vi;
        }
        const double mean = sum / repeats;
        curve.vi_mean.push_back(mean);
        curve.vi_std.push_back(std::sqrt(std::max(0.0, sumsq / repeats - mean * mean)));
    }
    return curve;
}

}  // namespace detail

// The four-step perturbation protocol, run on the original graph and on a
// degree-preserving randomized counterpart.
inline RobustnessResult robustness_protocol(const TagGraph& g, CommunityAlgo algo,
                                            const std::vector<double>& p_levels, int repeats,
                                            std::uint64_t seed, bool weighted = true) {
    if (repeats < 1) throw ConfigError("robustness_protocol: repeats must be >= 1");
    if (!std::is_sorted(p_levels.begin(), p_levels.end()))
        throw ConfigError("robustness_protocol: p_levels must be sorted");
    RobustnessResult res;
    res.original = detail::robustness_curve(g, algo, weighted, p_levels, repeats,
                                            derive_seed(seed, "org"));
    const TagGraph null_graph = rewire_random(g, derive_seed(seed, "null"));
    res.random = detail::robustness_curve(null_graph, algo, weighted, p_levels, repeats,
                                          derive_seed(seed, "rand"));
    return res;
}

// CSV: p, vi_mean, vi_std
inline void export_curve_csv(const RobustnessCurve& c, std::ostream& os) {
    os << "p,vi_mean,vi_std\n";
    for (std::size_t i = 0; i < c.p_levels.size(); ++i)
        os << c.p_levels[i] << ',' << c.vi_mean[i] << ',' << c.vi_std[i] << '\n';
}

// `tag<TAB>community_id`
inline void export_partition(const TagGraph& g, const Partition& p, std::ostream& os) {
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
        os << g.node_names[i] << '\t' << p.assignment[i] << '\n';
}

}  // namespace tcte
