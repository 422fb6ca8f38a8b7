#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tcte/cache.hpp"
#include "tcte/communities.hpp"
#include "tcte/eval.hpp"
#include "tcte/factorization.hpp"
#include "tcte/ingest.hpp"
#include "tcte/routing.hpp"

namespace tcte {

struct PipelineConfig {
    std::int64_t n_q = 5;                     // tag-pair support threshold
    int window_months = 1;                    // delta
    KernelKind kernel = KernelKind::hyperbolic;
    int latent_dim = 10;
    double lambda = 0.01;
    double learning_rate = 0.005;
    int epochs = 50;
    std::uint64_t master_seed = 42;
    int min_train_answers = 5;
    CommunityAlgo community_algo = CommunityAlgo::louvain;
    bool weighted_modularity = true;
    bool exclude_asker = false;  // drop the asker from their own candidate list
    std::vector<Method> methods = {Method::random,  Method::indegree, Method::zscore,
                                   Method::tmf,     Method::tcqr,     Method::tcteqr};

    std::string fingerprint() const {
        std::ostringstream os;
        os << "n_q=" << n_q << ";delta=" << window_months
           << ";kernel=" << (kernel == KernelKind::hyperbolic ? "hyperbolic" : "none")
           << ";l=" << latent_dim << ";lambda=" << lambda << ";eta=" << learning_rate
           << ";epochs=" << epochs << ";seed=" << master_seed
           << ";min_answers=" << min_train_answers << ";algo=" << to_string(community_algo)
           << ";weighted=" << weighted_modularity << ";exclude_asker=" << exclude_asker;
        std::ostringstream fp;
        fp << std::hex << fnv1a64(os.str());
        return fp.str();
    }

    TrainConfig train_config(std::string_view stage) const {
        TrainConfig tc;
        tc.latent_dim = latent_dim;
        tc.lambda = lambda;
        tc.learning_rate = learning_rate;
        tc.epochs = epochs;
        tc.seed = derive_seed(master_seed, stage);
        return tc;
    }
};

// Everything derived from one training corpus; reusable across the test
// questions of a split.
struct TrainedPipeline {
    TagGraph graph;
    Partition partition;
    TopicMap topics;              // community topics
    TopicMap tag_topics;          // singleton topics (T-MF)
    ActivityMatrix activity_tcte;  // hyperbolic kernel
    ActivityMatrix activity_tc;    // kernel none
    ActivityMatrix activity_tag;   // kernel none, singleton topics
    std::optional<FactorModel> model_tcte;
    std::optional<FactorModel> model_tc;
    std::optional<FactorModel> model_tag;
};

inline TrainedPipeline train_pipeline(const Corpus& train, const PipelineConfig& cfg,
                                      Timestamp as_of, const std::vector<Method>& methods) {
    auto wants = [&](Method m) {
        return std::find(methods.begin(), methods.end(), m) != methods.end();
    };
    TrainedPipeline p;
    p.graph = build_tag_graph(train, cfg.n_q);
    p.partition = detect_communities(p.graph, cfg.community_algo,
                                     derive_seed(cfg.master_seed, "communities"),
                                     cfg.weighted_modularity);
    p.topics = make_topic_map(p.graph, p.partition);
    p.tag_topics = singleton_topic_map(p.graph);

    const DiscountKernel hyper{KernelKind::hyperbolic, cfg.window_months, 0};
    const DiscountKernel flat{KernelKind::none, cfg.window_months, 0};
    const DiscountKernel tcte_kernel = cfg.kernel == KernelKind::hyperbolic ? hyper : flat;

    if (wants(Method::tcteqr)) {
        p.activity_tcte = temporal_matrix(train, p.topics, tcte_kernel, as_of);
        p.model_tcte = factorize(p.activity_tcte, cfg.train_config("factorize:tcte"));
    }
    if (wants(Method::tcqr)) {
        p.activity_tc = temporal_matrix(train, p.topics, flat, as_of);
        p.model_tc = factorize(p.activity_tc, cfg.train_config("factorize:tc"));
    }
    if (wants(Method::tmf)) {
        p.activity_tag = temporal_matrix(train, p.tag_topics, flat, as_of);
        p.model_tag = factorize(p.activity_tag, cfg.train_config("factorize:tmf"));
    }
    return p;
}

// Runs every requested method over the test questions of a prepared split
// and aggregates MRR / P@5 / P@10.
inline MetricsReport evaluate_split(const Split& sp, const TrainedPipeline& pipe,
                                    const PipelineConfig& cfg) {
    MetricsReport report;
    report.config_fingerprint = cfg.fingerprint();
    report.unreachable_count = sp.unreachable.size();

    const Ranking indegree_rank = rank_indegree(sp.candidates, sp.train);
    const Ranking zscore_rank = rank_zscore(sp.candidates, sp.train);

    std::map<Method, std::vector<std::size_t>> positions;
    for (const auto& q : sp.test.questions) {
        const auto truth = ground_truth(sp.test, q);
        if (!truth) continue;
        NewQuestion nq{q.tags, q.created_at};

        std::vector<Id> candidates = sp.candidates;
        if (cfg.exclude_asker && q.asker_id) {
            candidates.erase(std::remove(candidates.begin(), candidates.end(), *q.asker_id),
                             candidates.end());
        }

        // unroutable questions are excluded from every method's denominator
        std::map<int, double> weights;
        try {
            weights = topic_weights(nq, pipe.topics);
        } catch (const UnroutableQuestion&) {
            ++report.unroutable_count;
            continue;
        }
        ++report.question_count;

        for (Method m : cfg.methods) {
            Ranking r;
            switch (m) {
                case Method::random:
                    r = rank_random(candidates,
                                    derive_seed(cfg.master_seed,
                                                "random:" + std::to_string(q.question_id)));
                    break;
                case Method::indegree: r = indegree_rank; break;
                case Method::zscore: r = zscore_rank; break;
                case Method::tmf: {
                    try {
                        r = rank_tmf(nq, *pipe.model_tag, pipe.tag_topics, candidates);
                    } catch (const UnroutableQuestion&) {
                        r = Ranking{};  // routable by topic but not by raw tag
                        for (Id u : candidates) r.entries.emplace_back(u, 0.0);
                        r.method = Method::tmf;
                    }
                    break;
                }
                case Method::tcqr: r = rank_tcqr(nq, *pipe.model_tc, pipe.topics, candidates); break;
                case Method::tcteqr:
                    r = rank_tcteqr(nq, *pipe.model_tcte, pipe.topics, candidates);
                    break;
            }
            std::size_t pos = r.position_of(*truth);
            if (m == Method::indegree || m == Method::zscore) {
                // the shared precomputed ranking still contains excluded askers
                if (cfg.exclude_asker && q.asker_id && *truth == *q.asker_id) pos = 0;
            }
            positions[m].push_back(pos);
        }
    }

    for (Method m : cfg.methods) {
        MethodMetrics mm;
        const auto& pos = positions[m];
        if (!pos.empty()) {
            mm.mrr = mrr(pos);
            mm.p_at_5 = precision_at(pos, 5);
            mm.p_at_10 = precision_at(pos, 10);
            mm.per_question_rr = reciprocal_ranks(pos);
        }
        report.methods[m] = mm;
    }
    return report;
}

inline MetricsReport run_split(const Corpus& corpus, const SplitSpec& spec,
                               const PipelineConfig& cfg) {
    Split sp = split(corpus, spec);
    const TrainedPipeline pipe = train_pipeline(sp.train, cfg, spec.train_end, cfg.methods);
    return evaluate_split(sp, pipe, cfg);
}

struct ExperimentResult {
    std::vector<MetricsReport> per_split;
    std::vector<PairedTestResult> paired_tests;  // per-question within-split RR pairs
};

// Multi-split protocol (e.g. the rolling-quarter setup): one report per split
// plus paired Wilcoxon tests between all method pairs. With several splits
// the pairing is per-split MRR; with one split it is per-question RR.
inline ExperimentResult run_experiment(const Corpus& corpus, const std::vector<SplitSpec>& splits,
                                       const PipelineConfig& cfg) {
    if (splits.empty()) throw ConfigError("run_experiment: no splits configured");
    ExperimentResult res;
    for (const auto& spec : splits) res.per_split.push_back(run_split(corpus, spec, cfg));

    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
            std::vector<double> a, b;
            if (res.per_split.size() > 1) {
                for (const auto& r : res.per_split) {
                    a.push_back(r.methods.at(cfg.methods[i]).mrr);
                    b.push_back(r.methods.at(cfg.methods[j]).mrr);
                }
            } else {
                a = res.per_split[0].methods.at(cfg.methods[i]).per_question_rr;
                b = res.per_split[0].methods.at(cfg.methods[j]).per_question_rr;
            }
            PairedTestResult t = wilcoxon_paired(a, b);
            t.method_a = to_string(cfg.methods[i]);
            t.method_b = to_string(cfg.methods[j]);
            res.paired_tests.push_back(std::move(t));
        }
    }
    return res;
}

}  // namespace tcte
