// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Criterion 10 needs the full Super User dump and reports SKIP when the
// TCTE_SUPERUSER_POSTS environment variable is unset.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "support/synthetic.hpp"
#include "tcte/experiment.hpp"

using namespace tcte;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << number << ' ' << name << " (" << seconds
              << "s)";
    if (!detail.empty()) std::cout << " " << detail;
    std::cout << '\n';
    if (!pass) ++failures;
}

template <typename F>
void criterion(int number, const std::string& name, F f) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = f(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, name, pass, secs, detail);
}

// ---------------------------------------------------------------------------
// Independent oracles

// Eq-6 by the literal double sum over node pairs.
double modularity_bruteforce(const TagGraph& g, const std::vector<int>& comm, bool weighted) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges) {
        const double w = weighted ? static_cast<double>(e.weight) : 1.0;
        A[e.a][e.b] += w;
        A[e.b][e.a] += w;
    }
    std::vector<double> k(n, 0.0);
    double two_m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += A[i][j];
            two_m += A[i][j];
        }
    if (two_m == 0.0) return 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (comm[i] == comm[j]) q += A[i][j] - k[i] * k[j] / two_m;
    return q / two_m;
}

// All set partitions of {0..n-1} as restricted growth strings.
template <typename F>
void for_each_partition(int n, F f) {
    std::vector<int> a(n, 0), b(n, 0);
    while (true) {
        f(a);
        int i = n - 1;
        while (i > 0 && a[i] == b[i - 1] + 1) --i;
        if (i == 0) break;
        ++a[i];
        b[i] = std::max(b[i - 1], a[i]);
        for (int j = i + 1; j < n; ++j) {
            a[j] = 0;
            b[j] = b[i];
        }
    }
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    auto midranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n, 0.0);
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && v[idx[j]] == v[idx[i]]) ++j;
            const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
            for (std::size_t k = i; k < j; ++k) r[idx[k]] = mid;
            i = j;
        }
        return r;
    };
    const auto rx = midranks(x), ry = midranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

double wilcoxon_bruteforce_p(const std::vector<double>& diffs) {
    const std::size_t n = diffs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(diffs[a]) < std::fabs(diffs[b]); });
    std::vector<double> ranks(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && std::fabs(diffs[idx[j]]) == std::fabs(diffs[idx[i]])) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = mid;
        i = j;
    }
    double w_obs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0.0) w_obs += ranks[i];
    double le = 0, ge = 0;
    const double total = std::pow(2.0, static_cast<double>(n));
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) w += ranks[i];
        if (w <= w_obs + 1e-9) le += 1.0;
        if (w >= w_obs - 1e-9) ge += 1.0;
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

Corpus recency_fixture() {
    Corpus c;
    Id next_q = 1, next_a = 1000;
    auto add = [&](Id user, Timestamp when) {
        QuestionPost q;
        q.question_id = next_q++;
        q.created_at = when - 3600;
        q.tags = {"a", "b"};
        c.questions.push_back(q);
        AnswerPost a;
        a.answer_id = next_a++;
        a.parent_question_id = q.question_id;
        a.answerer_id = user;
        a.created_at = when;
        a.score = 1;
        c.answers.push_back(a);
    };
    for (int i = 0; i < 6; ++i) {
        add(2, make_timestamp(2018, 12, 3 + i));
        add(1, make_timestamp(2017, 3, 3 + i));
    }
    c.finalize();
    return c;
}

}  // namespace

int main() {
    std::cout.precision(4);

    criterion(1, "bridge equivalence (singleton topics + flat kernel = user-tag matrix)",
              [](std::string& detail) {
                  const auto planted = synth::planted_corpus({10, 8, 170, 1000, 50, 5});
                  const Split sp = split(planted.corpus, planted.spec);
                  const TagGraph g = build_tag_graph(sp.train, 5);
                  const TopicMap singles = singleton_topic_map(g);
                  const DiscountKernel flat{KernelKind::none, 1, 0};
                  const ActivityMatrix m =
                      temporal_matrix(sp.train, singles, flat, planted.spec.train_end);

                  // independent user-tag accumulation straight off the corpus
                  std::map<Id, std::map<std::string, double>> oracle;
                  for (const auto& a : sp.train.answers) {
                      if (!a.positively_scored() || !a.answerer_id) continue;
                      const QuestionPost* q = sp.train.find_question(a.parent_question_id);
                      std::vector<std::string> mappable;
                      for (const auto& t : q->tags)
                          if (singles.topic_of(t) >= 0) mappable.push_back(t);
                      if (mappable.empty()) continue;
                      for (const auto& t : mappable)
                          oracle[*a.answerer_id][t] += 1.0 / static_cast<double>(mappable.size());
                  }
                  std::size_t oracle_entries = 0;
                  for (const auto& [u, row] : oracle) oracle_entries += row.size();
                  if (oracle_entries != m.num_entries()) {
                      detail = "entry count mismatch";
                      return false;
                  }
                  for (const auto& [u, row] : oracle) {
                      const int r = m.row_of(u);
                      if (r < 0) return false;
                      for (const auto& [tag, v] : row) {
                          const int topic = singles.topic_of(tag);
                          if (topic < 0) continue;
                          if (std::fabs(m.at(r, topic) - v) > 1e-12) {
                              detail = "entry mismatch for user " + std::to_string(u);
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion(2, "Eq-7 per-question topic fractions sum to 1", [](std::string& detail) {
        Rng rng(2);
        TopicMap tm;
        tm.num_topics = 40;
        for (int i = 0; i < 600; ++i)
            tm.tag_to_topic.emplace("tag" + std::to_string(i), static_cast<int>(rng() % 40));
        for (int qi = 0; qi < 10000; ++qi) {
            QuestionPost q;
            const int k = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < k; ++i) q.tags.push_back("tag" + std::to_string(rng() % 600));
            std::sort(q.tags.begin(), q.tags.end());
            q.tags.erase(std::unique(q.tags.begin(), q.tags.end()), q.tags.end());
            double sum = 0.0;
            for (int c = 0; c < tm.num_topics; ++c) sum += question_topic_fraction(q, tm, c);
            if (std::fabs(sum - 1.0) > 1e-12) {
                detail = "sum deviates by " + std::to_string(sum - 1.0);
                return false;
            }
        }
        return true;
    });

    criterion(3, "modularity oracle + Louvain near-optimality on small graphs",
              [](std::string& detail) {
                  // exhaustive small-graph sample: every n in 3..8, several
                  // random graphs each, all Bell(n) partitions per graph
                  Rng rng(3);
                  for (int n = 3; n <= 8; ++n) {
                      for (int trial = 0; trial < 8; ++trial) {
                          const int max_edges = n * (n - 1) / 2;
                          const int num_edges =
                              1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_edges));
                          TagGraph g = synth::random_graph(n, num_edges, rng());
                          if ((trial % 2) == 1)
                              for (auto& e : g.edges) e.weight = 1 + static_cast<int>(rng() % 5);
                          const bool weighted = (trial % 2) == 1;

                          double best = -1.0;
                          bool oracle_ok = true;
                          for_each_partition(n, [&](const std::vector<int>& assign) {
                              Partition p;
                              p.assignment = assign;
                              const double lib = modularity(g, p, weighted);
                              const double ref = modularity_bruteforce(g, assign, weighted);
                              if (std::fabs(lib - ref) > 1e-9) oracle_ok = false;
                              best = std::max(best, ref);
                          });
                          if (!oracle_ok) {
                              detail = "modularity mismatch vs brute force";
                              return false;
                          }
                          // near-optimality is asserted on the simple
                          // (unweighted) graphs; weighted variants above
                          // exercise only the modularity oracle. Louvain is
                          // order-greedy, so take the best of seeded restarts.
                          if (!weighted) {
                              Partition found = louvain(g, 99, false);
                              for (std::uint64_t s = 100; s < 120; ++s) {
                                  Partition p = louvain(g, s, false);
                                  if (p.modularity > found.modularity) found = std::move(p);
                              }
                              const double threshold = best >= 0.0 ? 0.9 * best : best / 0.9;
                              if (found.modularity < threshold - 1e-12) {
                                  detail = "Louvain Q=" + std::to_string(found.modularity) +
                                           " vs optimum " + std::to_string(best);
                                  return false;
                              }
                          }
                      }
                  }
                  return true;
              });

    criterion(4, "SGD gradient matches central finite differences", [](std::string& detail) {
        const auto planted = synth::planted_corpus({6, 6, 160, 800, 30, 4});
        const Split sp = split(planted.corpus, planted.spec);
        const TagGraph g = build_tag_graph(sp.train, 5);
        const Partition part = louvain(g, 4);
        const TopicMap topics = make_topic_map(g, part);
        const ActivityMatrix m = temporal_matrix(sp.train, topics,
                                                 DiscountKernel{KernelKind::hyperbolic, 1, 0},
                                                 planted.spec.train_end);
        TrainConfig cfg;
        cfg.latent_dim = 4;
        cfg.epochs = 3;
        cfg.seed = 4;
        FactorModel model = factorize(m, cfg);

        const auto entries = matrix_entries(m);
        Rng rng(44);
        const double h = 1e-6;
        for (int trial = 0; trial < 100; ++trial) {
            const bool user_side = rng() % 2 == 0;
            auto& factors = user_side ? model.user_factors : model.topic_factors;
            const std::size_t ci = rng() % factors.size();
            const int row = static_cast<int>(ci) / model.latent_dim;
            const int f = static_cast<int>(ci) % model.latent_dim;

            // analytic gradient of the Eq-12 objective at this coordinate
            double grad = 0.0;
            for (const auto& ent : entries) {
                if ((user_side ? ent.row : ent.col) != row) continue;
                const double* u = model.user_row(ent.row);
                const double* t = model.topic_row(ent.col);
                double pred = 0.0;
                for (int k = 0; k < model.latent_dim; ++k) pred += u[k] * t[k];
                const double e = ent.value - pred;
                const double other = user_side ? t[f] : u[f];
                grad += -2.0 * e * other + 2.0 * model.lambda * factors[ci];
            }
            const double saved = factors[ci];
            factors[ci] = saved + h;
            const double fp = objective(m, model);
            factors[ci] = saved - h;
            const double fm = objective(m, model);
            factors[ci] = saved;
            const double numeric = (fp - fm) / (2.0 * h);

            const double denom = std::max(1.0, std::fabs(numeric));
            if (std::fabs(grad - numeric) / denom > 1e-5) {
                detail = "coordinate " + std::to_string(ci) + " analytic " + std::to_string(grad) +
                         " numeric " + std::to_string(numeric);
                return false;
            }
        }
        return true;
    });

    criterion(5, "recency signature: TCTE-QR strictly prefers the recent user",
              [](std::string& detail) {
                  const Corpus c = recency_fixture();
                  const Timestamp as_of = make_timestamp(2019, 1, 1);
                  const TagGraph g = build_tag_graph(c, 1);
                  const Partition part = louvain(g, 5);
                  const TopicMap topics = make_topic_map(g, part);
                  TrainConfig cfg;
                  cfg.latent_dim = 2;
                  cfg.epochs = 300;
                  cfg.learning_rate = 0.02;
                  cfg.seed = 5;
                  const ActivityMatrix mt = temporal_matrix(
                      c, topics, DiscountKernel{KernelKind::hyperbolic, 1, 0}, as_of);
                  const ActivityMatrix mf =
                      temporal_matrix(c, topics, DiscountKernel{KernelKind::none, 1, 0}, as_of);
                  const Ranking tcte =
                      rank_tcteqr({{"a"}, as_of}, factorize(mt, cfg), topics, {1, 2});
                  TrainConfig cfg2 = cfg;
                  cfg2.seed = 55;
                  const Ranking tc = rank_tcqr({{"a"}, as_of}, factorize(mf, cfg2), topics, {1, 2});
                  if (tcte.entries[0].first != 2 ||
                      tcte.entries[0].second <= tcte.entries[1].second) {
                      detail = "TCTE-QR did not rank the recent user strictly first";
                      return false;
                  }
                  // identical flat-kernel activity rows: the tie resolves by id
                  const int r1 = mf.row_of(1), r2 = mf.row_of(2);
                  for (int t = 0; t < mf.num_topics; ++t)
                      if (std::fabs(mf.at(r1, t) - mf.at(r2, t)) > 1e-12) {
                          detail = "flat-kernel rows differ";
                          return false;
                      }
                  if (tc.entries[0].first != 1) {
                      detail = "TC-QR tie did not resolve by ascending id";
                      return false;
                  }
                  return true;
              });

    criterion(6, "random baseline calibrates to the harmonic expectation",
              [](std::string& detail) {
                  const int n = 10000, trials = 1000;
                  std::vector<Id> candidates(n);
                  std::iota(candidates.begin(), candidates.end(), 1);
                  double sum = 0.0, sumsq = 0.0;
                  for (int s = 0; s < trials; ++s) {
                      const Ranking r = rank_random(candidates, derive_seed(6, std::to_string(s)));
                      const double rr = 1.0 / static_cast<double>(r.position_of(4242));
                      sum += rr;
                      sumsq += rr * rr;
                  }
                  const double mean = sum / trials;
                  const double var = (sumsq - sum * sum / trials) / (trials - 1);
                  const double se = std::sqrt(var / trials);
                  double harmonic = 0.0;
                  for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
                  const double expected = harmonic / n;
                  detail = "mean=" + std::to_string(mean) + " expected=" + std::to_string(expected);
                  return std::fabs(mean - expected) <= 3.0 * se && mean < 0.01;
              });

    criterion(7, "planted-expert recovery ordering over 5 seeds", [](std::string& detail) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            synth::PlantedParams params;
            params.seed = seed;
            const auto planted = synth::planted_corpus(params);
            const Split sp = split(planted.corpus, planted.spec);
            PipelineConfig cfg;
            cfg.master_seed = 100 + seed;
            cfg.methods = {Method::tmf, Method::tcqr, Method::tcteqr};
            const TrainedPipeline pipe =
                train_pipeline(sp.train, cfg, planted.spec.train_end, cfg.methods);
            const MetricsReport rep = evaluate_split(sp, pipe, cfg);
            const double tcte = rep.methods.at(Method::tcteqr).mrr;
            const double tc = rep.methods.at(Method::tcqr).mrr;
            const double tmf = rep.methods.at(Method::tmf).mrr;
            detail = "seed " + std::to_string(seed) + ": tcte=" + std::to_string(tcte) +
                     " tc=" + std::to_string(tc) + " tmf=" + std::to_string(tmf);
            if (!(tcte >= 2.0 * tc && tc >= 1.3 * tmf)) return false;
        }
        return true;
    });

    criterion(8, "user-topic matrix at least 20x denser than user-tag", [](std::string& detail) {
        const auto planted = synth::planted_corpus({});
        const Split sp = split(planted.corpus, planted.spec);
        const TagGraph g = build_tag_graph(sp.train, 5);
        const Partition part = louvain(g, derive_seed(8, "communities"));
        const TopicMap topics = make_topic_map(g, part);
        const TopicMap singles = singleton_topic_map(g);
        const DiscountKernel flat{KernelKind::none, 1, 0};
        const double d_topic =
            density(temporal_matrix(sp.train, topics, flat, planted.spec.train_end));
        const double d_tag =
            density(temporal_matrix(sp.train, singles, flat, planted.spec.train_end));
        const double ratio = d_topic / d_tag;
        detail = "topics=" + std::to_string(topics.num_topics) +
                 " ratio=" + std::to_string(ratio);
        return ratio >= 20.0;
    });

    criterion(9, "robustness curves: monotone VI, original below null", [](std::string& detail) {
        const auto planted = synth::planted_partition_graph(8, 16, 0.5, 0.02, 9);
        const RobustnessResult res =
            robustness_protocol(planted.graph, CommunityAlgo::louvain, default_p_levels(20), 10,
                                derive_seed(9, "robustness"));
        if (res.original.vi_mean.front() != 0.0) {
            detail = "VI(0) != 0";
            return false;
        }
        const double rho = spearman_rho(res.original.p_levels, res.original.vi_mean);
        if (rho <= 0.9) {
            detail = "Spearman rho = " + std::to_string(rho);
            return false;
        }
        for (std::size_t i = 0; i < res.original.p_levels.size(); ++i) {
            const double p = res.original.p_levels[i];
            if (p <= 0.0 || p > 0.2) continue;
            if (!(res.original.vi_mean[i] < res.random.vi_mean[i])) {
                detail = "VI_org >= VI_random at p=" + std::to_string(p);
                return false;
            }
        }
        return true;
    });

    {
        const char* dump = std::getenv("TCTE_SUPERUSER_POSTS");
        if (!dump) {
            std::cout << "[SKIP] 10 full-data reproduction (set TCTE_SUPERUSER_POSTS to the "
                         "Super User Posts.xml to enable)\n";
        } else {
            criterion(10, "full-data reproduction on the Super User dump",
                      [&](std::string& detail) {
                          std::ifstream posts(dump, std::ios::binary);
                          if (!posts) {
                              detail = "cannot open dump";
                              return false;
                          }
                          const Corpus corpus = parse_dump(posts);
                          SplitSpec spec{make_timestamp(2015, 1, 1), make_timestamp(2019, 1, 1),
                                         make_timestamp(2019, 1, 1), make_timestamp(2019, 4, 1),
                                         5};
                          PipelineConfig cfg;
                          const MetricsReport rep = run_split(corpus, spec, cfg);
                          const double tcte = rep.methods.at(Method::tcteqr).mrr;
                          const double tc = rep.methods.at(Method::tcqr).mrr;
                          const double floor = std::max(
                              {rep.methods.at(Method::tmf).mrr, rep.methods.at(Method::zscore).mrr,
                               rep.methods.at(Method::indegree).mrr});
                          const double rnd = rep.methods.at(Method::random).mrr;
                          detail = "tcte=" + std::to_string(tcte);
                          return tcte > tc && tc > floor && floor > rnd &&
                                 std::fabs(tcte - 0.227) <= 0.05;
                      });
        }
    }

    criterion(11, "Wilcoxon exact p-values match full enumeration", [](std::string& detail) {
        Rng rng(11);
        std::uniform_int_distribution<int> mag(1, 5);
        for (int trial = 0; trial < 300; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 11);  // up to 12
            std::vector<double> x(n), y(n, 0.0);
            for (int i = 0; i < n; ++i) {
                double d = 0.5 * mag(rng);
                if (rng() % 2) d = -d;
                x[i] = d;
            }
            const auto res = wilcoxon_paired(x, y);
            if (!res.exact) {
                detail = "exact branch not taken";
                return false;
            }
            const double ref = wilcoxon_bruteforce_p(x);
            if (std::fabs(res.p_value - ref) > 1e-12) {
                detail = "p=" + std::to_string(res.p_value) + " ref=" + std::to_string(ref);
                return false;
            }
        }
        return true;
    });

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
