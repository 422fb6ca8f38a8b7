// Pipeline orchestrator: each subcommand reads the artifacts of its upstream
// stages from the output directory and writes its own, so any stage can be
// re-run in isolation. All randomness derives from the master seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcte/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tcte;

namespace {

struct AppConfig {
    std::string posts_path;
    std::string tags_path;  // optional
    SplitSpec split;
    PipelineConfig pipeline;
    int robustness_levels = 20;
    int robustness_repeats = 10;
    int threads = 1;
};

Method method_from_string(const std::string& s) {
    for (Method m : {Method::random, Method::indegree, Method::zscore, Method::tmf, Method::tcqr,
                     Method::tcteqr})
        if (s == to_string(m)) return m;
    throw ConfigError("config: unknown method \"" + s + "\"");
}

AppConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }

    AppConfig cfg;
    try {
        cfg.posts_path = j.at("posts").get<std::string>();
        cfg.tags_path = j.value("tags", std::string{});

        const json& sp = j.at("split");
        cfg.split.train_start = parse_timestamp(sp.at("train_start").get<std::string>());
        cfg.split.train_end = parse_timestamp(sp.at("train_end").get<std::string>());
        cfg.split.test_start = parse_timestamp(sp.at("test_start").get<std::string>());
        cfg.split.test_end = parse_timestamp(sp.at("test_end").get<std::string>());
        cfg.split.min_train_answers = sp.value("min_train_answers", 5);
        cfg.split.validate();

        PipelineConfig& p = cfg.pipeline;
        p.n_q = j.value("n_q", std::int64_t{5});
        p.window_months = j.value("window_months", 1);
        const std::string kernel = j.value("kernel", std::string{"hyperbolic"});
        if (kernel == "hyperbolic")
            p.kernel = KernelKind::hyperbolic;
        else if (kernel == "none")
            p.kernel = KernelKind::none;
        else
            throw ConfigError("config: kernel must be \"hyperbolic\" or \"none\"");
        p.latent_dim = j.value("latent_dim", 10);
        p.lambda = j.value("lambda", 0.01);
        p.learning_rate = j.value("learning_rate", 0.005);
        p.epochs = j.value("epochs", 50);
        p.master_seed = j.value("seed", std::uint64_t{42});
        p.min_train_answers = cfg.split.min_train_answers;
        const std::string algo = j.value("algorithm", std::string{"louvain"});
        if (algo == "louvain")
            p.community_algo = CommunityAlgo::louvain;
        else if (algo == "greedy_modularity")
            p.community_algo = CommunityAlgo::greedy_modularity;
        else
            throw ConfigError("config: algorithm must be \"louvain\" or \"greedy_modularity\"");
        p.weighted_modularity = j.value("weighted", true);
        p.exclude_asker = j.value("exclude_asker", false);
        if (j.contains("methods")) {
            p.methods.clear();
            for (const auto& m : j.at("methods")) p.methods.push_back(method_from_string(m));
            if (p.methods.empty()) throw ConfigError("config: methods list is empty");
        }
        if (j.contains("robustness")) {
            cfg.robustness_levels = j["robustness"].value("levels", 20);
            cfg.robustness_repeats = j["robustness"].value("repeats", 10);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Artifact plumbing

void require_artifact(const fs::path& p, const std::string& stage) {
    if (!fs::exists(p))
        throw ConfigError("missing artifact " + p.string() + "; run the `" + stage +
                          "` stage first");
}

void write_meta(const fs::path& outdir, const std::string& stage, const AppConfig& cfg,
                json extra = json::object()) {
    extra["stage"] = stage;
    extra["version"] = 1;
    extra["fingerprint"] = cfg.pipeline.fingerprint();
    std::ofstream os(outdir / (stage + ".meta.json"));
    os << extra.dump(2) << '\n';
    if (!os) throw IoError("cannot write " + (outdir / (stage + ".meta.json")).string());
}

json read_meta(const fs::path& outdir, const std::string& stage) {
    const fs::path p = outdir / (stage + ".meta.json");
    require_artifact(p, stage);
    std::ifstream is(p);
    json j;
    is >> j;
    return j;
}

Corpus load_corpus(const fs::path& outdir) {
    const fs::path p = outdir / "corpus.bin";
    require_artifact(p, "ingest");
    return cache_read(p.string());
}

TagGraph load_graph(const fs::path& outdir) {
    const fs::path p = outdir / "graph.tsv";
    require_artifact(p, "graph");
    std::ifstream is(p);
    std::vector<std::tuple<std::string, std::string, std::int64_t>> rows;
    std::string a, b;
    std::int64_t w;
    while (is >> a >> b >> w) rows.emplace_back(a, b, w);
    TagGraph g;
    for (const auto& [x, y, _] : rows) {
        g.node_names.push_back(x);
        g.node_names.push_back(y);
    }
    std::sort(g.node_names.begin(), g.node_names.end());
    g.node_names.erase(std::unique(g.node_names.begin(), g.node_names.end()),
                       g.node_names.end());
    for (const auto& [x, y, weight] : rows) {
        NodeId na = g.node_id(x), nb = g.node_id(y);
        if (na > nb) std::swap(na, nb);
        g.edges.push_back({na, nb, weight});
    }
    g.sort_edges();
    return g;
}

TopicMap load_topics(const fs::path& outdir) {
    const fs::path p = outdir / "partition.tsv";
    require_artifact(p, "communities");
    std::ifstream is(p);
    TopicMap tm;
    std::string tag;
    int comm;
    while (is >> tag >> comm) {
        tm.tag_to_topic.emplace(tag, comm);
        tm.num_topics = std::max(tm.num_topics, comm + 1);
    }
    if (tm.tag_to_topic.empty()) throw IoError("partition.tsv is empty");
    return tm;
}

TopicMap singleton_topics_from(const TopicMap& topics) {
    std::vector<std::string> tags;
    tags.reserve(topics.tag_to_topic.size());
    for (const auto& [tag, _] : topics.tag_to_topic) tags.push_back(tag);
    std::sort(tags.begin(), tags.end());
    TopicMap tm;
    for (std::size_t i = 0; i < tags.size(); ++i)
        tm.tag_to_topic.emplace(tags[i], static_cast<int>(i));
    tm.num_topics = static_cast<int>(tags.size());
    return tm;
}

bool wants(const AppConfig& cfg, Method m) {
    const auto& ms = cfg.pipeline.methods;
    return std::find(ms.begin(), ms.end(), m) != ms.end();
}

void emit(bool as_json, const json& summary, const std::string& text) {
    if (as_json)
        std::cout << summary.dump() << '\n';
    else
        std::cout << text << '\n';
}

// ---------------------------------------------------------------------------
// Stages

void cmd_ingest(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    std::ifstream posts(cfg.posts_path, std::ios::binary);
    if (!posts) throw ConfigError("cannot open posts file: " + cfg.posts_path);
    std::ifstream tags;
    std::istream* tags_ptr = nullptr;
    if (!cfg.tags_path.empty()) {
        tags.open(cfg.tags_path, std::ios::binary);
        if (!tags) throw ConfigError("cannot open tags file: " + cfg.tags_path);
        tags_ptr = &tags;
    }
    IngestStats stats;
    const Corpus corpus = parse_dump(posts, tags_ptr, &stats);
    cache_write(corpus, (outdir / "corpus.bin").string());
    write_meta(outdir, "ingest",
               cfg, {{"questions", stats.questions},
                     {"answers", stats.answers},
                     {"rows_skipped_missing_attr", stats.rows_skipped_missing_attr},
                     {"rows_skipped_unknown_type", stats.rows_skipped_unknown_type},
                     {"orphan_answers_dropped", stats.orphan_answers_dropped}});
    emit(as_json,
         {{"stage", "ingest"}, {"questions", stats.questions}, {"answers", stats.answers}},
         "ingest: " + stats.summary());
}

void cmd_graph(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const Corpus corpus = load_corpus(outdir);
    const Split sp = split(corpus, cfg.split);
    const TagGraph g = build_tag_graph(sp.train, cfg.pipeline.n_q);
    std::ofstream os(outdir / "graph.tsv");
    export_edge_list(g, os);
    if (!os) throw IoError("cannot write graph.tsv");
    write_meta(outdir, "graph", cfg,
               {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}, {"n_q", cfg.pipeline.n_q}});
    std::ostringstream text;
    text << "graph: " << g.num_nodes() << " tags, " << g.num_edges() << " edges (n_q="
         << cfg.pipeline.n_q << ")";
    emit(as_json, {{"stage", "graph"}, {"nodes", g.num_nodes()}, {"edges", g.num_edges()}},
         text.str());
}

void cmd_communities(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const TagGraph g = load_graph(outdir);
    const Partition part =
        detect_communities(g, cfg.pipeline.community_algo,
                           derive_seed(cfg.pipeline.master_seed, "communities"),
                           cfg.pipeline.weighted_modularity);
    std::ofstream os(outdir / "partition.tsv");
    export_partition(g, part, os);
    if (!os) throw IoError("cannot write partition.tsv");
    write_meta(outdir, "communities", cfg,
               {{"algorithm", to_string(part.algorithm)},
                {"modularity", part.modularity},
                {"communities", part.num_communities()}});
    std::ostringstream text;
    text << "communities: " << part.num_communities() << " communities, Q=" << part.modularity;
    emit(as_json,
         {{"stage", "communities"},
          {"communities", part.num_communities()},
          {"modularity", part.modularity}},
         text.str());
}

void cmd_activity(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const Corpus corpus = load_corpus(outdir);
    const TopicMap topics = load_topics(outdir);
    const Split sp = split(corpus, cfg.split);
    const DiscountKernel flat{KernelKind::none, cfg.pipeline.window_months, 0};
    const DiscountKernel main_kernel{cfg.pipeline.kernel, cfg.pipeline.window_months, 0};

    json sizes = json::object();
    auto save = [&](const char* name, const ActivityMatrix& m) {
        std::ofstream os(outdir / (std::string("activity_") + name + ".tsv"));
        export_matrix(m, os);
        if (!os) throw IoError(std::string("cannot write activity_") + name + ".tsv");
        sizes[name] = {{"users", m.num_users()},
                       {"topics", m.num_topics},
                       {"entries", m.num_entries()},
                       {"density", density(m)}};
    };
    if (wants(cfg, Method::tcteqr))
        save("tcte", temporal_matrix(sp.train, topics, main_kernel, cfg.split.train_end));
    if (wants(cfg, Method::tcqr))
        save("tc", temporal_matrix(sp.train, topics, flat, cfg.split.train_end));
    if (wants(cfg, Method::tmf))
        save("tag",
             temporal_matrix(sp.train, singleton_topics_from(topics), flat, cfg.split.train_end));
    write_meta(outdir, "activity", cfg, {{"matrices", sizes}});
    emit(as_json, {{"stage", "activity"}, {"matrices", sizes}},
         "activity: wrote " + std::to_string(sizes.size()) + " matrices");
}

ActivityMatrix load_matrix(const fs::path& outdir, const char* name, int num_topics) {
    const fs::path p = outdir / (std::string("activity_") + name + ".tsv");
    require_artifact(p, "activity");
    std::ifstream is(p);
    std::map<Id, std::vector<std::pair<int, double>>> by_user;
    Id user;
    int topic;
    double value;
    while (is >> user >> topic >> value) by_user[user].emplace_back(topic, value);
    ActivityMatrix m;
    m.num_topics = num_topics;
    for (auto& [u, row] : by_user) {
        std::sort(row.begin(), row.end());
        m.user_ids.push_back(u);
        m.rows.push_back(std::move(row));
    }
    return m;
}

void cmd_train(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const TopicMap topics = load_topics(outdir);
    json rmse = json::object();
    auto train_one = [&](const char* name, int num_topics, const char* stage) {
        const ActivityMatrix m = load_matrix(outdir, name, num_topics);
        const FactorModel fm = factorize(m, cfg.pipeline.train_config(stage));
        save_model(fm, (outdir / (std::string("model_") + name + ".bin")).string());
        rmse[name] = fm.final_train_rmse;
    };
    if (wants(cfg, Method::tcteqr)) train_one("tcte", topics.num_topics, "factorize:tcte");
    if (wants(cfg, Method::tcqr)) train_one("tc", topics.num_topics, "factorize:tc");
    if (wants(cfg, Method::tmf))
        train_one("tag", static_cast<int>(topics.tag_to_topic.size()), "factorize:tmf");
    write_meta(outdir, "train", cfg, {{"train_rmse", rmse}});
    emit(as_json, {{"stage", "train"}, {"train_rmse", rmse}},
         "train: " + std::to_string(rmse.size()) + " models, rmse " + rmse.dump());
}

FactorModel load_model_artifact(const fs::path& outdir, const char* name) {
    const fs::path p = outdir / (std::string("model_") + name + ".bin");
    require_artifact(p, "train");
    return load_model(p.string());
}

void cmd_rank(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const Corpus corpus = load_corpus(outdir);
    const TopicMap topics = load_topics(outdir);
    const TopicMap tag_topics = singleton_topics_from(topics);
    const Split sp = split(corpus, cfg.split);
    const PipelineConfig& p = cfg.pipeline;

    std::optional<FactorModel> model_tcte, model_tc, model_tag;
    if (wants(cfg, Method::tcteqr)) model_tcte = load_model_artifact(outdir, "tcte");
    if (wants(cfg, Method::tcqr)) model_tc = load_model_artifact(outdir, "tc");
    if (wants(cfg, Method::tmf)) model_tag = load_model_artifact(outdir, "tag");

    const Ranking indegree_rank = rank_indegree(sp.candidates, sp.train);
    const Ranking zscore_rank = rank_zscore(sp.candidates, sp.train);

    std::map<Method, std::ofstream> tsv, jsonl;
    for (Method m : p.methods) {
        const std::string base = std::string("rank_") + to_string(m);
        tsv[m].open(outdir / (base + ".tsv"));
        jsonl[m].open(outdir / (base + ".jsonl"));
        if (!tsv[m] || !jsonl[m]) throw IoError("cannot write ranking artifacts for " + base);
    }

    std::size_t question_count = 0, unroutable = 0;
    for (const auto& q : sp.test.questions) {
        const auto truth = ground_truth(sp.test, q);
        if (!truth) continue;
        NewQuestion nq{q.tags, q.created_at};

        std::vector<Id> candidates = sp.candidates;
        if (p.exclude_asker && q.asker_id)
            candidates.erase(std::remove(candidates.begin(), candidates.end(), *q.asker_id),
                             candidates.end());

        try {
            topic_weights(nq, topics);
        } catch (const UnroutableQuestion&) {
            ++unroutable;
            continue;
        }
        ++question_count;

        for (Method m : p.methods) {
            Ranking r;
            switch (m) {
                case Method::random:
                    r = rank_random(candidates, derive_seed(p.master_seed,
                                                            "random:" +
                                                                std::to_string(q.question_id)));
                    break;
                case Method::indegree: r = indegree_rank; break;
                case Method::zscore: r = zscore_rank; break;
                case Method::tmf:
                    try {
                        r = rank_tmf(nq, *model_tag, tag_topics, candidates);
                    } catch (const UnroutableQuestion&) {
                        for (Id u : candidates) r.entries.emplace_back(u, 0.0);
                        r.method = Method::tmf;
                    }
                    break;
                case Method::tcqr: r = rank_tcqr(nq, *model_tc, topics, candidates); break;
                case Method::tcteqr: r = rank_tcteqr(nq, *model_tcte, topics, candidates); break;
            }
            r.question_id = q.question_id;
            export_ranking(r, tsv[m]);

            std::size_t pos = r.position_of(*truth);
            if ((m == Method::indegree || m == Method::zscore) && p.exclude_asker && q.asker_id &&
                *truth == *q.asker_id)
                pos = 0;
            json line = {{"question_id", q.question_id},
                         {"method", to_string(m)},
                         {"truth", *truth},
                         {"position", pos}};
            json entries = json::array();
            for (const auto& [u, s] : r.entries) entries.push_back({{"user", u}, {"score", s}});
            line["ranking"] = std::move(entries);
            jsonl[m] << line.dump() << '\n';
        }
    }

    json method_names = json::array();
    for (Method m : p.methods) method_names.push_back(to_string(m));
    write_meta(outdir, "rank", cfg,
               {{"methods", method_names},
                {"questions", question_count},
                {"unroutable", unroutable},
                {"unreachable", sp.unreachable.size()},
                {"candidates", sp.candidates.size()}});
    std::ostringstream text;
    text << "rank: " << question_count << " questions, " << sp.candidates.size()
         << " candidates, " << unroutable << " unroutable";
    emit(as_json,
         {{"stage", "rank"},
          {"questions", question_count},
          {"candidates", sp.candidates.size()},
          {"unroutable", unroutable}},
         text.str());
}

void cmd_eval(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const json rank_meta = read_meta(outdir, "rank");
    if (rank_meta.at("fingerprint").get<std::string>() != cfg.pipeline.fingerprint())
        throw ConfigError(
            "rank artifacts were produced under a different configuration "
            "(fingerprint mismatch); re-run the `rank` stage");

    // positions re-derived from the ranking artifacts, not trusted from rank
    std::map<Method, std::vector<std::size_t>> positions;
    for (Method m : cfg.pipeline.methods) {
        const fs::path p = outdir / (std::string("rank_") + to_string(m) + ".jsonl");
        require_artifact(p, "rank");
        std::ifstream is(p);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const json rec = json::parse(line);
            const Id truth = rec.at("truth").get<Id>();
            std::size_t pos = 0, i = 0;
            for (const auto& e : rec.at("ranking")) {
                ++i;
                if (e.at("user").get<Id>() == truth) {
                    pos = i;
                    break;
                }
            }
            if (rec.at("position").get<std::size_t>() == 0) pos = 0;  // excluded asker
            positions[m].push_back(pos);
        }
        if (positions[m].empty())
            throw ConfigError("rank artifact " + p.string() + " has no questions");
    }

    json report;
    report["version"] = 1;
    report["fingerprint"] = cfg.pipeline.fingerprint();
    report["questions"] = rank_meta.value("questions", 0);
    report["unroutable"] = rank_meta.value("unroutable", 0);
    report["unreachable"] = rank_meta.value("unreachable", 0);

    std::ostringstream text;
    text << "method      MRR       P@5       P@10\n";
    json methods = json::object();
    for (Method m : cfg.pipeline.methods) {
        const auto& pos = positions[m];
        json jm = {{"mrr", mrr(pos)},
                   {"p_at_5", precision_at(pos, 5)},
                   {"p_at_10", precision_at(pos, 10)}};
        methods[to_string(m)] = jm;
        char buf[80];
        std::snprintf(buf, sizeof buf, "%-10s  %.6f  %.6f  %.6f\n", to_string(m), mrr(pos),
                      precision_at(pos, 5), precision_at(pos, 10));
        text << buf;
    }
    report["methods"] = methods;

    json tests = json::array();
    for (std::size_t i = 0; i < cfg.pipeline.methods.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.pipeline.methods.size(); ++j) {
            const Method a = cfg.pipeline.methods[i], b = cfg.pipeline.methods[j];
            PairedTestResult t =
                wilcoxon_paired(reciprocal_ranks(positions[a]), reciprocal_ranks(positions[b]));
            tests.push_back({{"method_a", to_string(a)},
                             {"method_b", to_string(b)},
                             {"statistic", t.statistic},
                             {"p_value", t.p_value},
                             {"n", t.n},
                             {"exact", t.exact},
                             {"significant", t.significant()}});
        }
    report["paired_tests"] = tests;

    {
        std::ofstream os(outdir / "report.json");
        os << report.dump(2) << '\n';
        if (!os) throw IoError("cannot write report.json");
    }
    {
        std::ofstream os(outdir / "report.txt");
        os << text.str();
        if (!os) throw IoError("cannot write report.txt");
    }
    write_meta(outdir, "eval", cfg, {{"methods", report["methods"]}});
    emit(as_json, report, text.str());
}

void cmd_robustness(const AppConfig& cfg, const fs::path& outdir, bool as_json) {
    const TagGraph g = load_graph(outdir);
    const RobustnessResult res = robustness_protocol(
        g, cfg.pipeline.community_algo, default_p_levels(cfg.robustness_levels),
        cfg.robustness_repeats, derive_seed(cfg.pipeline.master_seed, "robustness"),
        cfg.pipeline.weighted_modularity);
    {
        std::ofstream os(outdir / "robustness_original.csv");
        export_curve_csv(res.original, os);
        if (!os) throw IoError("cannot write robustness_original.csv");
    }
    {
        std::ofstream os(outdir / "robustness_random.csv");
        export_curve_csv(res.random, os);
        if (!os) throw IoError("cannot write robustness_random.csv");
    }
    write_meta(outdir, "robustness", cfg,
               {{"levels", cfg.robustness_levels}, {"repeats", cfg.robustness_repeats}});
    std::ostringstream text;
    text << "robustness: " << cfg.robustness_levels << " levels x " << cfg.robustness_repeats
         << " repeats, VI(0)=" << res.original.vi_mean.front()
         << " VI(max)=" << res.original.vi_mean.back();
    emit(as_json,
         {{"stage", "robustness"},
          {"vi_original", res.original.vi_mean},
          {"vi_random", res.random.vi_mean}},
         text.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topic-community temporal expertise question routing"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::string config_path, output_dir = "out";
    std::uint64_t seed_override = 0;
    bool seed_set = false, as_json = false;
    int threads = 1;
    app.add_option("--config", config_path, "pipeline configuration (JSON)")->required();
    app.add_option("--output-dir", output_dir, "artifact directory");
    app.add_option("--seed", seed_override, "override the master seed")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--threads", threads, "worker threads for stage-internal parallelism");
    app.add_flag("--json", as_json, "machine-readable stage summaries on stdout");

    auto* c_ingest = app.add_subcommand("ingest", "parse the posts dump into the corpus cache");
    auto* c_graph = app.add_subcommand("graph", "build the tag co-occurrence graph");
    auto* c_comm = app.add_subcommand("communities", "detect topic communities");
    auto* c_act = app.add_subcommand("activity", "build user-topic activity matrices");
    auto* c_train = app.add_subcommand("train", "factorize the activity matrices");
    auto* c_rank = app.add_subcommand("rank", "rank candidates for the test questions");
    auto* c_eval = app.add_subcommand("eval", "compute metrics and significance tests");
    auto* c_rob = app.add_subcommand("robustness", "run the perturbation robustness protocol");
    auto* c_all = app.add_subcommand("run-all", "run every stage in order");

    CLI11_PARSE(app, argc, argv);

    try {
        AppConfig cfg = load_config(config_path);
        if (seed_set) cfg.pipeline.master_seed = seed_override;
        cfg.threads = threads;
        const fs::path outdir = output_dir;
        fs::create_directories(outdir);

        if (c_ingest->parsed()) cmd_ingest(cfg, outdir, as_json);
        if (c_graph->parsed()) cmd_graph(cfg, outdir, as_json);
        if (c_comm->parsed()) cmd_communities(cfg, outdir, as_json);
        if (c_act->parsed()) cmd_activity(cfg, outdir, as_json);
        if (c_train->parsed()) cmd_train(cfg, outdir, as_json);
        if (c_rank->parsed()) cmd_rank(cfg, outdir, as_json);
        if (c_eval->parsed()) cmd_eval(cfg, outdir, as_json);
        if (c_rob->parsed()) cmd_robustness(cfg, outdir, as_json);
        if (c_all->parsed()) {
            cmd_ingest(cfg, outdir, as_json);
            cmd_graph(cfg, outdir, as_json);
            cmd_communities(cfg, outdir, as_json);
            cmd_activity(cfg, outdir, as_json);
            cmd_train(cfg, outdir, as_json);
            cmd_rank(cfg, outdir, as_json);
            cmd_eval(cfg, outdir, as_json);
            cmd_robustness(cfg, outdir, as_json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
