#pragma once

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <vector>

#include "tcte/activity.hpp"

namespace tcte {

struct TrainConfig {
    int latent_dim = 10;
    double lambda = 0.01;
    double learning_rate = 0.005;
    int epochs = 50;
    std::uint64_t seed = 0;

    void validate() const {
        if (latent_dim < 1 || lambda < 0.0 || learning_rate <= 0.0 || epochs < 1)
            throw ConfigError("TrainConfig: all parameters must be positive");
    }
};

struct FactorModel {
    int num_users = 0;
    int num_topics = 0;
    int latent_dim = 0;
    double lambda = 0.0;
    std::vector<double> user_factors;   // row-major M x l
    std::vector<double> topic_factors;  // row-major N x l
    std::vector<Id> user_ids;           // row index -> user id
    std::uint64_t seed = 0;
    int epochs = 0;
    double learning_rate = 0.0;
    double final_train_rmse = 0.0;

    const double* user_row(int a) const { return &user_factors[static_cast<std::size_t>(a) * latent_dim]; }
    const double* topic_row(int w) const { return &topic_factors[static_cast<std::size_t>(w) * latent_dim]; }

    int row_of(Id user) const {
        auto it = std::lower_bound(user_ids.begin(), user_ids.end(), user);
        return (it != user_ids.end() && *it == user) ? static_cast<int>(it - user_ids.begin()) : -1;
    }

    double predict(int user_row_idx, int topic) const {
        if (user_row_idx < 0 || user_row_idx >= num_users || topic < 0 || topic >= num_topics)
            throw ConfigError("predict: index out of range");
        const double* u = user_row(user_row_idx);
        const double* t = topic_row(topic);
        double s = 0.0;
        for (int f = 0; f < latent_dim; ++f) s += u[f] * t[f];
        return s;
    }
};

struct SparseEntry {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

inline std::vector<SparseEntry> matrix_entries(const ActivityMatrix& m) {
    std::vector<SparseEntry> e;
    e.reserve(m.num_entries());
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        for (auto [topic, v] : m.rows[r]) e.push_back({static_cast<int>(r), topic, v});
    return e;
}

namespace detail {

inline FactorModel sgd_train(const std::vector<SparseEntry>& entries, int num_users,
                             int num_topics, const std::vector<Id>& user_ids,
                             const TrainConfig& cfg) {
    cfg.validate();
    if (entries.empty()) throw ConfigError("factorize: matrix has no entries");

    FactorModel model;
    model.num_users = num_users;
    model.num_topics = num_topics;
    model.latent_dim = cfg.latent_dim;
    model.lambda = cfg.lambda;
    model.seed = cfg.seed;
    model.epochs = cfg.epochs;
    model.learning_rate = cfg.learning_rate;
    model.user_ids = user_ids;

    Rng rng(cfg.seed);
    std::normal_distribution<double> init(0.0, 0.1);
    model.user_factors.resize(static_cast<std::size_t>(num_users) * cfg.latent_dim);
    model.topic_factors.resize(static_cast<std::size_t>(num_topics) * cfg.latent_dim);
    for (auto& x : model.user_factors) x = init(rng);
    for (auto& x : model.topic_factors) x = init(rng);

    const int l = cfg.latent_dim;
    const double eta = cfg.learning_rate;
    const double lambda = cfg.lambda;
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double sq_err = 0.0;
        for (std::size_t oi : order) {
            const SparseEntry& ent = entries[oi];
            double* u = &model.user_factors[static_cast<std::size_t>(ent.row) * l];
            double* t = &model.topic_factors[static_cast<std::size_t>(ent.col) * l];
            double pred = 0.0;
            for (int f = 0; f < l; ++f) pred += u[f] * t[f];
            const double e = ent.value - pred;
            sq_err += e * e;
            for (int f = 0; f < l; ++f) {
                const double uf = u[f];
                u[f] += eta * (e * t[f] - lambda * uf);
                t[f] += eta * (e * uf - lambda * t[f]);
            }
        }
        if (!std::isfinite(sq_err))
            throw ConfigError("factorize: objective diverged, learning rate too high");
        model.final_train_rmse = std::sqrt(sq_err / static_cast<double>(entries.size()));
    }
    return model;
}

}  // namespace detail

// Seeded SGD on the known entries of the activity matrix. Deterministic:
// the training loop is single-threaded and all shuffles come from cfg.seed.
inline FactorModel factorize(const ActivityMatrix& m, const TrainConfig& cfg) {
    return detail::sgd_train(matrix_entries(m), static_cast<int>(m.num_users()), m.num_topics,
                             m.user_ids, cfg);
}

// Regularized squared error over the known entries, matching the per-entry
// update rule: each observed entry contributes its own Tikhonov terms.
inline double objective(const ActivityMatrix& m, const FactorModel& model) {
    if (static_cast<int>(m.num_users()) != model.num_users || m.num_topics != model.num_topics)
        throw ConfigError("objective: dimension mismatch");
    double eps = 0.0;
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        const double* u = model.user_row(static_cast<int>(r));
        double unorm = 0.0;
        for (int f = 0; f < model.latent_dim; ++f) unorm += u[f] * u[f];
        for (auto [topic, v] : m.rows[r]) {
            const double* t = model.topic_row(topic);
            double pred = 0.0, tnorm = 0.0;
            for (int f = 0; f < model.latent_dim; ++f) {
                pred += u[f] * t[f];
                tnorm += t[f] * t[f];
            }
            const double e = v - pred;
            eps += e * e + model.lambda * (unorm + tnorm);
        }
    }
    return eps;
}

inline double predict(const FactorModel& model, Id user, int topic) {
    const int row = model.row_of(user);
    if (row < 0) return 0.0;  // user absent from the training matrix
    return model.predict(row, topic);
}

struct CrossValidationResult {
    TrainConfig best;
    std::vector<double> rmse;  // parallel to the config grid
};

// k-fold CV over the known entries; best config by mean held-out RMSE,
// ties by smaller latent_dim then smaller lambda.
inline CrossValidationResult cross_validate(const ActivityMatrix& m,
                                            const std::vector<TrainConfig>& grid, int k,
                                            std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("cross_validate: empty config grid");
    if (k < 2) throw ConfigError("cross_validate: k must be >= 2");
    auto entries = matrix_entries(m);
    if (entries.size() < static_cast<std::size_t>(k))
        throw ConfigError("cross_validate: fewer entries than folds");

    Rng rng(seed);
    std::shuffle(entries.begin(), entries.end(), rng);

    CrossValidationResult res;
    res.rmse.assign(grid.size(), 0.0);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        double total = 0.0;
        for (int fold = 0; fold < k; ++fold) {
            std::vector<SparseEntry> train, held;
            for (std::size_t i = 0; i < entries.size(); ++i)
                (static_cast<int>(i % k) == fold ? held : train).push_back(entries[i]);
            const FactorModel fm = detail::sgd_train(train, static_cast<int>(m.num_users()),
                                                     m.num_topics, m.user_ids, grid[gi]);
            double sq = 0.0;
            for (const auto& ent : held) {
                const double e = ent.value - fm.predict(ent.row, ent.col);
                sq += e * e;
            }
            total += std::sqrt(sq / static_cast<double>(held.size()));
        }
        res.rmse[gi] = total / k;
    }
    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        const auto key = [&](std::size_t i) {
            return std::make_tuple(res.rmse[i], grid[i].latent_dim, grid[i].lambda);
        };
        if (key(gi) < key(best)) best = gi;
    }
    res.best = grid[best];
    return res;
}

// ---------------------------------------------------------------------------
// Model serialization (versioned binary, exact round-trip)

namespace detail {
constexpr char kModelMagic[4] = {'T', 'C', 'F', 'M'};
constexpr std::uint32_t kModelVersion = 1;

inline void put_f64(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    os.write(reinterpret_cast<const char*>(&v), 8);
}

inline double get_f64(std::istream& is) {
    double v = 0.0;
    is.read(reinterpret_cast<char*>(&v), 8);
    if (!is) throw IoError("model: truncated file");
    return v;
}
}  // namespace detail

inline void save_model(const FactorModel& m, std::ostream& os) {
    using namespace detail;
    os.write(kModelMagic, 4);
    auto put32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    put32(kModelVersion);
    put32(static_cast<std::uint32_t>(m.num_users));
    put32(static_cast<std::uint32_t>(m.num_topics));
    put32(static_cast<std::uint32_t>(m.latent_dim));
    put32(static_cast<std::uint32_t>(m.epochs));
    put_f64(os, m.lambda);
    put_f64(os, m.learning_rate);
    put_f64(os, m.final_train_rmse);
    os.write(reinterpret_cast<const char*>(&m.seed), 8);
    for (Id u : m.user_ids) os.write(reinterpret_cast<const char*>(&u), 8);
    for (double v : m.user_factors) put_f64(os, v);
    for (double v : m.topic_factors) put_f64(os, v);
    if (!os) throw IoError("model: write failed");
}

inline FactorModel load_model(std::istream& is) {
    using namespace detail;
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kModelMagic, 4) != 0) throw IoError("model: bad magic");
    auto get32 = [&]() {
        std::uint32_t v = 0;
        is.read(reinterpret_cast<char*>(&v), 4);
        if (!is) throw IoError("model: truncated file");
        return v;
    };
    if (get32() != kModelVersion) throw IoError("model: unsupported version");
    FactorModel m;
    m.num_users = static_cast<int>(get32());
    m.num_topics = static_cast<int>(get32());
    m.latent_dim = static_cast<int>(get32());
    m.epochs = static_cast<int>(get32());
    m.lambda = get_f64(is);
    m.learning_rate = get_f64(is);
    m.final_train_rmse = get_f64(is);
    is.read(reinterpret_cast<char*>(&m.seed), 8);
    m.user_ids.resize(m.num_users);
    for (auto& u : m.user_ids) is.read(reinterpret_cast<char*>(&u), 8);
    m.user_factors.resize(static_cast<std::size_t>(m.num_users) * m.latent_dim);
    m.topic_factors.resize(static_cast<std::size_t>(m.num_topics) * m.latent_dim);
    for (auto& v : m.user_factors) v = get_f64(is);
    for (auto& v : m.topic_factors) v = get_f64(is);
    if (!is) throw IoError("model: truncated file");
    return m;
}

inline void save_model(const FactorModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("model: cannot open for write: " + path);
    save_model(m, os);
}

inline FactorModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("model: cannot open for read: " + path);
    return load_model(is);
}

}  // namespace tcte
