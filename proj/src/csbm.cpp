#include "seaer/csbm.hpp"

#include <cmath>

#include "seaer/errors.hpp"
#include "seaer/rng.hpp"

namespace seaer {

void validate_config(const CsbmConfig& cfg) {
    if (cfg.n_per_stage <= 0 || cfg.n_per_stage % 2 != 0)
        throw ConfigError("n_per_stage must be positive and even");
    if (cfg.p_dim <= 0) throw ConfigError("p_dim must be positive");
    if (cfg.num_stages < 1) throw ConfigError("num_stages must be >= 1");
    if (cfg.delta < 0 || cfg.delta > cfg.n_per_stage / 2)
        throw ConfigError("delta must lie in [0, n_per_stage/2]");
    for (double p : {cfg.p_intra, cfg.p_inter, cfg.p_stage})
        if (p < 0.0 || p > 1.0) throw ConfigError("edge probabilities must lie in [0, 1]");
    if (cfg.mu < 0.0) throw ConfigError("mu must be non-negative");
}

std::pair<int, int> stage_counts(const CsbmConfig& cfg, int stage) {
    const int half = cfg.n_per_stage / 2;
    const int sign = (stage % 2 == 1) ? 1 : -1;  // odd stages lean to community 0
    return {half + sign * cfg.delta, half - sign * cfg.delta};
}

std::array<int, 4> community_counts(const CsbmConfig& cfg) {
    validate_config(cfg);
    const auto [a0, a1] = stage_counts(cfg, 1);
    const auto [b0, b1] = stage_counts(cfg, 2);
    return {a0, a1, b0, b1};
}

TaskStream generate_stream(const CsbmConfig& cfg) {
    validate_config(cfg);
    const int n = cfg.n_per_stage;
    const int p = cfg.p_dim;

    TaskStream stream;
    stream.feature_dim = p;
    stream.num_classes = 2;

    // shared spike direction
    Rng u_rng(split_seed(cfg.seed, 0));
    std::vector<double> u(p);
    for (int j = 0; j < p; ++j) u[j] = u_rng.normal();

    const double spike = std::sqrt(cfg.mu / static_cast<double>(n));

    for (int s = 1; s <= cfg.num_stages; ++s) {
        const auto [n0, n1] = stage_counts(cfg, s);
        VertexBatch batch;
        const vertex_t base = static_cast<vertex_t>(stream.total_vertices());
        batch.vertex_ids.resize(n);
        batch.labels.resize(n);
        for (int i = 0; i < n; ++i) {
            batch.vertex_ids[i] = base + i;
            batch.labels[i] = i < n0 ? 0 : 1;
        }
        (void)n1;

        Rng feat_rng(split_seed(cfg.seed, 0x100 + s));
        batch.features = Matrix(n, p);
        for (int i = 0; i < n; ++i) {
            const double y = cfg.symmetric_labels ? (batch.labels[i] == 0 ? -1.0 : 1.0)
                                                  : static_cast<double>(batch.labels[i]);
            double* row = batch.features.row(i);
            for (int j = 0; j < p; ++j)
                row[j] = spike * y * u[j] + feat_rng.normal() / static_cast<double>(p);
        }

        Rng edge_rng(split_seed(cfg.seed, 0x200 + s));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double prob =
                    (batch.labels[i] == batch.labels[j]) ? cfg.p_intra : cfg.p_inter;
                if (edge_rng.bernoulli(prob))
                    stream.edges.push_back({base + i, base + j, s});
            }
        }
        stream.batches.push_back(std::move(batch));
    }

    // cross-stage edges, drawn in (earlier stage, later stage) order
    for (int s = 1; s <= cfg.num_stages; ++s) {
        Rng cross_rng(split_seed(cfg.seed, 0x300 + s));
        const vertex_t base_s = static_cast<vertex_t>(static_cast<std::int64_t>(s - 1) * n);
        const int last = cfg.consecutive_only ? std::min(s + 1, cfg.num_stages) : cfg.num_stages;
        for (int t = s + 1; t <= last; ++t) {
            const vertex_t base_t = static_cast<vertex_t>(static_cast<std::int64_t>(t - 1) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (cross_rng.bernoulli(cfg.p_stage))
                        stream.edges.push_back({base_s + i, base_t + j, t});
        }
    }

    validate_stream(stream);
    return stream;
}

}  // namespace seaer
