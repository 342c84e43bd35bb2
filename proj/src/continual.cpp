#include "seaer/continual.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "seaer/errors.hpp"
#include "seaer/rng.hpp"

namespace seaer {

Method method_from_string(const std::string& s) {
    if (s == "bare" || s == "BARE") return Method::kBare;
    if (s == "joint" || s == "JOINT") return Method::kJoint;
    if (s == "er" || s == "ER" || s == "replay") return Method::kReplay;
    throw ConfigError("unknown method \"" + s + "\" (expected bare, joint or er)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::kBare: return "bare";
        case Method::kJoint: return "joint";
        case Method::kReplay: return "er";
    }
    return "?";
}

std::vector<int> task_classes(const VertexBatch& batch) {
    std::vector<int> classes = batch.labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

TaskSplit split_task(const VertexBatch& batch, const SplitRatios& ratios, std::uint64_t seed) {
    const int n = static_cast<int>(batch.vertex_ids.size());
    if (n < 5) throw std::invalid_argument("batch too small to split (needs >= 5 vertices)");
    if (std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");
    if (ratios.train <= 0.0 || ratios.valid < 0.0 || ratios.test <= 0.0)
        throw std::invalid_argument("train and test ratios must be positive");

    std::map<int, std::vector<vertex_t>> by_class;
    for (int i = 0; i < n; ++i) by_class[batch.labels[i]].push_back(batch.vertex_ids[i]);

    TaskSplit split;
    for (auto& [cls, members] : by_class) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(cls)));
        for (std::size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[rng.uniform_index(i)]);

        const int nc = static_cast<int>(members.size());
        const double quotas[3] = {nc * ratios.train, nc * ratios.valid, nc * ratios.test};
        int sizes[3];
        double fracs[3];
        int assigned = 0;
        for (int k = 0; k < 3; ++k) {
            sizes[k] = static_cast<int>(std::floor(quotas[k]));
            fracs[k] = quotas[k] - sizes[k];
            assigned += sizes[k];
        }
        for (int r = 0; r < nc - assigned; ++r) {
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (fracs[k] > fracs[best]) best = k;
            sizes[best] += 1;
            fracs[best] = -1.0;
        }
        int at = 0;
        for (int k = 0; k < 3; ++k) {
            auto* dst = k == 0 ? &split.train : (k == 1 ? &split.valid : &split.test);
            for (int i = 0; i < sizes[k]; ++i) dst->push_back(members[at++]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.valid.begin(), split.valid.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

int resolve_budget(const ExperimentConfig& cfg, int train_size, int num_classes_present) {
    int b;
    if (cfg.budget_absolute >= 0) {
        b = cfg.budget_absolute;
    } else {
        if (cfg.budget_fraction <= 0.0 || cfg.budget_fraction > 1.0)
            throw ConfigError("budget fraction must lie in (0, 1]");
        b = static_cast<int>(std::floor(cfg.budget_fraction * train_size));
    }
    b = std::max(b, num_classes_present);
    return std::min(b, train_size);
}

namespace {

struct TaskMeta {
    std::vector<int> classes;                 // sorted global labels of the task
    std::map<int, int> local_label;           // global -> local
};

TaskMeta make_meta(const VertexBatch& batch) {
    TaskMeta meta;
    meta.classes = task_classes(batch);
    for (std::size_t i = 0; i < meta.classes.size(); ++i)
        meta.local_label[meta.classes[i]] = static_cast<int>(i);
    return meta;
}

// labels indexed by global vertex id (streams use dense ids)
std::vector<int> labels_by_id(const TaskStream& stream) {
    std::vector<int> labels(stream.total_vertices(), -1);
    for (const auto& batch : stream.batches)
        for (std::size_t i = 0; i < batch.vertex_ids.size(); ++i)
            labels[batch.vertex_ids[i]] = batch.labels[i];
    return labels;
}

double head_accuracy(const ModelParams& model, const Matrix& embeddings, const Graph& g,
                     const std::vector<vertex_t>& vertices, const std::vector<int>& labels,
                     const TaskMeta& meta, int head) {
    if (vertices.empty()) return 0.0;
    const Matrix logits = head_logits(model, embeddings, head);
    int correct = 0;
    for (vertex_t v : vertices) {
        const double* row = logits.row(g.local_index(v));
        int arg = 0;
        for (int c = 1; c < logits.cols; ++c)
            if (row[c] > row[arg]) arg = c;
        if (arg == meta.local_label.at(labels[v])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(vertices.size());
}

}  // namespace

std::vector<double> evaluate_row(const ModelParams& model, const TaskStream& stream,
                                 const std::vector<TaskSplit>& splits, int stage) {
    if (stage < 1 || stage > stream.num_tasks())
        throw std::invalid_argument("stage out of range");
    const Graph g = induce_graph(stream, stage);
    const Matrix features = stream.stacked_features(stage);
    const Matrix embeddings = embeddings_for(model, g, features);
    const std::vector<int> labels = labels_by_id(stream);
    std::vector<double> row(stage);
    for (int j = 0; j < stage; ++j) {
        const TaskMeta meta = make_meta(stream.batches[j]);
        row[j] = head_accuracy(model, embeddings, g, splits[j].test, labels, meta, j);
    }
    return row;
}

RunResult run_continual(const TaskStream& stream, const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const int m = stream.num_tasks();
    const std::vector<int> labels = labels_by_id(stream);

    RunResult result;
    result.splits.reserve(m);
    for (int i = 0; i < m; ++i)
        result.splits.push_back(
            split_task(stream.batches[i], cfg.ratios, split_seed(seed, 0x10 + i)));
    result.buffers.assign(m, {});
    result.betas.assign(m, {});

    std::vector<TaskMeta> metas;
    for (int i = 0; i < m; ++i) metas.push_back(make_meta(stream.batches[i]));

    ModelParams model = init_model(cfg.train.arch, cfg.train.last_act, stream.feature_dim,
                                   cfg.train.hidden_dim, split_seed(seed, 1));
    ModelParams prev_model;
    Graph prev_graph;
    Matrix prev_features;

    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.train.learning_rate;
    adam_cfg.weight_decay = cfg.train.weight_decay;

    for (int i = 0; i < m; ++i) {
        const Graph g = induce_graph(stream, i + 1);
        const Matrix features = stream.stacked_features(i + 1);
        const GraphOps ops = build_graph_ops(g, model.arch);

        add_head(model, std::max<int>(2, metas[i].classes.size()), split_seed(seed, 0x20 + i));

        // replay weights against the previous snapshot, fixed for this task
        std::vector<vertex_t> flat_buffer;
        std::vector<int> buffer_task;
        if (cfg.method == Method::kReplay) {
            for (int j = 0; j < i; ++j)
                for (vertex_t v : result.buffers[j]) {
                    flat_buffer.push_back(v);
                    buffer_task.push_back(j);
                }
        }
        std::vector<double> beta(flat_buffer.size(), 1.0);
        if (cfg.alignment && i > 0 && !flat_buffer.empty()) {
            beta = kmm_weights(prev_model, prev_graph, prev_features, g, features, flat_buffer,
                               cfg.kernel, cfg.bounds);
        }
        result.betas[i] = beta;

        // objective terms: current train split plus weighted buffer sets
        std::vector<LossTerm> terms;
        const auto& train_i = result.splits[i].train;
        for (vertex_t v : train_i)
            terms.push_back({g.local_index(v), i, metas[i].local_label.at(labels[v]),
                             1.0 / static_cast<double>(train_i.size())});
        std::vector<int> buffer_sizes(i, 0);
        for (int j = 0; j < i; ++j) buffer_sizes[j] = static_cast<int>(result.buffers[j].size());
        for (std::size_t k = 0; k < flat_buffer.size(); ++k) {
            const int j = buffer_task[k];
            terms.push_back({g.local_index(flat_buffer[k]), j,
                             metas[j].local_label.at(labels[flat_buffer[k]]),
                             beta[k] / static_cast<double>(buffer_sizes[j])});
        }

        AdamState opt;
        for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
            auto [loss, grads] = weighted_loss_and_grads(model, ops, features, terms);
            (void)loss;
            adam_step(opt, model, grads, adam_cfg);
        }

        // evaluation and buffer refresh share one forward pass
        const ForwardTrace trace = forward_backbone(model, ops, features);
        std::vector<double> row(i + 1);
        for (int j = 0; j <= i; ++j)
            row[j] = head_accuracy(model, trace.embeddings, g, result.splits[j].test, labels,
                                   metas[j], j);
        result.matrix.rows.push_back(std::move(row));

        if (cfg.method == Method::kReplay) {
            std::vector<int> cand_labels;
            cand_labels.reserve(train_i.size());
            for (vertex_t v : train_i) cand_labels.push_back(labels[v]);
            const int budget = resolve_budget(cfg, static_cast<int>(train_i.size()),
                                              static_cast<int>(metas[i].classes.size()));
            result.buffers[i] =
                select_buffer(cfg.strategy, g, train_i, cand_labels, budget,
                              split_seed(seed, 0x30 + i), cfg.stratify, &trace.embeddings);
        }

        prev_model = model;
        prev_graph = g;
        prev_features = features;
    }

    result.model = std::move(model);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

RunResult run_joint(const TaskStream& stream, const ExperimentConfig& cfg, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const int m = stream.num_tasks();
    const std::vector<int> labels = labels_by_id(stream);

    RunResult result;
    for (int i = 0; i < m; ++i)
        result.splits.push_back(
            split_task(stream.batches[i], cfg.ratios, split_seed(seed, 0x10 + i)));
    result.buffers.assign(m, {});
    result.betas.assign(m, {});

    std::vector<TaskMeta> metas;
    for (int i = 0; i < m; ++i) metas.push_back(make_meta(stream.batches[i]));

    ModelParams model = init_model(cfg.train.arch, cfg.train.last_act, stream.feature_dim,
                                   cfg.train.hidden_dim, split_seed(seed, 1));
    for (int i = 0; i < m; ++i)
        add_head(model, std::max<int>(2, metas[i].classes.size()), split_seed(seed, 0x20 + i));

    const Graph g = induce_graph(stream, m);
    const Matrix features = stream.stacked_features(m);
    const GraphOps ops = build_graph_ops(g, model.arch);

    std::size_t total_train = 0;
    for (const auto& s : result.splits) total_train += s.train.size();
    std::vector<LossTerm> terms;
    for (int i = 0; i < m; ++i)
        for (vertex_t v : result.splits[i].train)
            terms.push_back({g.local_index(v), i, metas[i].local_label.at(labels[v]),
                             1.0 / static_cast<double>(total_train)});

    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.train.learning_rate;
    adam_cfg.weight_decay = cfg.train.weight_decay;
    AdamState opt;
    for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        auto [loss, grads] = weighted_loss_and_grads(model, ops, features, terms);
        (void)loss;
        adam_step(opt, model, grads, adam_cfg);
    }

    const Matrix embeddings = forward_backbone(model, ops, features).embeddings;
    std::vector<double> row(m);
    for (int j = 0; j < m; ++j)
        row[j] = head_accuracy(model, embeddings, g, result.splits[j].test, labels, metas[j], j);
    result.matrix.rows.push_back(std::move(row));

    result.model = std::move(model);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace seaer
