#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seaer/alignment.hpp"
#include "seaer/gnn.hpp"
#include "seaer/graph.hpp"
#include "seaer/metrics.hpp"
#include "seaer/selection.hpp"

namespace seaer {

enum class Method { kBare, kJoint, kReplay };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

struct SplitRatios {
    double train = 0.6;
    double valid = 0.2;
    double test = 0.2;
};

struct ExperimentConfig {
    Method method = Method::kReplay;
    Strategy strategy = Strategy::kKCenterGreedy;
    bool alignment = false;   // replay weights via kernel mean matching
    bool stratify = true;     // per-class budgets during selection
    double budget_fraction = 0.05;  // of the task's train split
    int budget_absolute = -1;       // >= 0 overrides the fraction
    SplitRatios ratios;
    TrainConfig train;
    KernelSpec kernel;
    BetaBounds bounds;
};

struct TaskSplit {
    std::vector<vertex_t> train, valid, test;
};

// Per-class stratified split with largest-remainder rounding; exhaustive and
// pairwise disjoint. Batches below 5 vertices are rejected.
TaskSplit split_task(const VertexBatch& batch, const SplitRatios& ratios, std::uint64_t seed);

struct RunResult {
    PerformanceMatrix matrix;
    std::vector<std::vector<vertex_t>> buffers;  // selected replay set per task
    std::vector<std::vector<double>> betas;      // replay weights used at each stage
    std::vector<TaskSplit> splits;
    ModelParams model;                           // final parameters
    double seconds = 0.0;
};

// Sequential training over the stream: per task, induce the accumulated
// graph, compute replay weights against the previous snapshot (when
// alignment is on), train on the current split plus buffer, refresh the
// buffer, and evaluate every seen task on the current graph.
RunResult run_continual(const TaskStream& stream, const ExperimentConfig& cfg, std::uint64_t seed);

// One model trained on the union of all train splits over the full graph;
// the result matrix holds a single row with one accuracy per task.
RunResult run_joint(const TaskStream& stream, const ExperimentConfig& cfg, std::uint64_t seed);

// Accuracies of heads 1..stage on their test splits, evaluated in the graph
// accumulated through `stage` (1-based).
std::vector<double> evaluate_row(const ModelParams& model, const TaskStream& stream,
                                 const std::vector<TaskSplit>& splits, int stage);

// budget for one task: fraction/absolute resolution, floored, clamped to
// [classes present, train size]
int resolve_budget(const ExperimentConfig& cfg, int train_size, int num_classes_present);

// sorted distinct labels of a batch (local label space of its head)
std::vector<int> task_classes(const VertexBatch& batch);

}  // namespace seaer
