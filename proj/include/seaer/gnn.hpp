#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seaer/graph.hpp"
#include "seaer/kernels.hpp"
#include "seaer/matrix.hpp"

namespace seaer {

enum class Arch { kGcn, kSage };
enum class LastActivation { kSigmoid, kRelu };

Arch arch_from_string(const std::string& s);
std::string to_string(Arch a);

// Two message-passing layers (p -> hidden -> hidden) plus one linear readout
// head per task (hidden -> classes). Layer 1 uses ReLU, layer 2 uses the
// configured last activation (sigmoid by default).
struct LayerParams {
    Matrix w_self;              // in x out
    Matrix w_neigh;             // in x out; empty for GCN
    std::vector<double> bias;   // out
};

struct HeadParams {
    Matrix w;                   // hidden x classes
    std::vector<double> bias;   // classes
};

struct ModelParams {
    Arch arch = Arch::kGcn;
    LastActivation last_act = LastActivation::kSigmoid;
    int in_dim = 0;
    int hidden_dim = 0;
    LayerParams layer1, layer2;
    std::vector<HeadParams> heads;
};

// backbone weights: Glorot normal, zero bias
ModelParams init_model(Arch arch, LastActivation last_act, int in_dim, int hidden_dim,
                       std::uint64_t seed);
// readout head weights: N(0, 0.01^2), zero bias
void add_head(ModelParams& params, int num_classes, std::uint64_t seed);

struct TrainConfig {
    double learning_rate = 1e-2;
    double weight_decay = 5e-4;
    int epochs = 100;
    std::uint64_t seed = 0;
    Arch arch = Arch::kGcn;
    LastActivation last_act = LastActivation::kSigmoid;
    int hidden_dim = 64;
};

// Sparse operators of one graph snapshot, built once per snapshot.
struct GraphOps {
    int n = 0;
    SparseOp norm_adj;      // GCN: D^-1/2 (A+I) D^-1/2 with D = deg+1
    SparseOp mean_neigh;    // SAGE: row v averages neighbors of v (zero row if isolated)
    SparseOp mean_neigh_t;  // transpose of mean_neigh, for the backward pass
};

SparseOp normalize_adjacency(const Graph& g);
GraphOps build_graph_ops(const Graph& g, Arch arch);

struct ForwardTrace {
    Matrix z1, h1, m0, m1, z2;
    Matrix embeddings;  // activation(z2), one row per vertex
};

ForwardTrace forward_backbone(const ModelParams& params, const GraphOps& ops, const Matrix& features);
Matrix head_logits(const ModelParams& params, const Matrix& embeddings, int task);

// embeddings + logits of one task head
std::pair<Matrix, Matrix> forward(const ModelParams& params, const Graph& g,
                                  const Matrix& features, int task);
Matrix embeddings_for(const ModelParams& params, const Graph& g, const Matrix& features);

// One summand of the training objective: weight * cross_entropy(head(v), label).
struct LossTerm {
    int vertex = 0;  // local index in the forward graph
    int head = 0;
    int label = 0;
    double weight = 1.0;
};

struct Grads {
    LayerParams layer1, layer2;
    std::vector<HeadParams> heads;       // zero for untouched heads
    std::vector<char> head_touched;
};

std::pair<double, Grads> weighted_loss_and_grads(const ModelParams& params, const GraphOps& ops,
                                                 const Matrix& features,
                                                 const std::vector<LossTerm>& terms);

struct AdamConfig {
    double lr = 1e-2;
    double weight_decay = 5e-4;  // decoupled
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamState; // opaque moment storage keyed by tensor name

// Updates the backbone plus every touched head; untouched heads keep their
// weights bit-for-bit (no decay is applied to them).
void adam_step(AdamState& state, ModelParams& params, const Grads& grads, const AdamConfig& cfg);

class AdamState {
public:
    struct Moments {
        std::vector<double> m, v;
    };
    std::int64_t step = 0;
    std::vector<std::pair<std::string, Moments>> slots;  // sorted by name
    Moments& slot(const std::string& name, std::size_t n);
};

// Binary checkpoint of all named tensors with shape headers; round-trips
// bit-exactly.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace seaer
