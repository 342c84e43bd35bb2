#include "seaer/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "seaer/errors.hpp"
#include "seaer/rng.hpp"

namespace seaer {

using kernels::matmul;
using kernels::matmul_nt;
using kernels::matmul_tn;
using kernels::spmm;

Arch arch_from_string(const std::string& s) {
    if (s == "gcn" || s == "GCN") return Arch::kGcn;
    if (s == "sage" || s == "SAGE") return Arch::kSage;
    throw ConfigError("unknown arch \"" + s + "\" (expected gcn or sage)");
}

std::string to_string(Arch a) { return a == Arch::kGcn ? "gcn" : "sage"; }

namespace {

Matrix glorot(int in, int out, Rng& rng) {
    Matrix w(in, out);
    const double std = std::sqrt(2.0 / static_cast<double>(in + out));
    for (double& x : w.data) x = std * rng.normal();
    return w;
}

void check_finite(const Matrix& m, const char* what) {
    for (double x : m.data)
        if (!std::isfinite(x)) throw ComputeError(std::string("non-finite value in ") + what);
}

}  // namespace

ModelParams init_model(Arch arch, LastActivation last_act, int in_dim, int hidden_dim,
                       std::uint64_t seed) {
    if (in_dim <= 0 || hidden_dim <= 0) throw std::invalid_argument("bad model dimensions");
    Rng rng(split_seed(seed, 7));
    ModelParams p;
    p.arch = arch;
    p.last_act = last_act;
    p.in_dim = in_dim;
    p.hidden_dim = hidden_dim;
    p.layer1.w_self = glorot(in_dim, hidden_dim, rng);
    p.layer2.w_self = glorot(hidden_dim, hidden_dim, rng);
    if (arch == Arch::kSage) {
        p.layer1.w_neigh = glorot(in_dim, hidden_dim, rng);
        p.layer2.w_neigh = glorot(hidden_dim, hidden_dim, rng);
    }
    p.layer1.bias.assign(hidden_dim, 0.0);
    p.layer2.bias.assign(hidden_dim, 0.0);
    return p;
}

void add_head(ModelParams& params, int num_classes, std::uint64_t seed) {
    if (num_classes < 2) throw std::invalid_argument("head needs at least 2 classes");
    Rng rng(split_seed(seed, 11));
    HeadParams h;
    h.w = Matrix(params.hidden_dim, num_classes);
    for (double& x : h.w.data) x = 0.01 * rng.normal();
    h.bias.assign(num_classes, 0.0);
    params.heads.push_back(std::move(h));
}

SparseOp normalize_adjacency(const Graph& g) {
    const int n = g.num_vertices();
    SparseOp op;
    op.n = n;
    op.offsets.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) op.offsets[v + 1] = op.offsets[v] + g.degree_local(v) + 1;
    op.cols.resize(op.offsets[n]);
    op.vals.resize(op.offsets[n]);
    for (int v = 0; v < n; ++v) {
        const double dv = std::sqrt(static_cast<double>(g.degree_local(v) + 1));
        std::int64_t k = op.offsets[v];
        bool self_done = false;
        for (vertex_t u : g.neighbors(v)) {
            if (!self_done && u > v) {
                op.cols[k] = v;
                op.vals[k] = 1.0 / (dv * dv);
                ++k;
                self_done = true;
            }
            op.cols[k] = u;
            op.vals[k] = 1.0 / (dv * std::sqrt(static_cast<double>(g.degree_local(u) + 1)));
            ++k;
        }
        if (!self_done) {
            op.cols[k] = v;
            op.vals[k] = 1.0 / (dv * dv);
            ++k;
        }
    }
    return op;
}

namespace {

SparseOp mean_neighbor_op(const Graph& g) {
    const int n = g.num_vertices();
    SparseOp op;
    op.n = n;
    op.offsets.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) op.offsets[v + 1] = op.offsets[v] + g.degree_local(v);
    op.cols.resize(op.offsets[n]);
    op.vals.resize(op.offsets[n]);
    for (int v = 0; v < n; ++v) {
        const double inv = g.degree_local(v) > 0 ? 1.0 / g.degree_local(v) : 0.0;
        std::int64_t k = op.offsets[v];
        for (vertex_t u : g.neighbors(v)) {
            op.cols[k] = u;
            op.vals[k] = inv;
            ++k;
        }
    }
    return op;
}

// y[v] = sum_{u in N(v)} x[u] / deg(u): same sparsity, neighbor-side weights
SparseOp transpose_mean_neighbor_op(const Graph& g) {
    SparseOp op = mean_neighbor_op(g);
    for (int v = 0; v < op.n; ++v)
        for (std::int64_t k = op.offsets[v]; k < op.offsets[v + 1]; ++k)
            op.vals[k] = 1.0 / g.degree_local(op.cols[k]);
    return op;
}

void add_bias(Matrix& m, const std::vector<double>& bias) {
    for (int i = 0; i < m.rows; ++i) {
        double* row = m.row(i);
        for (int j = 0; j < m.cols; ++j) row[j] += bias[j];
    }
}

Matrix relu(const Matrix& z) {
    Matrix h = z;
    for (double& x : h.data) x = x > 0.0 ? x : 0.0;
    return h;
}

Matrix sigmoid(const Matrix& z) {
    Matrix h = z;
    for (double& x : h.data) x = 1.0 / (1.0 + std::exp(-x));
    return h;
}

std::vector<double> colsum(const Matrix& m) {
    std::vector<double> s(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        for (int j = 0; j < m.cols; ++j) s[j] += row[j];
    }
    return s;
}

// z = x*w_self + aggregated*w_neigh + bias (GCN: z = op*(x*w_self) + bias)
Matrix layer_forward(const LayerParams& layer, const GraphOps& ops, Arch arch, const Matrix& x,
                     Matrix* aggregated_out) {
    Matrix z;
    if (arch == Arch::kGcn) {
        Matrix xw;
        matmul(x, layer.w_self, xw);
        spmm(ops.norm_adj, xw, z);
    } else {
        Matrix agg;
        spmm(ops.mean_neigh, x, agg);
        Matrix z_self, z_neigh;
        matmul(x, layer.w_self, z_self);
        matmul(agg, layer.w_neigh, z_neigh);
        z = std::move(z_self);
        for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] += z_neigh.data[i];
        if (aggregated_out) *aggregated_out = std::move(agg);
    }
    add_bias(z, layer.bias);
    return z;
}

// dX and parameter grads of one layer given dZ
void layer_backward(const LayerParams& layer, const GraphOps& ops, Arch arch, const Matrix& x,
                    const Matrix& aggregated, const Matrix& dz, LayerParams& grad, Matrix* dx) {
    grad.bias = colsum(dz);
    if (arch == Arch::kGcn) {
        Matrix dxw;
        spmm(ops.norm_adj, dz, dxw);  // symmetric operator
        matmul_tn(x, dxw, grad.w_self);
        if (dx) matmul_nt(dxw, layer.w_self, *dx);
    } else {
        matmul_tn(x, dz, grad.w_self);
        matmul_tn(aggregated, dz, grad.w_neigh);
        if (dx) {
            Matrix d_self, d_agg, d_agg_x;
            matmul_nt(dz, layer.w_self, d_self);
            matmul_nt(dz, layer.w_neigh, d_agg);
            spmm(ops.mean_neigh_t, d_agg, d_agg_x);
            *dx = std::move(d_self);
            for (std::size_t i = 0; i < dx->data.size(); ++i) dx->data[i] += d_agg_x.data[i];
        }
    }
}

}  // namespace

GraphOps build_graph_ops(const Graph& g, Arch arch) {
    GraphOps ops;
    ops.n = g.num_vertices();
    if (arch == Arch::kGcn) {
        ops.norm_adj = normalize_adjacency(g);
    } else {
        ops.mean_neigh = mean_neighbor_op(g);
        ops.mean_neigh_t = transpose_mean_neighbor_op(g);
    }
    return ops;
}

ForwardTrace forward_backbone(const ModelParams& params, const GraphOps& ops,
                              const Matrix& features) {
    if (features.cols != params.in_dim)
        throw std::invalid_argument("feature dim " + std::to_string(features.cols) +
                                    " does not match model input " + std::to_string(params.in_dim));
    if (features.rows != ops.n) throw std::invalid_argument("feature rows do not match graph size");
    check_finite(features, "features");
    ForwardTrace t;
    t.z1 = layer_forward(params.layer1, ops, params.arch, features, &t.m0);
    t.h1 = relu(t.z1);
    t.z2 = layer_forward(params.layer2, ops, params.arch, t.h1, &t.m1);
    t.embeddings = params.last_act == LastActivation::kSigmoid ? sigmoid(t.z2) : relu(t.z2);
    return t;
}

Matrix head_logits(const ModelParams& params, const Matrix& embeddings, int task) {
    if (task < 0 || task >= static_cast<int>(params.heads.size()))
        throw std::invalid_argument("no head for task " + std::to_string(task));
    Matrix logits;
    matmul(embeddings, params.heads[task].w, logits);
    add_bias(logits, params.heads[task].bias);
    return logits;
}

std::pair<Matrix, Matrix> forward(const ModelParams& params, const Graph& g,
                                  const Matrix& features, int task) {
    const GraphOps ops = build_graph_ops(g, params.arch);
    ForwardTrace t = forward_backbone(params, ops, features);
    Matrix logits = head_logits(params, t.embeddings, task);
    return {std::move(t.embeddings), std::move(logits)};
}

Matrix embeddings_for(const ModelParams& params, const Graph& g, const Matrix& features) {
    const GraphOps ops = build_graph_ops(g, params.arch);
    return forward_backbone(params, ops, features).embeddings;
}

std::pair<double, Grads> weighted_loss_and_grads(const ModelParams& params, const GraphOps& ops,
                                                 const Matrix& features,
                                                 const std::vector<LossTerm>& terms) {
    const int num_heads = static_cast<int>(params.heads.size());
    for (const auto& t : terms) {
        if (t.head < 0 || t.head >= num_heads)
            throw std::invalid_argument("loss term references missing head " + std::to_string(t.head));
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
            throw ComputeError("loss weights must be finite and non-negative");
    }

    ForwardTrace trace = forward_backbone(params, ops, features);
    const Matrix& emb = trace.embeddings;

    Grads grads;
    grads.heads.resize(num_heads);
    grads.head_touched.assign(num_heads, 0);

    // group terms per head; dLogits rows stay sparse over term vertices
    double loss = 0.0;
    Matrix d_emb(emb.rows, emb.cols);
    for (int h = 0; h < num_heads; ++h) {
        bool used = false;
        for (const auto& t : terms) used = used || t.head == h;
        if (!used) continue;
        grads.head_touched[h] = 1;
        Matrix logits = head_logits(params, emb, h);
        const int classes = logits.cols;
        Matrix d_logits(logits.rows, classes);
        for (const auto& t : terms) {
            if (t.head != h) continue;
            if (t.label < 0 || t.label >= classes)
                throw std::invalid_argument("label outside head range");
            const double* row = logits.row(t.vertex);
            double mx = row[0];
            for (int c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
            double sum = 0.0;
            for (int c = 0; c < classes; ++c) sum += std::exp(row[c] - mx);
            const double lse = mx + std::log(sum);
            loss += t.weight * (lse - row[t.label]);
            double* drow = d_logits.row(t.vertex);
            for (int c = 0; c < classes; ++c)
                drow[c] += t.weight * (std::exp(row[c] - lse) - (c == t.label ? 1.0 : 0.0));
        }
        matmul_tn(emb, d_logits, grads.heads[h].w);
        grads.heads[h].bias = colsum(d_logits);
        Matrix d_emb_h;
        matmul_nt(d_logits, params.heads[h].w, d_emb_h);
        for (std::size_t i = 0; i < d_emb.data.size(); ++i) d_emb.data[i] += d_emb_h.data[i];
    }
    if (!std::isfinite(loss)) throw ComputeError("loss is not finite");

    // activation backward
    Matrix dz2 = d_emb;
    if (params.last_act == LastActivation::kSigmoid) {
        for (std::size_t i = 0; i < dz2.data.size(); ++i) {
            const double s = emb.data[i];
            dz2.data[i] *= s * (1.0 - s);
        }
    } else {
        for (std::size_t i = 0; i < dz2.data.size(); ++i)
            if (trace.z2.data[i] <= 0.0) dz2.data[i] = 0.0;
    }

    Matrix dh1;
    layer_backward(params.layer2, ops, params.arch, trace.h1, trace.m1, dz2, grads.layer2, &dh1);
    for (std::size_t i = 0; i < dh1.data.size(); ++i)
        if (trace.z1.data[i] <= 0.0) dh1.data[i] = 0.0;
    layer_backward(params.layer1, ops, params.arch, features, trace.m0, dh1, grads.layer1, nullptr);

    return {loss, std::move(grads)};
}

AdamState::Moments& AdamState::slot(const std::string& name, std::size_t n) {
    auto it = std::lower_bound(slots.begin(), slots.end(), name,
                               [](const auto& a, const std::string& b) { return a.first < b; });
    if (it == slots.end() || it->first != name) {
        it = slots.insert(it, {name, Moments{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}});
    }
    return it->second;
}

namespace {

void adam_update(AdamState& state, const std::string& name, std::vector<double>& param,
                 const std::vector<double>& grad, const AdamConfig& cfg, double bc1, double bc2) {
    auto& mom = state.slot(name, param.size());
    for (std::size_t i = 0; i < param.size(); ++i) {
        mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * grad[i];
        mom.v[i] = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        param[i] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * param[i]);
    }
}

}  // namespace

void adam_step(AdamState& state, ModelParams& params, const Grads& grads, const AdamConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    adam_update(state, "layer1.w", params.layer1.w_self.data, grads.layer1.w_self.data, cfg, bc1, bc2);
    adam_update(state, "layer1.b", params.layer1.bias, grads.layer1.bias, cfg, bc1, bc2);
    adam_update(state, "layer2.w", params.layer2.w_self.data, grads.layer2.w_self.data, cfg, bc1, bc2);
    adam_update(state, "layer2.b", params.layer2.bias, grads.layer2.bias, cfg, bc1, bc2);
    if (params.arch == Arch::kSage) {
        adam_update(state, "layer1.wn", params.layer1.w_neigh.data, grads.layer1.w_neigh.data, cfg,
                    bc1, bc2);
        adam_update(state, "layer2.wn", params.layer2.w_neigh.data, grads.layer2.w_neigh.data, cfg,
                    bc1, bc2);
    }
    for (std::size_t h = 0; h < params.heads.size(); ++h) {
        if (h >= grads.heads.size() || !grads.head_touched[h]) continue;
        const std::string base = "head" + std::to_string(h);
        adam_update(state, base + ".w", params.heads[h].w.data, grads.heads[h].w.data, cfg, bc1, bc2);
        adam_update(state, base + ".b", params.heads[h].bias, grads.heads[h].bias, cfg, bc1, bc2);
    }
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_i32(std::ostream& out, std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::int32_t read_i32(std::istream& in) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

void write_tensor(std::ostream& out, const std::string& name, int rows, int cols,
                  const std::vector<double>& data) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_i32(out, rows);
    write_i32(out, cols);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}

struct NamedTensor {
    std::string name;
    int rows = 0, cols = 0;
    std::vector<double> data;
};

NamedTensor read_tensor(std::istream& in) {
    NamedTensor t;
    const std::uint32_t len = read_u32(in);
    t.name.resize(len);
    in.read(t.name.data(), len);
    t.rows = read_i32(in);
    t.cols = read_i32(in);
    t.data.resize(static_cast<std::size_t>(t.rows) * static_cast<std::size_t>(t.cols));
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!in) throw IoError("truncated checkpoint tensor " + t.name);
    return t;
}

constexpr char kMagic[8] = {'S', 'E', 'A', 'E', 'R', 'C', 'K', '1'};

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    out.write(kMagic, 8);
    write_u32(out, params.arch == Arch::kGcn ? 0 : 1);
    write_u32(out, params.last_act == LastActivation::kSigmoid ? 0 : 1);
    write_i32(out, params.in_dim);
    write_i32(out, params.hidden_dim);
    write_u32(out, static_cast<std::uint32_t>(params.heads.size()));
    const auto emit_layer = [&](const std::string& base, const LayerParams& l) {
        write_tensor(out, base + ".w", l.w_self.rows, l.w_self.cols, l.w_self.data);
        write_tensor(out, base + ".wn", l.w_neigh.rows, l.w_neigh.cols, l.w_neigh.data);
        write_tensor(out, base + ".b", 1, static_cast<int>(l.bias.size()), l.bias);
    };
    emit_layer("layer1", params.layer1);
    emit_layer("layer2", params.layer2);
    for (std::size_t h = 0; h < params.heads.size(); ++h) {
        const std::string base = "head" + std::to_string(h);
        write_tensor(out, base + ".w", params.heads[h].w.rows, params.heads[h].w.cols,
                     params.heads[h].w.data);
        write_tensor(out, base + ".b", 1, static_cast<int>(params.heads[h].bias.size()),
                     params.heads[h].bias);
    }
    if (!out) throw IoError("write failed for checkpoint " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw ConfigError(path + " is not a checkpoint file");
    ModelParams p;
    p.arch = read_u32(in) == 0 ? Arch::kGcn : Arch::kSage;
    p.last_act = read_u32(in) == 0 ? LastActivation::kSigmoid : LastActivation::kRelu;
    p.in_dim = read_i32(in);
    p.hidden_dim = read_i32(in);
    const std::uint32_t num_heads = read_u32(in);
    const auto take_matrix = [&](NamedTensor t) {
        Matrix m(t.rows, t.cols);
        m.data = std::move(t.data);
        return m;
    };
    const auto read_layer = [&](LayerParams& l) {
        l.w_self = take_matrix(read_tensor(in));
        l.w_neigh = take_matrix(read_tensor(in));
        NamedTensor b = read_tensor(in);
        l.bias = std::move(b.data);
    };
    read_layer(p.layer1);
    read_layer(p.layer2);
    for (std::uint32_t h = 0; h < num_heads; ++h) {
        HeadParams head;
        head.w = take_matrix(read_tensor(in));
        NamedTensor b = read_tensor(in);
        head.bias = std::move(b.data);
        p.heads.push_back(std::move(head));
    }
    return p;
}

}  // namespace seaer
