#pragma once

#include <span>
#include <vector>

#include "seaer/gnn.hpp"
#include "seaer/graph.hpp"
#include "seaer/matrix.hpp"

namespace seaer {

// Mixture-of-exponentials kernel K(x,y) = sum_i exp(-scale_i * ||x-y||_2).
// The unsquared norm keeps the kernel positive definite, so the weight
// problem below stays convex.
struct KernelSpec {
    std::vector<double> scales{1.0, 0.1, 0.01};
};

struct BetaBounds {
    double lower = 0.1;
    double upper = 10.0;  // half-open: beta < upper
};

// Quadratic form of || sum_v beta_v phi(h_v) - sum_v phi(h'_v) ||^2
//   = beta^T K beta - 2 kappa^T beta + constant
struct KmmProblem {
    Matrix k;                    // gram of the new embeddings
    std::vector<double> kappa;   // kappa_u = sum_v K(h_u, h'_v)
    double constant = 0.0;
};

struct QpResult {
    std::vector<double> beta;
    double objective = 0.0;      // beta^T K beta - 2 kappa^T beta (without the constant)
    int iterations = 0;
    double residual = 0.0;       // projected-gradient fixed-point residual
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

// h_new / h_old: one row per buffer vertex, same order
KmmProblem build_problem(const Matrix& h_new, const Matrix& h_old, const KernelSpec& spec);

double objective_value(const KmmProblem& prob, std::span<const double> beta);

// Projected gradient descent with step 1/L, L an upper bound on 2*lambda_max(K)
// from power iteration; projection onto [lower, upper - 1e-9].
QpResult solve_box_qp(const KmmProblem& prob, const BetaBounds& bounds, double tol = 1e-10,
                      int max_iter = 200000);

// Replay weights for the buffer vertices: embeds them with the given model
// under both snapshots and matches the kernel means. Buffer order defines the
// beta order. Computed once per task, before training.
std::vector<double> kmm_weights(const ModelParams& model, const Graph& old_graph,
                                const Matrix& old_features, const Graph& new_graph,
                                const Matrix& new_features, const std::vector<vertex_t>& buffer,
                                const KernelSpec& spec, const BetaBounds& bounds);

}  // namespace seaer
