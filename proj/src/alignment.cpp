#include "seaer/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seaer/errors.hpp"
#include "seaer/kernels.hpp"

namespace seaer {

namespace {

constexpr double kUpperMargin = 1e-9;  // half-open upper bound

void check_spec(const KernelSpec& spec) {
    if (spec.scales.empty()) throw std::invalid_argument("kernel needs at least one scale");
    for (double s : spec.scales)
        if (!(s > 0.0)) throw std::invalid_argument("kernel scales must be positive");
}

void check_bounds(const BetaBounds& b) {
    if (!(b.lower >= 0.0) || !(b.lower < b.upper))
        throw std::invalid_argument("beta bounds must satisfy 0 <= lower < upper");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    check_spec(spec);
    if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
    const double dist = std::sqrt(sq);
    double k = 0.0;
    for (double s : spec.scales) k += std::exp(-s * dist);
    return k;
}

KmmProblem build_problem(const Matrix& h_new, const Matrix& h_old, const KernelSpec& spec) {
    check_spec(spec);
    if (h_new.rows != h_old.rows || h_new.cols != h_old.cols)
        throw std::invalid_argument("embedding tables differ in shape");
    KmmProblem prob;
    kernels::mixture_gram(h_new, spec.scales, prob.k);
    kernels::mixture_cross_rowsum(h_new, h_old, spec.scales, prob.kappa);
    std::vector<double> old_rowsums;
    kernels::mixture_cross_rowsum(h_old, h_old, spec.scales, old_rowsums);
    prob.constant = 0.0;
    for (double s : old_rowsums) prob.constant += s;
    return prob;
}

double objective_value(const KmmProblem& prob, std::span<const double> beta) {
    const int n = prob.k.rows;
    double quad = 0.0;
    for (int i = 0; i < n; ++i) {
        double ki = 0.0;
        for (int j = 0; j < n; ++j) ki += prob.k(i, j) * beta[j];
        quad += beta[i] * ki;
    }
    double lin = 0.0;
    for (int i = 0; i < n; ++i) lin += prob.kappa[i] * beta[i];
    return quad - 2.0 * lin;
}

QpResult solve_box_qp(const KmmProblem& prob, const BetaBounds& bounds, double tol, int max_iter) {
    check_bounds(bounds);
    const int n = prob.k.rows;
    QpResult res;
    if (n == 0) return res;
    if (static_cast<int>(prob.kappa.size()) != n)
        throw std::invalid_argument("kappa size does not match gram matrix");
    for (double x : prob.k.data)
        if (!std::isfinite(x)) throw ComputeError("gram matrix has non-finite entries");
    for (double x : prob.kappa)
        if (!std::isfinite(x)) throw ComputeError("kappa has non-finite entries");

    // symmetrize, then bound 2*lambda_max by power iteration
    Matrix k = prob.k;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (k(i, j) + k(j, i));
            k(i, j) = s;
            k(j, i) = s;
        }
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    std::vector<double> kv(n, 0.0);
    for (int it = 0; it < 100; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += k(i, j) * v[j];
            kv[i] = acc;
        }
        double norm = 0.0;
        for (double x : kv) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        lambda = norm;
        for (int i = 0; i < n; ++i) v[i] = kv[i] / norm;
    }
    const double lipschitz = std::max(2.0 * lambda * 1.01, 1e-12);
    double step = 1.0 / lipschitz;

    const double hi = bounds.upper - kUpperMargin;
    const auto project = [&](double x) { return std::clamp(x, bounds.lower, hi); };

    std::vector<double>& beta = res.beta;
    beta.assign(n, project(1.0));
    std::vector<double> grad(n, 0.0), trial(n, 0.0);
    double obj = objective_value(prob, beta);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += k(i, j) * beta[j];
            grad[i] = 2.0 * (acc - prob.kappa[i]);
        }
        double residual = 0.0;
        for (int i = 0; i < n; ++i) {
            const double moved = project(beta[i] - grad[i]);
            residual += (beta[i] - moved) * (beta[i] - moved);
        }
        res.residual = std::sqrt(residual);
        if (res.residual <= tol) break;
        for (int i = 0; i < n; ++i) trial[i] = project(beta[i] - step * grad[i]);
        const double trial_obj = objective_value(prob, trial);
        if (trial_obj <= obj) {
            beta.swap(trial);
            obj = trial_obj;
        } else {
            // power iteration only lower-bounds lambda_max; shrink the step
            // until the descent guarantee holds
            step *= 0.5;
            if (step < 1e-18) break;
        }
    }
    res.objective = obj;
    return res;
}

std::vector<double> kmm_weights(const ModelParams& model, const Graph& old_graph,
                                const Matrix& old_features, const Graph& new_graph,
                                const Matrix& new_features, const std::vector<vertex_t>& buffer,
                                const KernelSpec& spec, const BetaBounds& bounds) {
    check_spec(spec);
    check_bounds(bounds);
    if (buffer.empty()) return {};
    for (vertex_t v : buffer) {
        if (!old_graph.contains(v))
            throw std::invalid_argument("buffer vertex " + std::to_string(v) +
                                        " missing from the previous snapshot");
        if (!new_graph.contains(v))
            throw std::invalid_argument("buffer vertex " + std::to_string(v) +
                                        " missing from the current snapshot");
    }
    const Matrix emb_old = embeddings_for(model, old_graph, old_features);
    const Matrix emb_new = embeddings_for(model, new_graph, new_features);
    const int n = static_cast<int>(buffer.size());
    Matrix h_old(n, emb_old.cols), h_new(n, emb_new.cols);
    for (int i = 0; i < n; ++i) {
        const double* o = emb_old.row(old_graph.local_index(buffer[i]));
        std::copy(o, o + emb_old.cols, h_old.row(i));
        const double* nw = emb_new.row(new_graph.local_index(buffer[i]));
        std::copy(nw, nw + emb_new.cols, h_new.row(i));
    }
    const KmmProblem prob = build_problem(h_new, h_old, spec);
    return solve_box_qp(prob, bounds).beta;
}

}  // namespace seaer
