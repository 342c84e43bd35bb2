#include "seaer/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "seaer/errors.hpp"

namespace seaer {

double fap(const PerformanceMatrix& r) {
    if (r.rows.empty()) throw std::invalid_argument("empty performance matrix");
    const auto& last = r.rows.back();
    double sum = 0.0;
    for (double x : last) sum += x;
    return sum / static_cast<double>(last.size());
}

double faf(const PerformanceMatrix& r) {
    if (r.rows.empty()) throw std::invalid_argument("empty performance matrix");
    const int m = r.num_stages();
    if (m == 1) return 0.0;
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += r.at(m - 1, j) - r.at(j, j);
    return sum / static_cast<double>(m);
}

std::vector<std::vector<double>> forgetting_matrix(const PerformanceMatrix& r) {
    std::vector<std::vector<double>> out;
    for (int i = 0; i < r.num_stages(); ++i) {
        std::vector<double> row(i + 1);
        for (int j = 0; j <= i; ++j) row[j] = r.at(i, j) - r.at(j, j);
        out.push_back(std::move(row));
    }
    return out;
}

DistortionProfile distortion_profile(const Matrix& embeddings, const Graph& g,
                                     const std::vector<vertex_t>& anchors, int max_hops) {
    if (anchors.empty()) throw std::invalid_argument("anchor set must be nonempty");
    if (embeddings.rows != g.num_vertices())
        throw std::invalid_argument("embedding rows do not match graph size");
    if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");

    const DistanceField field = multi_source_bfs(g, anchors);
    std::vector<int> anchor_locals;
    anchor_locals.reserve(anchors.size());
    for (vertex_t a : anchors) anchor_locals.push_back(g.local_index(a));

    const int dim = embeddings.cols;
    std::vector<double> sums(max_hops + 1, 0.0);
    std::vector<int> counts(max_hops + 1, 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
        const hop_t d = field.dist[v];
        if (d == kUnreachable || d == 0 || d > static_cast<hop_t>(max_hops)) continue;
        double best = 0.0;
        bool first = true;
        for (int a : anchor_locals) {
            double sq = 0.0;
            const double* ev = embeddings.row(v);
            const double* ea = embeddings.row(a);
            for (int j = 0; j < dim; ++j) sq += (ev[j] - ea[j]) * (ev[j] - ea[j]);
            const double dist = std::sqrt(sq);
            if (first || dist < best) {
                best = dist;
                first = false;
            }
        }
        sums[d] += best;
        counts[d] += 1;
    }

    DistortionProfile profile;
    for (int h = 1; h <= max_hops; ++h) {
        if (counts[h] == 0) continue;
        profile.buckets.push_back({h, counts[h], sums[h] / counts[h]});
    }
    if (profile.buckets.empty()) throw ComputeError("no vertex falls in any hop bucket");

    double num = 0.0, den = 0.0;
    double min_ratio = 0.0, max_ratio = 0.0;
    bool first = true;
    for (const auto& b : profile.buckets) {
        num += static_cast<double>(b.hop) * b.mean_distance;
        den += static_cast<double>(b.hop) * static_cast<double>(b.hop);
        const double ratio = b.mean_distance / static_cast<double>(b.hop);
        if (first) {
            min_ratio = max_ratio = ratio;
            first = false;
        } else {
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
        }
    }
    profile.slope = num / den;
    if (min_ratio <= 0.0) {
        profile.degenerate = true;
        profile.alpha_hat = 0.0;
    } else {
        profile.alpha_hat = max_ratio / min_ratio;
    }
    return profile;
}

}  // namespace seaer
