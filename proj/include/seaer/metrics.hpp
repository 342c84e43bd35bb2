#pragma once

#include <vector>

#include "seaer/graph.hpp"
#include "seaer/matrix.hpp"

namespace seaer {

// Lower-triangular accuracy matrix: r(i, j) = accuracy on task j's test set
// after training through task i (0-based internally, i >= j).
struct PerformanceMatrix {
    std::vector<std::vector<double>> rows;  // rows[i] has i+1 entries

    int num_stages() const { return static_cast<int>(rows.size()); }
    double at(int stage, int task) const { return rows[stage][task]; }
};

// mean of the final row
double fap(const PerformanceMatrix& r);
// mean over tasks of r(m-1, j) - r(j, j); zero for a single task
double faf(const PerformanceMatrix& r);
// entries r(i, j) - r(j, j), same lower-triangular layout, zero diagonal
std::vector<std::vector<double>> forgetting_matrix(const PerformanceMatrix& r);

struct DistortionBucket {
    int hop = 0;
    int count = 0;
    double mean_distance = 0.0;  // mean over the bucket of min embedding distance to the anchors
};

struct DistortionProfile {
    std::vector<DistortionBucket> buckets;  // nonempty hop buckets, ascending
    double slope = 0.0;                     // least squares through the origin
    double alpha_hat = 0.0;                 // max(mean/hop) / min(mean/hop)
    bool degenerate = false;                // set when a ratio vanishes or no buckets exist
};

// Buckets the graph's vertices by hop distance from the anchor set
// (1..max_hops) and measures the mean embedding distance per bucket.
// embeddings rows are indexed by the graph's local indices.
DistortionProfile distortion_profile(const Matrix& embeddings, const Graph& g,
                                     const std::vector<vertex_t>& anchors, int max_hops = 5);

}  // namespace seaer
