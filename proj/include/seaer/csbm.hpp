#pragma once

#include <array>
#include <cstdint>

#include "seaer/graph.hpp"

namespace seaer {

// Contextual stochastic block model over two communities per stage.
// Stage s holds n_per_stage vertices split (n/2 + d, n/2 - d) with the
// imbalance d alternating sign across stages. Features follow
//   x_v = sqrt(mu/n) * y_v * u + Z_v / p_dim
// with one shared direction u per stream and y_v in {0,1}
// (or {-1,+1} when symmetric_labels is set).
struct CsbmConfig {
    int n_per_stage = 300;
    int p_dim = 500;
    double mu = 5.0;
    double p_intra = 0.15;
    double p_inter = 0.1;
    double p_stage = 0.1;
    int delta = 0;
    int num_stages = 2;
    std::uint64_t seed = 0;
    bool symmetric_labels = false;
    // cross-stage edges between consecutive stages only; when false, all
    // stage pairs are connected with p_stage
    bool consecutive_only = true;
};

void validate_config(const CsbmConfig& cfg);

// community sizes (stage1 class0, stage1 class1, stage2 class0, stage2 class1)
std::array<int, 4> community_counts(const CsbmConfig& cfg);

// community sizes of one stage (1-based), alternating the imbalance
std::pair<int, int> stage_counts(const CsbmConfig& cfg, int stage);

TaskStream generate_stream(const CsbmConfig& cfg);

}  // namespace seaer
