#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seaer/graph.hpp"
#include "seaer/matrix.hpp"

namespace seaer {

enum class Strategy {
    kKCenterGreedy,
    kKCenterSampling,
    kDegreeDistanceSampling,
    kRandom,
    kTopDegree,
    kRepresentation,
};

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

// Farthest-first traversal. Starts at the max-degree candidate (ties toward
// the smallest id), then repeatedly adds the candidate with the largest min
// hop distance to the current set; unreachable counts as farthest. Returns
// min(b, |candidates|) vertices, sorted by id.
std::vector<vertex_t> select_kcenter_greedy(const Graph& g, const std::vector<vertex_t>& candidates,
                                            int b, std::uint64_t seed);

// Same initialization, then samples each next vertex with probability
// proportional to its min distance to the current set. Unreachable candidates
// get (max finite distance + 1) so they keep positive mass.
std::vector<vertex_t> select_kcenter_sampling(const Graph& g,
                                              const std::vector<vertex_t>& candidates, int b,
                                              std::uint64_t seed);

// Degree-proportional initialization, then samples with weight
// degree(v) * d(v, P), renormalized each round.
std::vector<vertex_t> select_degree_distance(const Graph& g,
                                             const std::vector<vertex_t>& candidates, int b,
                                             std::uint64_t seed);

// RANDOM: uniform without replacement. TOP_DEGREE: b largest degrees (ties
// toward the smallest id). REPRESENTATION: per class, vertices closest to the
// class-mean embedding, filled round-robin across classes.
std::vector<vertex_t> select_baseline(Strategy strategy, const Graph& g,
                                      const std::vector<vertex_t>& candidates, int b,
                                      std::uint64_t seed, const Matrix* embeddings = nullptr,
                                      const std::vector<int>* labels = nullptr);

// Budgets per present class, as equal as possible, each >= 1; the remainder
// goes to the smallest class ids. Requires b >= number of present classes.
std::map<int, int> stratify_by_class(const std::vector<vertex_t>& candidates,
                                     const std::vector<int>& labels, int b);

// Strategy dispatch with optional per-class stratification. labels are
// per-candidate (parallel to candidates); embeddings rows are indexed by the
// graph's local indices.
std::vector<vertex_t> select_buffer(Strategy strategy, const Graph& g,
                                    const std::vector<vertex_t>& candidates,
                                    const std::vector<int>& labels, int b, std::uint64_t seed,
                                    bool stratify, const Matrix* embeddings = nullptr);

}  // namespace seaer
