#include "seaer/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seaer/errors.hpp"
#include "seaer/rng.hpp"

namespace seaer {

Strategy strategy_from_string(const std::string& s) {
    if (s == "kcenter_greedy") return Strategy::kKCenterGreedy;
    if (s == "kcenter_sampling") return Strategy::kKCenterSampling;
    if (s == "degree_distance") return Strategy::kDegreeDistanceSampling;
    if (s == "random") return Strategy::kRandom;
    if (s == "top_degree") return Strategy::kTopDegree;
    if (s == "representation") return Strategy::kRepresentation;
    throw ConfigError("unknown selection strategy \"" + s + "\"");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::kKCenterGreedy: return "kcenter_greedy";
        case Strategy::kKCenterSampling: return "kcenter_sampling";
        case Strategy::kDegreeDistanceSampling: return "degree_distance";
        case Strategy::kRandom: return "random";
        case Strategy::kTopDegree: return "top_degree";
        case Strategy::kRepresentation: return "representation";
    }
    return "?";
}

namespace {

void check_candidates(const Graph& g, const std::vector<vertex_t>& candidates, int b) {
    if (candidates.empty()) throw std::invalid_argument("candidate set must be nonempty");
    if (b < 1) throw std::invalid_argument("budget must be >= 1");
    for (vertex_t v : candidates) g.local_index(v);  // throws on unknown vertex
}

vertex_t max_degree_candidate(const Graph& g, const std::vector<vertex_t>& candidates) {
    vertex_t best = candidates.front();
    int best_deg = degree(g, best);
    for (vertex_t v : candidates) {
        const int d = degree(g, v);
        if (d > best_deg || (d == best_deg && v < best)) {
            best = v;
            best_deg = d;
        }
    }
    return best;
}

std::vector<vertex_t> sorted(std::vector<vertex_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// min hop distance of every candidate to the current set, with unreachable
// mapped to (max finite distance + 1)
std::vector<double> finite_distances(const Graph& g, const std::vector<vertex_t>& candidates,
                                     const std::vector<vertex_t>& picked) {
    const DistanceField field = multi_source_bfs(g, picked);
    hop_t max_finite = 0;
    for (vertex_t v : candidates) {
        const hop_t d = field.dist[g.local_index(v)];
        if (d != kUnreachable) max_finite = std::max(max_finite, d);
    }
    std::vector<double> out(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const hop_t d = field.dist[g.local_index(candidates[i])];
        out[i] = d == kUnreachable ? static_cast<double>(max_finite) + 1.0
                                   : static_cast<double>(d);
    }
    return out;
}

// index drawn from non-negative weights; requires positive total mass
std::size_t weighted_draw(Rng& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw ComputeError("sampling weights sum to zero");
    double x = rng.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        x -= weights[i];
        if (x < 0.0) return i;
    }
    // fp slack: last positive weight
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

}  // namespace

std::vector<vertex_t> select_kcenter_greedy(const Graph& g, const std::vector<vertex_t>& candidates,
                                            int b, std::uint64_t seed) {
    (void)seed;  // fully deterministic: max-degree start, smallest-id ties
    check_candidates(g, candidates, b);
    if (b >= static_cast<int>(candidates.size())) return sorted(candidates);

    std::vector<vertex_t> picked{max_degree_candidate(g, candidates)};
    while (static_cast<int>(picked.size()) < b) {
        const DistanceField field = multi_source_bfs(g, picked);
        vertex_t best = -1;
        hop_t best_dist = 0;
        bool best_unreachable = false;
        for (vertex_t v : candidates) {
            if (std::find(picked.begin(), picked.end(), v) != picked.end()) continue;
            const hop_t d = field.dist[g.local_index(v)];
            const bool unreachable = d == kUnreachable;
            const bool better =
                best == -1 ||
                (unreachable && !best_unreachable) ||
                (unreachable == best_unreachable && !unreachable && d > best_dist) ||
                (unreachable == best_unreachable && (unreachable || d == best_dist) && v < best);
            if (better) {
                best = v;
                best_dist = unreachable ? 0 : d;
                best_unreachable = unreachable;
            }
        }
        picked.push_back(best);
    }
    return sorted(std::move(picked));
}

std::vector<vertex_t> select_kcenter_sampling(const Graph& g,
                                              const std::vector<vertex_t>& candidates, int b,
                                              std::uint64_t seed) {
    check_candidates(g, candidates, b);
    if (b >= static_cast<int>(candidates.size())) return sorted(candidates);

    Rng rng(seed);
    std::vector<vertex_t> picked{max_degree_candidate(g, candidates)};
    std::vector<vertex_t> rest;
    for (vertex_t v : candidates)
        if (v != picked.front()) rest.push_back(v);

    while (static_cast<int>(picked.size()) < b) {
        const std::vector<double> dist = finite_distances(g, rest, picked);
        const std::size_t idx = weighted_draw(rng, dist);
        picked.push_back(rest[idx]);
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return sorted(std::move(picked));
}

std::vector<vertex_t> select_degree_distance(const Graph& g,
                                             const std::vector<vertex_t>& candidates, int b,
                                             std::uint64_t seed) {
    check_candidates(g, candidates, b);
    if (b >= static_cast<int>(candidates.size())) return sorted(candidates);

    Rng rng(seed);
    std::vector<double> init_weights(candidates.size());
    bool any_degree = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        init_weights[i] = static_cast<double>(degree(g, candidates[i]));
        any_degree = any_degree || init_weights[i] > 0.0;
    }
    if (!any_degree) std::fill(init_weights.begin(), init_weights.end(), 1.0);

    std::vector<vertex_t> rest = candidates;
    const std::size_t first = weighted_draw(rng, init_weights);
    std::vector<vertex_t> picked{rest[first]};
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(first));

    while (static_cast<int>(picked.size()) < b) {
        const std::vector<double> dist = finite_distances(g, rest, picked);
        std::vector<double> weights(rest.size());
        double total = 0.0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            weights[i] = static_cast<double>(degree(g, rest[i])) * dist[i];
            total += weights[i];
        }
        // all-zero products (isolated candidates at distance 0 cannot occur,
        // but zero degrees can): fall back to the distances
        const std::size_t idx = total > 0.0 ? weighted_draw(rng, weights) : weighted_draw(rng, dist);
        picked.push_back(rest[idx]);
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return sorted(std::move(picked));
}

std::vector<vertex_t> select_baseline(Strategy strategy, const Graph& g,
                                      const std::vector<vertex_t>& candidates, int b,
                                      std::uint64_t seed, const Matrix* embeddings,
                                      const std::vector<int>* labels) {
    check_candidates(g, candidates, b);
    if (b >= static_cast<int>(candidates.size())) return sorted(candidates);

    switch (strategy) {
        case Strategy::kRandom: {
            Rng rng(seed);
            std::vector<vertex_t> pool = candidates;
            std::vector<vertex_t> picked;
            for (int k = 0; k < b; ++k) {
                const std::size_t idx = rng.uniform_index(pool.size());
                picked.push_back(pool[idx]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
            }
            return sorted(std::move(picked));
        }
        case Strategy::kTopDegree: {
            std::vector<vertex_t> pool = candidates;
            std::sort(pool.begin(), pool.end(), [&](vertex_t a, vertex_t c) {
                const int da = degree(g, a), dc = degree(g, c);
                return da != dc ? da > dc : a < c;
            });
            pool.resize(b);
            return sorted(std::move(pool));
        }
        case Strategy::kRepresentation: {
            if (embeddings == nullptr || labels == nullptr)
                throw std::invalid_argument("representation selection needs embeddings and labels");
            if (labels->size() != candidates.size())
                throw std::invalid_argument("labels must parallel candidates");
            // rank candidates per class by distance to the class-mean embedding
            std::map<int, std::vector<std::size_t>> by_class;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                by_class[(*labels)[i]].push_back(i);
            const int dim = embeddings->cols;
            std::map<int, std::vector<std::size_t>> ranked;
            for (auto& [cls, idxs] : by_class) {
                std::vector<double> mean(dim, 0.0);
                for (std::size_t i : idxs) {
                    const double* row = embeddings->row(g.local_index(candidates[i]));
                    for (int j = 0; j < dim; ++j) mean[j] += row[j];
                }
                for (double& x : mean) x /= static_cast<double>(idxs.size());
                std::vector<std::pair<double, vertex_t>> order;
                for (std::size_t i : idxs) {
                    const double* row = embeddings->row(g.local_index(candidates[i]));
                    double sq = 0.0;
                    for (int j = 0; j < dim; ++j) sq += (row[j] - mean[j]) * (row[j] - mean[j]);
                    order.push_back({sq, candidates[i]});
                }
                std::sort(order.begin(), order.end());
                std::vector<std::size_t>& slot = ranked[cls];
                for (const auto& [_, v] : order) slot.push_back(static_cast<std::size_t>(v));
            }
            std::vector<vertex_t> picked;
            std::size_t round = 0;
            while (static_cast<int>(picked.size()) < b) {
                bool advanced = false;
                for (auto& [cls, order] : ranked) {
                    if (round < order.size() && static_cast<int>(picked.size()) < b) {
                        picked.push_back(static_cast<vertex_t>(order[round]));
                        advanced = true;
                    }
                }
                if (!advanced) break;
                ++round;
            }
            return sorted(std::move(picked));
        }
        default:
            throw std::invalid_argument("select_baseline got a non-baseline strategy");
    }
}

std::map<int, int> stratify_by_class(const std::vector<vertex_t>& candidates,
                                     const std::vector<int>& labels, int b) {
    if (labels.size() != candidates.size())
        throw std::invalid_argument("labels must parallel candidates");
    std::map<int, int> counts;
    for (int l : labels) counts[l]++;
    const int classes = static_cast<int>(counts.size());
    if (classes == 0) throw std::invalid_argument("no candidates");
    if (b < classes)
        throw std::invalid_argument("budget " + std::to_string(b) + " below class count " +
                                    std::to_string(classes));
    std::map<int, int> budgets;
    const int base = b / classes;
    int extra = b % classes;
    for (const auto& [cls, _] : counts) {
        budgets[cls] = base + (extra > 0 ? 1 : 0);
        if (extra > 0) --extra;
    }
    return budgets;
}

std::vector<vertex_t> select_buffer(Strategy strategy, const Graph& g,
                                    const std::vector<vertex_t>& candidates,
                                    const std::vector<int>& labels, int b, std::uint64_t seed,
                                    bool stratify, const Matrix* embeddings) {
    check_candidates(g, candidates, b);
    const auto run_one = [&](const std::vector<vertex_t>& cands, const std::vector<int>& lbls,
                             int budget, std::uint64_t s) {
        switch (strategy) {
            case Strategy::kKCenterGreedy: return select_kcenter_greedy(g, cands, budget, s);
            case Strategy::kKCenterSampling: return select_kcenter_sampling(g, cands, budget, s);
            case Strategy::kDegreeDistanceSampling: return select_degree_distance(g, cands, budget, s);
            default: return select_baseline(strategy, g, cands, budget, s, embeddings, &lbls);
        }
    };
    // representation selection is round-robin per class already
    const bool per_class = stratify && strategy != Strategy::kRepresentation &&
                           b < static_cast<int>(candidates.size());
    if (!per_class) return run_one(candidates, labels, b, seed);

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < candidates.size(); ++i) by_class[labels[i]].push_back(i);
    std::map<int, int> budgets = stratify_by_class(candidates, labels, b);

    // cap at class size, handing leftovers to classes with spare candidates
    int leftover = 0;
    for (auto& [cls, budget] : budgets) {
        const int avail = static_cast<int>(by_class[cls].size());
        if (budget > avail) {
            leftover += budget - avail;
            budget = avail;
        }
    }
    while (leftover > 0) {
        bool placed = false;
        for (auto& [cls, budget] : budgets) {
            const int avail = static_cast<int>(by_class[cls].size());
            if (leftover > 0 && budget < avail) {
                ++budget;
                --leftover;
                placed = true;
            }
        }
        if (!placed) break;
    }

    std::vector<vertex_t> picked;
    for (const auto& [cls, idxs] : by_class) {
        if (budgets[cls] == 0) continue;
        std::vector<vertex_t> cands;
        std::vector<int> lbls;
        for (std::size_t i : idxs) {
            cands.push_back(candidates[i]);
            lbls.push_back(labels[i]);
        }
        const std::vector<vertex_t> part =
            run_one(cands, lbls, budgets[cls], split_seed(seed, static_cast<std::uint64_t>(cls)));
        picked.insert(picked.end(), part.begin(), part.end());
    }
    return sorted(std::move(picked));
}

}  // namespace seaer
