#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "seaer/selection.hpp"

using namespace seaer;

namespace {

std::vector<vertex_t> all_ids(const Graph& g) {
    std::vector<vertex_t> out;
    for (int i = 0; i < g.num_vertices(); ++i) out.push_back(g.global_id(i));
    return out;
}

// exact optimum by enumerating every center subset of size b
hop_t optimal_radius(const Graph& g, const std::vector<vertex_t>& candidates, int b) {
    const auto all = oracle::floyd_warshall(g);
    std::vector<int> pick(b, 0);
    hop_t best = kUnreachable;
    const int n = static_cast<int>(candidates.size());
    const auto radius_of = [&](const std::vector<int>& centers) {
        hop_t radius = 0;
        for (int u = 0; u < n; ++u) {
            bool is_center = false;
            for (int c : centers) is_center = is_center || c == u;
            if (is_center) continue;
            hop_t dmin = kUnreachable;
            for (int c : centers)
                dmin = std::min(dmin,
                                all[g.local_index(candidates[c])][g.local_index(candidates[u])]);
            if (dmin == kUnreachable) return kUnreachable;
            radius = std::max(radius, dmin);
        }
        return radius;
    };
    // iterate over ascending index combinations
    std::vector<int> comb(b);
    for (int i = 0; i < b; ++i) comb[i] = i;
    while (true) {
        best = std::min(best, radius_of(comb));
        int i = b - 1;
        while (i >= 0 && comb[i] == n - b + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < b; ++j) comb[j] = comb[j - 1] + 1;
    }
    (void)pick;
    return best;
}

}  // namespace

TEST_CASE("k-center greedy basics") {
    SUBCASE("budget covers all candidates") {
        const Graph g = oracle::path_graph(5);
        const auto picked = select_kcenter_greedy(g, {1, 3, 4}, 10, 0);
        CHECK(picked == std::vector<vertex_t>{1, 3, 4});
    }
    SUBCASE("star graph starts at the hub") {
        const Graph g = oracle::star_graph(5);
        const auto picked = select_kcenter_greedy(g, all_ids(g), 1, 0);
        CHECK(picked == std::vector<vertex_t>{0});
        CHECK(coverage_radius(g, all_ids(g), picked) == 1);
    }
    SUBCASE("empty candidates rejected") {
        const Graph g = oracle::path_graph(3);
        CHECK_THROWS_AS(select_kcenter_greedy(g, {}, 1, 0), std::invalid_argument);
    }
    SUBCASE("deterministic regardless of candidate order") {
        Rng rng(5);
        const Graph g = oracle::random_connected_graph(12, 0.1, rng);
        std::vector<vertex_t> fwd = all_ids(g);
        std::vector<vertex_t> rev(fwd.rbegin(), fwd.rend());
        CHECK(select_kcenter_greedy(g, fwd, 4, 0) == select_kcenter_greedy(g, rev, 4, 7));
    }
}

TEST_CASE("greedy radius is within twice the optimum") {
    Rng rng(1001);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_index(9));  // 4..12
        const Graph g = oracle::random_connected_graph(n, 0.15, rng);
        const std::vector<vertex_t> cands = all_ids(g);
        const int b = 1 + static_cast<int>(rng.uniform_index(3));
        const auto picked = select_kcenter_greedy(g, cands, b, 0);
        if (static_cast<int>(picked.size()) >= n) continue;
        const hop_t greedy = coverage_radius(g, cands, picked);
        const hop_t optimal = optimal_radius(g, cands, b);
        REQUIRE(optimal != kUnreachable);
        CHECK(greedy <= 2 * optimal);
        ++checked;
    }
    CHECK(checked > 400);
}

TEST_CASE("adding a center never increases the coverage radius") {
    Rng rng(321);
    const Graph g = oracle::random_connected_graph(20, 0.08, rng);
    const std::vector<vertex_t> cands = all_ids(g);
    std::vector<vertex_t> picked = select_kcenter_greedy(g, cands, 2, 0);
    hop_t prev = coverage_radius(g, cands, picked);
    for (int extra = 3; extra <= 8; ++extra) {
        picked = select_kcenter_greedy(g, cands, extra, 0);
        const hop_t cur = coverage_radius(g, cands, picked);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("k-center sampling") {
    SUBCASE("single candidate is always selected") {
        const Graph g = oracle::path_graph(4);
        CHECK(select_kcenter_sampling(g, {2}, 1, 9) == std::vector<vertex_t>{2});
    }
    SUBCASE("no duplicates and exact size") {
        Rng rng(12);
        const Graph g = oracle::random_connected_graph(15, 0.1, rng);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto picked = select_kcenter_sampling(g, all_ids(g), 6, seed);
            CHECK(picked.size() == 6);
            CHECK(std::set<vertex_t>(picked.begin(), picked.end()).size() == 6);
        }
    }
    SUBCASE("only candidate with positive mass is picked") {
        // hub 0 with leaves; candidates hub + one leaf: after the hub is taken
        // the leaf is the only remaining candidate
        const Graph g = oracle::star_graph(4);
        const auto picked = select_kcenter_sampling(g, {0, 3}, 2, 31);
        CHECK(picked == std::vector<vertex_t>{0, 3});
    }
    SUBCASE("symmetric candidates drawn with equal frequency") {
        // path 0-1-2: init takes the middle (highest degree), then 0 and 2 are
        // symmetric at distance 1
        const Graph g = oracle::path_graph(3);
        int count0 = 0;
        const int trials = 10000;
        for (int s = 0; s < trials; ++s) {
            const auto picked = select_kcenter_sampling(g, {0, 1, 2}, 2, s);
            REQUIRE(picked.size() == 2);
            REQUIRE(std::find(picked.begin(), picked.end(), 1) != picked.end());
            if (picked[0] == 0) ++count0;
        }
        // chi-squared with 1 dof at alpha=0.001 is 10.83
        const double expected = trials / 2.0;
        const double chi2 = (count0 - expected) * (count0 - expected) / expected +
                            ((trials - count0) - expected) * ((trials - count0) - expected) / expected;
        CHECK(chi2 < 10.83);
    }
    SUBCASE("unreachable candidates keep positive mass") {
        std::vector<vertex_t> ids{0, 1, 2, 3};
        const Graph g(std::move(ids), {{0, 1}, {0, 2}});  // 3 isolated
        std::set<vertex_t> seen;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const auto picked = select_kcenter_sampling(g, {0, 1, 2, 3}, 2, s);
            for (vertex_t v : picked) seen.insert(v);
        }
        CHECK(seen.count(3) == 1);
    }
}

TEST_CASE("degree-distance sampling") {
    SUBCASE("budget covers everything") {
        const Graph g = oracle::path_graph(4);
        CHECK(select_degree_distance(g, {0, 1, 2, 3}, 4, 3) ==
              std::vector<vertex_t>{0, 1, 2, 3});
    }
    SUBCASE("no duplicates") {
        Rng rng(14);
        const Graph g = oracle::random_connected_graph(15, 0.1, rng);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto picked = select_degree_distance(g, all_ids(g), 5, seed);
            CHECK(std::set<vertex_t>(picked.begin(), picked.end()).size() == 5);
        }
    }
    SUBCASE("initialization odds follow degree 1:3") {
        // a: degree 1, b: degree 3
        std::vector<vertex_t> ids{0, 1, 2, 3, 4, 5};
        const Graph g(std::move(ids), {{0, 1}, {2, 3}, {2, 4}, {2, 5}});
        int picked_b = 0;
        const int trials = 10000;
        for (int s = 0; s < trials; ++s) {
            const auto picked = select_degree_distance(g, {0, 2}, 1, s);
            REQUIRE(picked.size() == 1);
            picked_b += picked[0] == 2;
        }
        // expected 3/4; 5-sigma band of a binomial
        const double phat = static_cast<double>(picked_b) / trials;
        const double se = std::sqrt(0.75 * 0.25 / trials);
        CHECK(std::abs(phat - 0.75) < 5.0 * se);
    }
}

TEST_CASE("baseline selection") {
    Rng rng(15);
    const Graph g = oracle::random_connected_graph(12, 0.2, rng);
    const std::vector<vertex_t> cands = all_ids(g);

    SUBCASE("budget covers everything") {
        CHECK(select_baseline(Strategy::kRandom, g, cands, 50, 1) == cands);
    }
    SUBCASE("top degree on a star picks the hub") {
        const Graph star = oracle::star_graph(5);
        CHECK(select_baseline(Strategy::kTopDegree, star, all_ids(star), 1, 0) ==
              std::vector<vertex_t>{0});
    }
    SUBCASE("random selection has uniform inclusion frequencies") {
        std::map<vertex_t, int> counts;
        const int trials = 10000;
        for (int s = 0; s < trials; ++s)
            for (vertex_t v : select_baseline(Strategy::kRandom, g, cands, 3, s)) counts[v]++;
        // each vertex included with probability 3/12 = 1/4
        const double expect = trials * 0.25;
        const double se = std::sqrt(trials * 0.25 * 0.75);
        for (const auto& [v, c] : counts) CHECK(std::abs(c - expect) < 5.0 * se);
        CHECK(counts.size() == cands.size());
    }
    SUBCASE("representation needs embeddings") {
        CHECK_THROWS_AS(select_baseline(Strategy::kRepresentation, g, cands, 3, 0),
                        std::invalid_argument);
    }
    SUBCASE("representation picks class-mean-nearest vertices round-robin") {
        // 1-d embeddings: class 0 at {0, 0.1, 1.0}, class 1 at {5, 5.1, 6.0}
        std::vector<vertex_t> ids{0, 1, 2, 3, 4, 5};
        const Graph line(std::move(ids), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
        Matrix emb(6, 1);
        emb(0, 0) = 0.0;
        emb(1, 0) = 0.1;
        emb(2, 0) = 1.0;
        emb(3, 0) = 5.0;
        emb(4, 0) = 5.1;
        emb(5, 0) = 6.0;
        const std::vector<int> labels{0, 0, 0, 1, 1, 1};
        const std::vector<vertex_t> all{0, 1, 2, 3, 4, 5};
        // class-0 mean 0.3667 -> nearest is vertex 1; class-1 mean 5.3667 -> vertex 4
        const auto picked =
            select_baseline(Strategy::kRepresentation, line, all, 2, 0, &emb, &labels);
        CHECK(picked == std::vector<vertex_t>{1, 4});
    }
}

TEST_CASE("stratify_by_class") {
    const std::vector<vertex_t> cands{0, 1, 2, 3, 4, 5};
    SUBCASE("two classes, budget 4") {
        const std::vector<int> labels{0, 0, 0, 1, 1, 1};
        const auto budgets = stratify_by_class(cands, labels, 4);
        CHECK(budgets.at(0) == 2);
        CHECK(budgets.at(1) == 2);
    }
    SUBCASE("three classes, budget 4 favors smaller class ids") {
        const std::vector<int> labels{0, 0, 1, 1, 2, 2};
        const auto budgets = stratify_by_class(cands, labels, 4);
        CHECK(budgets.at(0) == 2);
        CHECK(budgets.at(1) == 1);
        CHECK(budgets.at(2) == 1);
    }
    SUBCASE("budgets sum to b") {
        Rng rng(71);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<int> labels;
            std::vector<vertex_t> cs;
            const int n = 5 + static_cast<int>(rng.uniform_index(10));
            for (int i = 0; i < n; ++i) {
                cs.push_back(i);
                labels.push_back(static_cast<int>(rng.uniform_index(3)));
            }
            std::set<int> present(labels.begin(), labels.end());
            const int b = static_cast<int>(present.size()) +
                          static_cast<int>(rng.uniform_index(5));
            const auto budgets = stratify_by_class(cs, labels, b);
            int total = 0;
            for (const auto& [cls, amount] : budgets) {
                CHECK(amount >= 1);
                total += amount;
            }
            CHECK(total == b);
        }
    }
    SUBCASE("budget below class count rejected") {
        const std::vector<int> labels{0, 0, 1, 1, 2, 2};
        CHECK_THROWS_AS(stratify_by_class(cands, labels, 2), std::invalid_argument);
    }
}

TEST_CASE("select_buffer covers every present class when stratified") {
    Rng rng(81);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = oracle::random_connected_graph(16, 0.1, rng);
        std::vector<vertex_t> cands = all_ids(g);
        std::vector<int> labels;
        for (std::size_t i = 0; i < cands.size(); ++i)
            labels.push_back(static_cast<int>(rng.uniform_index(3)));
        for (Strategy strategy : {Strategy::kKCenterGreedy, Strategy::kKCenterSampling,
                                  Strategy::kDegreeDistanceSampling, Strategy::kRandom,
                                  Strategy::kTopDegree}) {
            const auto picked = select_buffer(strategy, g, cands, labels, 5, trial, true);
            CHECK(picked.size() == 5);
            std::set<int> covered;
            for (vertex_t v : picked)
                for (std::size_t i = 0; i < cands.size(); ++i)
                    if (cands[i] == v) covered.insert(labels[i]);
            const std::set<int> present(labels.begin(), labels.end());
            CHECK(covered == present);
        }
    }
}

TEST_CASE("samplers are deterministic functions of the seed") {
    Rng rng(91);
    const Graph g = oracle::random_connected_graph(14, 0.15, rng);
    const std::vector<vertex_t> cands = all_ids(g);
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        CHECK(select_kcenter_sampling(g, cands, 5, seed) ==
              select_kcenter_sampling(g, cands, 5, seed));
        CHECK(select_degree_distance(g, cands, 5, seed) ==
              select_degree_distance(g, cands, 5, seed));
        CHECK(select_baseline(Strategy::kRandom, g, cands, 5, seed) ==
              select_baseline(Strategy::kRandom, g, cands, 5, seed));
    }
}
