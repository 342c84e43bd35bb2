#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "seaer/matrix.hpp"

namespace seaer {

using vertex_t = std::int32_t;
using hop_t = std::uint32_t;

// Hop-count sentinel for vertices not reachable from the sources/centers.
inline constexpr hop_t kUnreachable = std::numeric_limits<hop_t>::max();

// Undirected, unweighted graph over a subset of a stream's vertex ids.
// Adjacency is stored over dense local indices; vertex_ids maps local -> global.
// Immutable after construction.
class Graph {
public:
    Graph() = default;
    // vertex_ids must be sorted and unique; edges are (global,global) pairs,
    // deduplicated and symmetrized on construction. Self-loops rejected.
    Graph(std::vector<vertex_t> vertex_ids, const std::vector<std::pair<vertex_t, vertex_t>>& edges);

    int num_vertices() const { return static_cast<int>(vertex_ids_.size()); }
    std::int64_t num_edges() const { return num_edges_; }

    vertex_t global_id(int local) const { return vertex_ids_[local]; }
    const std::vector<vertex_t>& vertex_ids() const { return vertex_ids_; }

    bool contains(vertex_t global) const;
    // local index of a global id; throws std::invalid_argument if absent
    int local_index(vertex_t global) const;

    std::span<const vertex_t> neighbors(int local) const {
        return {adj_.data() + offsets_[local],
                static_cast<std::size_t>(offsets_[local + 1] - offsets_[local])};
    }
    int degree_local(int local) const { return static_cast<int>(offsets_[local + 1] - offsets_[local]); }

private:
    std::vector<vertex_t> vertex_ids_;           // sorted global ids
    std::vector<std::int32_t> lookup_;           // global -> local, -1 absent
    std::vector<std::int64_t> offsets_;          // CSR offsets, size n+1
    std::vector<vertex_t> adj_;                  // neighbor local indices, sorted
    std::int64_t num_edges_ = 0;
};

struct VertexBatch {
    std::vector<vertex_t> vertex_ids;
    Matrix features;             // one row per vertex, in vertex_ids order
    std::vector<int> labels;     // class indices
};

struct TaggedEdge {
    vertex_t u = 0;
    vertex_t v = 0;
    int task = 0;  // 1-based; equals max(task of u, task of v)
};

// Ordered vertex batches plus all edges tagged with the first task index at
// which both endpoints exist.
struct TaskStream {
    int feature_dim = 0;
    int num_classes = 0;
    std::vector<VertexBatch> batches;
    std::vector<TaggedEdge> edges;

    int num_tasks() const { return static_cast<int>(batches.size()); }
    int total_vertices() const;
    // 1-based task index owning a global vertex id
    int task_of(vertex_t v) const;
    // features of batches 1..upto stacked in ascending global-id order
    Matrix stacked_features(int upto) const;
    std::vector<int> stacked_labels(int upto) const;
};

struct EgoGraph {
    vertex_t root = 0;
    Graph graph;       // induced subgraph; vertex ids are the source graph's global ids
    Matrix features;   // optional rows in graph order; empty if not requested
};

// Hop distances from a source set, indexed by the graph's local indices.
struct DistanceField {
    std::vector<vertex_t> sources;  // global ids
    std::vector<hop_t> dist;        // per local vertex; kUnreachable if disconnected

    hop_t at(int local) const { return dist[local]; }
};

// graph induced by the vertices of batches 1..upto and every edge tagged <= upto
Graph induce_graph(const TaskStream& stream, int upto);

// subgraph on {u : d(u, v) <= k}; features, when given, must be indexed by
// the source graph's local order
EgoGraph ego_graph(const Graph& g, vertex_t v, int k);
EgoGraph ego_graph(const Graph& g, vertex_t v, int k, const Matrix& features);

DistanceField multi_source_bfs(const Graph& g, const std::vector<vertex_t>& sources);

// max over covered\centers of min hop distance to centers; 0 when covered is
// a subset of centers; kUnreachable if any such vertex is unreachable
hop_t coverage_radius(const Graph& g, const std::vector<vertex_t>& covered,
                      const std::vector<vertex_t>& centers);

int degree(const Graph& g, vertex_t v);

// Stream invariants shared by the JSON reader and the generators. Throws
// ConfigError with the offending batch/edge index on violation.
void validate_stream(const TaskStream& stream);

}  // namespace seaer
