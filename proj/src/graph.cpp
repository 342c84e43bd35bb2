#include "seaer/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include "seaer/errors.hpp"

namespace seaer {

Graph::Graph(std::vector<vertex_t> vertex_ids,
             const std::vector<std::pair<vertex_t, vertex_t>>& edges)
    : vertex_ids_(std::move(vertex_ids)) {
    const int n = static_cast<int>(vertex_ids_.size());
    vertex_t max_id = -1;
    for (vertex_t id : vertex_ids_) max_id = std::max(max_id, id);
    lookup_.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (int i = 0; i < n; ++i) {
        if (lookup_[vertex_ids_[i]] != -1)
            throw std::invalid_argument("duplicate vertex id " + std::to_string(vertex_ids_[i]));
        lookup_[vertex_ids_[i]] = i;
    }

    std::vector<std::pair<vertex_t, vertex_t>> local_edges;
    local_edges.reserve(edges.size() * 2);
    for (const auto& [gu, gv] : edges) {
        if (gu == gv) throw std::invalid_argument("self-loop on vertex " + std::to_string(gu));
        const int u = local_index(gu);
        const int v = local_index(gv);
        local_edges.emplace_back(u, v);
        local_edges.emplace_back(v, u);
    }
    std::sort(local_edges.begin(), local_edges.end());
    local_edges.erase(std::unique(local_edges.begin(), local_edges.end()), local_edges.end());

    offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : local_edges) offsets_[u + 1]++;
    for (int i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(local_edges.size());
    std::size_t k = 0;
    for (const auto& [u, v] : local_edges) adj_[k++] = v;  // already sorted per row
    num_edges_ = static_cast<std::int64_t>(local_edges.size()) / 2;
}

bool Graph::contains(vertex_t global) const {
    return global >= 0 && global < static_cast<vertex_t>(lookup_.size()) && lookup_[global] != -1;
}

int Graph::local_index(vertex_t global) const {
    if (!contains(global))
        throw std::invalid_argument("vertex " + std::to_string(global) + " not in graph");
    return lookup_[global];
}

int TaskStream::total_vertices() const {
    int n = 0;
    for (const auto& b : batches) n += static_cast<int>(b.vertex_ids.size());
    return n;
}

int TaskStream::task_of(vertex_t v) const {
    for (int t = 0; t < num_tasks(); ++t)
        for (vertex_t id : batches[t].vertex_ids)
            if (id == v) return t + 1;
    throw std::invalid_argument("vertex " + std::to_string(v) + " not in stream");
}

Matrix TaskStream::stacked_features(int upto) const {
    // rows ordered by ascending global id, matching induce_graph's local order
    std::vector<std::pair<vertex_t, std::pair<int, int>>> order;  // id -> (batch, row)
    for (int t = 0; t < upto; ++t)
        for (std::size_t r = 0; r < batches[t].vertex_ids.size(); ++r)
            order.push_back({batches[t].vertex_ids[r], {t, static_cast<int>(r)}});
    std::sort(order.begin(), order.end());
    Matrix out(static_cast<int>(order.size()), feature_dim);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& [b, r] = order[i].second;
        const double* src = batches[b].features.row(r);
        std::copy(src, src + feature_dim, out.row(static_cast<int>(i)));
    }
    return out;
}

std::vector<int> TaskStream::stacked_labels(int upto) const {
    std::vector<std::pair<vertex_t, int>> order;
    for (int t = 0; t < upto; ++t)
        for (std::size_t r = 0; r < batches[t].vertex_ids.size(); ++r)
            order.push_back({batches[t].vertex_ids[r], batches[t].labels[r]});
    std::sort(order.begin(), order.end());
    std::vector<int> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[i] = order[i].second;
    return out;
}

Graph induce_graph(const TaskStream& stream, int upto) {
    if (upto < 1 || upto > stream.num_tasks())
        throw std::invalid_argument("task index " + std::to_string(upto) + " out of range [1, " +
                                    std::to_string(stream.num_tasks()) + "]");
    std::vector<vertex_t> ids;
    for (int t = 0; t < upto; ++t)
        ids.insert(ids.end(), stream.batches[t].vertex_ids.begin(),
                   stream.batches[t].vertex_ids.end());
    std::sort(ids.begin(), ids.end());
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    for (const auto& e : stream.edges)
        if (e.task <= upto) edges.emplace_back(e.u, e.v);
    return Graph(std::move(ids), edges);
}

namespace {

std::vector<hop_t> bfs_local(const Graph& g, const std::vector<int>& source_locals) {
    std::vector<hop_t> dist(g.num_vertices(), kUnreachable);
    std::queue<int> q;
    for (int s : source_locals) {
        if (dist[s] == 0) continue;  // duplicate source
        dist[s] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (vertex_t v : g.neighbors(u)) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

}  // namespace

EgoGraph ego_graph(const Graph& g, vertex_t v, int k) {
    if (k < 0) throw std::invalid_argument("hop count must be non-negative");
    const int root = g.local_index(v);
    std::vector<hop_t> dist = bfs_local(g, {root});
    std::vector<int> members;
    for (int i = 0; i < g.num_vertices(); ++i)
        if (dist[i] != kUnreachable && dist[i] <= static_cast<hop_t>(k)) members.push_back(i);

    std::vector<vertex_t> ids;
    ids.reserve(members.size());
    for (int i : members) ids.push_back(g.global_id(i));
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    std::vector<char> in_set(g.num_vertices(), 0);
    for (int i : members) in_set[i] = 1;
    for (int i : members)
        for (vertex_t j : g.neighbors(i))
            if (in_set[j] && i < j) edges.emplace_back(g.global_id(i), g.global_id(j));

    EgoGraph ego;
    ego.root = v;
    ego.graph = Graph(std::move(ids), edges);
    return ego;
}

EgoGraph ego_graph(const Graph& g, vertex_t v, int k, const Matrix& features) {
    EgoGraph ego = ego_graph(g, v, k);
    ego.features = Matrix(ego.graph.num_vertices(), features.cols);
    for (int i = 0; i < ego.graph.num_vertices(); ++i) {
        const double* src = features.row(g.local_index(ego.graph.global_id(i)));
        std::copy(src, src + features.cols, ego.features.row(i));
    }
    return ego;
}

DistanceField multi_source_bfs(const Graph& g, const std::vector<vertex_t>& sources) {
    if (sources.empty()) throw std::invalid_argument("source set must be nonempty");
    std::vector<int> locals;
    locals.reserve(sources.size());
    for (vertex_t s : sources) locals.push_back(g.local_index(s));
    DistanceField field;
    field.sources = sources;
    field.dist = bfs_local(g, locals);
    return field;
}

hop_t coverage_radius(const Graph& g, const std::vector<vertex_t>& covered,
                      const std::vector<vertex_t>& centers) {
    if (centers.empty()) throw std::invalid_argument("center set must be nonempty");
    const DistanceField field = multi_source_bfs(g, centers);
    std::vector<char> is_center(g.num_vertices(), 0);
    for (vertex_t c : centers) is_center[g.local_index(c)] = 1;
    hop_t radius = 0;
    for (vertex_t u : covered) {
        const int lu = g.local_index(u);
        if (is_center[lu]) continue;
        const hop_t d = field.dist[lu];
        if (d == kUnreachable) return kUnreachable;
        radius = std::max(radius, d);
    }
    return radius;
}

int degree(const Graph& g, vertex_t v) { return g.degree_local(g.local_index(v)); }

void validate_stream(const TaskStream& stream) {
    if (stream.feature_dim <= 0) throw ConfigError("feature_dim must be positive");
    if (stream.num_classes <= 0) throw ConfigError("num_classes must be positive");
    if (stream.batches.empty()) throw ConfigError("stream has no batches");

    std::set<vertex_t> seen;
    for (std::size_t b = 0; b < stream.batches.size(); ++b) {
        const auto& batch = stream.batches[b];
        const std::string where = "batches[" + std::to_string(b) + "]";
        if (batch.vertex_ids.empty()) throw ConfigError(where + ": empty batch");
        if (batch.features.rows != static_cast<int>(batch.vertex_ids.size()) ||
            batch.features.cols != stream.feature_dim)
            throw ConfigError(where + ": features shape " + std::to_string(batch.features.rows) +
                              "x" + std::to_string(batch.features.cols) + " does not match " +
                              std::to_string(batch.vertex_ids.size()) + "x" +
                              std::to_string(stream.feature_dim));
        if (batch.labels.size() != batch.vertex_ids.size())
            throw ConfigError(where + ": label count mismatch");
        for (std::size_t i = 0; i < batch.vertex_ids.size(); ++i) {
            const vertex_t id = batch.vertex_ids[i];
            if (id < 0) throw ConfigError(where + ".vertices[" + std::to_string(i) + "]: negative id");
            if (!seen.insert(id).second)
                throw ConfigError(where + ".vertices[" + std::to_string(i) + "]: vertex " +
                                  std::to_string(id) + " appears in more than one batch");
            if (batch.labels[i] < 0 || batch.labels[i] >= stream.num_classes)
                throw ConfigError(where + ".labels[" + std::to_string(i) + "]: label " +
                                  std::to_string(batch.labels[i]) + " outside [0, " +
                                  std::to_string(stream.num_classes) + ")");
        }
    }
    // ids dense 0-based over the whole stream
    const int n = stream.total_vertices();
    if (seen.empty() || *seen.begin() != 0 || *seen.rbegin() != n - 1)
        throw ConfigError("vertex ids must be dense 0.." + std::to_string(n - 1));

    std::vector<int> task_of(n, 0);
    {
        int t = 1;
        for (const auto& batch : stream.batches) {
            for (vertex_t id : batch.vertex_ids) task_of[id] = t;
            ++t;
        }
    }
    std::set<std::pair<vertex_t, vertex_t>> edge_set;
    for (std::size_t e = 0; e < stream.edges.size(); ++e) {
        const auto& edge = stream.edges[e];
        const std::string where = "edges[" + std::to_string(e) + "]";
        if (edge.u < 0 || edge.u >= n || edge.v < 0 || edge.v >= n)
            throw ConfigError(where + ": endpoint out of range");
        if (edge.u == edge.v) throw ConfigError(where + ": self-loop on " + std::to_string(edge.u));
        const auto key = std::minmax(edge.u, edge.v);
        if (!edge_set.insert({key.first, key.second}).second)
            throw ConfigError(where + ": duplicate edge (" + std::to_string(edge.u) + ", " +
                              std::to_string(edge.v) + ")");
        const int expected = std::max(task_of[edge.u], task_of[edge.v]);
        if (edge.task != expected)
            throw ConfigError(where + ": tag " + std::to_string(edge.task) +
                              " does not equal max endpoint task " + std::to_string(expected));
    }
}

}  // namespace seaer
