#include "seaer/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "seaer/errors.hpp"

namespace seaer {

TaskPartition partition_by_class(const std::vector<int>& labels, int classes_per_task) {
    if (classes_per_task != 2)
        throw std::invalid_argument("only 2-class tasks are supported");
    std::set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw std::invalid_argument("need at least 2 classes to partition");
    std::vector<int> ordered(classes.begin(), classes.end());
    TaskPartition part;
    std::size_t i = 0;
    for (; i + 1 < ordered.size(); i += 2) part.class_pairs.push_back({ordered[i], ordered[i + 1]});
    if (i < ordered.size()) {
        part.dropped_classes.push_back(ordered[i]);
        std::cerr << "warning: dropping trailing class " << ordered[i]
                  << " to keep an even class count\n";
    }
    return part;
}

namespace {

struct LineReader {
    std::ifstream in;
    std::string path;
    int line_no = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw IoError("cannot open " + p);
    }
    bool next(std::string& line) {
        if (!std::getline(in, line)) return false;
        ++line_no;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": " + msg);
    }
};

std::vector<double> parse_csv_row(LineReader& reader, const std::string& line) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            row.push_back(std::stod(cell));
        } catch (const std::exception&) {
            reader.fail("cannot parse \"" + cell + "\" as a number");
        }
    }
    if (row.empty()) reader.fail("empty row");
    return row;
}

}  // namespace

TaskStream to_stream(const std::string& edges_path, const std::string& features_path,
                     const std::string& labels_path, const TaskPartition& partition) {
    // labels: one integer per line, row index = vertex id
    std::vector<int> labels;
    {
        LineReader reader(labels_path);
        std::string line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            try {
                labels.push_back(std::stoi(line));
            } catch (const std::exception&) {
                reader.fail("cannot parse \"" + line + "\" as a label");
            }
        }
        if (labels.empty()) reader.fail("no labels");
    }

    std::map<int, int> task_of_class;  // 0-based task
    for (int t = 0; t < partition.num_tasks(); ++t) {
        task_of_class[partition.class_pairs[t].first] = t;
        task_of_class[partition.class_pairs[t].second] = t;
    }

    // features: CSV rows aligned with labels
    std::vector<std::vector<double>> features;
    {
        LineReader reader(features_path);
        std::string line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            features.push_back(parse_csv_row(reader, line));
            if (features.back().size() != features.front().size())
                reader.fail("inconsistent feature dimension");
        }
        if (features.size() != labels.size())
            reader.fail("feature rows (" + std::to_string(features.size()) +
                        ") do not match label rows (" + std::to_string(labels.size()) + ")");
    }
    const int n_all = static_cast<int>(labels.size());
    const int dim = static_cast<int>(features.front().size());

    // dense relabeling in task order, dropped classes removed
    std::vector<int> new_id(n_all, -1);
    std::vector<std::vector<int>> members(partition.num_tasks());
    for (int v = 0; v < n_all; ++v) {
        auto it = task_of_class.find(labels[v]);
        if (it == task_of_class.end()) continue;  // dropped class
        members[it->second].push_back(v);
    }
    int next = 0;
    for (const auto& task_members : members)
        for (int v : task_members) new_id[v] = next++;

    TaskStream stream;
    stream.feature_dim = dim;
    stream.num_classes = 0;
    for (const auto& [cls, _] : task_of_class) stream.num_classes = std::max(stream.num_classes, cls + 1);

    for (int t = 0; t < partition.num_tasks(); ++t) {
        if (members[t].empty())
            throw ConfigError("task " + std::to_string(t + 1) + " (classes " +
                              std::to_string(partition.class_pairs[t].first) + "/" +
                              std::to_string(partition.class_pairs[t].second) + ") has no vertices");
        VertexBatch batch;
        batch.features = Matrix(static_cast<int>(members[t].size()), dim);
        int r = 0;
        for (int v : members[t]) {
            batch.vertex_ids.push_back(new_id[v]);
            batch.labels.push_back(labels[v]);
            std::copy(features[v].begin(), features[v].end(), batch.features.row(r++));
        }
        stream.batches.push_back(std::move(batch));
    }

    std::vector<int> task_by_new_id(next, -1);
    for (int t = 0; t < partition.num_tasks(); ++t)
        for (int v : members[t]) task_by_new_id[new_id[v]] = t;

    // edges: "u v" per line; lines touching dropped vertices are skipped
    {
        LineReader reader(edges_path);
        std::set<std::pair<vertex_t, vertex_t>> seen;
        std::string line;
        while (reader.next(line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            long long u = -1, v = -1;
            if (!(ss >> u >> v)) reader.fail("expected \"u v\"");
            if (u < 0 || u >= n_all || v < 0 || v >= n_all)
                reader.fail("vertex id out of range in \"" + line + "\"");
            if (u == v) continue;
            const int nu = new_id[u], nv = new_id[v];
            if (nu < 0 || nv < 0) continue;
            const auto key = std::minmax(static_cast<vertex_t>(nu), static_cast<vertex_t>(nv));
            if (!seen.insert(key).second) continue;
            const int tag = std::max(task_by_new_id[nu], task_by_new_id[nv]) + 1;
            stream.edges.push_back({key.first, key.second, tag});
        }
    }

    validate_stream(stream);
    return stream;
}

}  // namespace seaer
