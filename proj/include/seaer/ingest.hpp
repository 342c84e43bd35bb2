#pragma once

#include <string>
#include <vector>

#include "seaer/graph.hpp"

namespace seaer {

// Class pairs in ascending class order, one task per pair. An odd trailing
// class is dropped (recorded in dropped_classes).
struct TaskPartition {
    std::vector<std::pair<int, int>> class_pairs;
    std::vector<int> dropped_classes;

    int num_tasks() const { return static_cast<int>(class_pairs.size()); }
};

TaskPartition partition_by_class(const std::vector<int>& labels, int classes_per_task = 2);

// Builds a stream from a whitespace-separated edge list, CSV feature rows and
// CSV labels (row i = vertex i). Vertices of dropped classes are removed and
// ids are relabeled densely in task order; edges are tagged with the max
// endpoint task. Errors carry the offending file and line.
TaskStream to_stream(const std::string& edges_path, const std::string& features_path,
                     const std::string& labels_path, const TaskPartition& partition);

}  // namespace seaer
