#pragma once

#include <string>

#include "seaer/graph.hpp"

namespace seaer {

// Stream file schema (JSON):
//   {"feature_dim": p, "num_classes": C,
//    "batches": [{"vertices": [...], "labels": [...], "features": [[...], ...]}, ...],
//    "edges": [[u, v, task_tag], ...]}
// The reader validates every stream invariant and reports the offending
// batch/edge index; unknown keys are rejected.
TaskStream read_stream(const std::string& path);
TaskStream parse_stream(const std::string& text, const std::string& origin);
void write_stream(const TaskStream& stream, const std::string& path);
std::string serialize_stream(const TaskStream& stream);

}  // namespace seaer
