#include "seaer/stream_io.hpp"

#include <fstream>
#include <json.hpp>

#include "seaer/errors.hpp"

namespace seaer {

using nlohmann::json;

namespace {

void require_keys(const json& j, std::initializer_list<const char*> required,
                  const std::string& where) {
    for (const char* k : required)
        if (!j.contains(k)) throw ConfigError(where + ": missing key \"" + k + "\"");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : required) known = known || key == k;
        if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

}  // namespace

TaskStream parse_stream(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        require_keys(j, {"feature_dim", "num_classes", "batches", "edges"}, origin);
        TaskStream stream;
        stream.feature_dim = j.at("feature_dim").get<int>();
        stream.num_classes = j.at("num_classes").get<int>();
        int bi = 0;
        for (const auto& jb : j.at("batches")) {
            const std::string where = origin + ": batches[" + std::to_string(bi) + "]";
            require_keys(jb, {"vertices", "labels", "features"}, where);
            VertexBatch batch;
            batch.vertex_ids = jb.at("vertices").get<std::vector<vertex_t>>();
            batch.labels = jb.at("labels").get<std::vector<int>>();
            const auto& jf = jb.at("features");
            batch.features = Matrix(static_cast<int>(jf.size()), stream.feature_dim);
            int r = 0;
            for (const auto& row : jf) {
                if (static_cast<int>(row.size()) != stream.feature_dim)
                    throw ConfigError(where + ".features[" + std::to_string(r) + "]: expected " +
                                      std::to_string(stream.feature_dim) + " values, got " +
                                      std::to_string(row.size()));
                for (int c = 0; c < stream.feature_dim; ++c)
                    batch.features(r, c) = row[c].get<double>();
                ++r;
            }
            stream.batches.push_back(std::move(batch));
            ++bi;
        }
        int ei = 0;
        for (const auto& je : j.at("edges")) {
            if (!je.is_array() || je.size() != 3)
                throw ConfigError(origin + ": edges[" + std::to_string(ei) +
                                  "]: expected [u, v, task_tag]");
            stream.edges.push_back(
                {je[0].get<vertex_t>(), je[1].get<vertex_t>(), je[2].get<int>()});
            ++ei;
        }
        validate_stream(stream);
        return stream;
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

TaskStream read_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open stream file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_stream(text, path);
}

std::string serialize_stream(const TaskStream& stream) {
    json j;
    j["feature_dim"] = stream.feature_dim;
    j["num_classes"] = stream.num_classes;
    j["batches"] = json::array();
    for (const auto& batch : stream.batches) {
        json jb;
        jb["vertices"] = batch.vertex_ids;
        jb["labels"] = batch.labels;
        json rows = json::array();
        for (int r = 0; r < batch.features.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < batch.features.cols; ++c) row.push_back(batch.features(r, c));
            rows.push_back(std::move(row));
        }
        jb["features"] = std::move(rows);
        j["batches"].push_back(std::move(jb));
    }
    j["edges"] = json::array();
    for (const auto& e : stream.edges) j["edges"].push_back({e.u, e.v, e.task});
    return j.dump();
}

void write_stream(const TaskStream& stream, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write stream file " + path);
    out << serialize_stream(stream) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace seaer
