#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "seaer/errors.hpp"
#include "seaer/ingest.hpp"
#include "seaer/stream_io.hpp"

using namespace seaer;

namespace {

struct TempFiles {
    std::string dir;
    explicit TempFiles(const std::string& name) : dir("/tmp/seaer_ingest_" + name) {
        std::filesystem::create_directories(dir);
    }
    ~TempFiles() { std::filesystem::remove_all(dir); }
    std::string write(const std::string& name, const std::string& content) {
        const std::string path = dir + "/" + name;
        std::ofstream out(path);
        out << content;
        return path;
    }
};

}  // namespace

TEST_CASE("partition_by_class") {
    SUBCASE("40 classes make 20 tasks") {
        std::vector<int> labels;
        for (int c = 0; c < 40; ++c) labels.push_back(c);
        const TaskPartition part = partition_by_class(labels);
        CHECK(part.num_tasks() == 20);
        CHECK(part.class_pairs[0] == std::pair<int, int>{0, 1});
        CHECK(part.class_pairs[19] == std::pair<int, int>{38, 39});
        CHECK(part.dropped_classes.empty());
    }
    SUBCASE("odd trailing class is dropped") {
        std::vector<int> labels{0, 1, 2, 3, 4, 5, 6};
        const TaskPartition part = partition_by_class(labels);
        CHECK(part.num_tasks() == 3);
        CHECK(part.dropped_classes == std::vector<int>{6});
    }
    SUBCASE("kept plus dropped covers every class") {
        std::vector<int> labels{3, 9, 4, 0, 7};
        const TaskPartition part = partition_by_class(labels);
        std::set<int> covered(part.dropped_classes.begin(), part.dropped_classes.end());
        for (const auto& [a, b] : part.class_pairs) {
            covered.insert(a);
            covered.insert(b);
        }
        CHECK(covered == std::set<int>{0, 3, 4, 7, 9});
    }
    SUBCASE("fewer than two classes rejected") {
        std::vector<int> labels{1, 1, 1};
        CHECK_THROWS_AS(partition_by_class(labels), std::invalid_argument);
    }
}

TEST_CASE("to_stream builds a valid relabeled stream") {
    TempFiles tmp("basic");
    // 6 vertices, 3 classes; class 2 is dropped -> one 2-class task of 4 vertices
    const std::string labels = tmp.write("labels.txt", "0\n1\n0\n1\n2\n2\n");
    const std::string features =
        tmp.write("features.csv", "0.5,1\n1.5,0\n0.25,1\n1.75,0\n9,9\n8,8\n");
    const std::string edges = tmp.write("edges.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n");

    std::vector<int> label_values{0, 1, 0, 1, 2, 2};
    const TaskPartition part = partition_by_class(label_values);
    const TaskStream stream = to_stream(edges, features, labels, part);

    CHECK(stream.num_tasks() == 1);
    CHECK(stream.total_vertices() == 4);
    CHECK(stream.feature_dim == 2);
    // edges among kept vertices survive, edges to dropped class 2 vanish
    CHECK(stream.edges.size() == 3);
    for (const auto& e : stream.edges) CHECK(e.task == 1);
    validate_stream(stream);
}

TEST_CASE("to_stream round-trips through the stream file format") {
    TempFiles tmp("roundtrip");
    const std::string labels = tmp.write("labels.txt", "0\n0\n1\n1\n2\n2\n3\n3\n");
    const std::string features =
        tmp.write("features.csv", "1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n8,0\n");
    const std::string edges = tmp.write("edges.txt", "0 2\n1 3\n4 6\n5 7\n0 4\n3 7\n");

    std::vector<int> label_values{0, 0, 1, 1, 2, 2, 3, 3};
    const TaskStream stream =
        to_stream(edges, features, labels, partition_by_class(label_values));
    const std::string path = tmp.dir + "/stream.json";
    write_stream(stream, path);
    const TaskStream back = read_stream(path);
    const std::string path2 = tmp.dir + "/stream2.json";
    write_stream(back, path2);
    std::ifstream a(path), b(path2);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("edge tags match a naive recomputation") {
    TempFiles tmp("tags");
    // 2 tasks: classes {0,1} and {2,3}; vertex task known from its class
    const std::string labels = tmp.write("labels.txt", "0\n2\n1\n3\n0\n2\n");
    const std::string features = tmp.write("features.csv", "1\n2\n3\n4\n5\n6\n");
    const std::string edges = tmp.write("edges.txt", "0 1\n0 2\n1 3\n2 4\n3 5\n");

    std::vector<int> label_values{0, 2, 1, 3, 0, 2};
    const TaskStream stream =
        to_stream(edges, features, labels, partition_by_class(label_values));
    // recompute task membership from the batches and re-derive every tag
    std::vector<int> task_of(stream.total_vertices());
    for (int t = 0; t < stream.num_tasks(); ++t)
        for (vertex_t v : stream.batches[t].vertex_ids) task_of[v] = t + 1;
    for (const auto& e : stream.edges)
        CHECK(e.task == std::max(task_of[e.u], task_of[e.v]));
}

TEST_CASE("inconsistent inputs are reported with their line") {
    TempFiles tmp("errors");
    const std::string labels = tmp.write("labels.txt", "0\n1\n0\n1\n");
    SUBCASE("bad feature cell") {
        const std::string features = tmp.write("features.csv", "1,2\n3,4\nxx,6\n7,8\n");
        const std::string edges = tmp.write("edges.txt", "0 1\n");
        CHECK_THROWS_WITH_AS(
            to_stream(edges, features, labels, partition_by_class({0, 1, 0, 1})),
            doctest::Contains("features.csv:3"), ConfigError);
    }
    SUBCASE("feature row count mismatch") {
        const std::string features = tmp.write("features.csv", "1,2\n3,4\n5,6\n");
        const std::string edges = tmp.write("edges.txt", "0 1\n");
        CHECK_THROWS_AS(to_stream(edges, features, labels, partition_by_class({0, 1, 0, 1})),
                        ConfigError);
    }
    SUBCASE("edge referencing a missing vertex") {
        const std::string features = tmp.write("features.csv", "1,2\n3,4\n5,6\n7,8\n");
        const std::string edges = tmp.write("edges.txt", "0 9\n");
        CHECK_THROWS_WITH_AS(
            to_stream(edges, features, labels, partition_by_class({0, 1, 0, 1})),
            doctest::Contains("edges.txt:1"), ConfigError);
    }
    SUBCASE("missing file is an io error") {
        CHECK_THROWS_AS(to_stream(tmp.dir + "/nope.txt", tmp.dir + "/nope.csv", labels,
                                  partition_by_class({0, 1, 0, 1})),
                        IoError);
    }
}
