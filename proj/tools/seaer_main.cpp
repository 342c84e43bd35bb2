#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "seaer/continual.hpp"
#include "seaer/csbm.hpp"
#include "seaer/errors.hpp"
#include "seaer/ingest.hpp"
#include "seaer/metrics.hpp"
#include "seaer/rng.hpp"
#include "seaer/run_io.hpp"
#include "seaer/sha1.hpp"
#include "seaer/stream_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitRuntime = 4;

void apply_thread_cap() {
    if (const char* env = std::getenv("SEAER_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

int cmd_generate(const std::string& config_path, const std::string& out_path) {
    const seaer::CsbmConfig cfg = seaer::read_csbm_config(config_path);
    const seaer::TaskStream stream = seaer::generate_stream(cfg);
    seaer::write_stream(stream, out_path);
    std::cout << "wrote " << out_path << " (" << stream.total_vertices() << " vertices, "
              << stream.edges.size() << " edges, " << stream.num_tasks() << " tasks)\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const seaer::RunSpec spec = seaer::read_run_config(config_path);
    const seaer::TaskStream stream = seaer::read_stream(spec.stream_path);
    const std::string hash = seaer::git_blob_hash_file(spec.stream_path);
    const auto outcomes = seaer::execute_run(spec, stream, hash, out_dir);
    for (const auto& outcome : outcomes) {
        std::cout << "seed " << outcome.seed << ": fap=" << seaer::fap(outcome.result.matrix);
        if (spec.experiment.method != seaer::Method::kJoint)
            std::cout << " faf=" << seaer::faf(outcome.result.matrix);
        std::cout << "\n";
    }
    std::cout << "artifacts in " << out_dir << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    const seaer::SweepSpec spec = seaer::read_sweep_config(config_path);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw seaer::IoError("cannot create output directory " + out_dir);
    const auto rows = seaer::execute_sweep(spec);
    seaer::write_text(out_dir + "/sweep.csv", seaer::sweep_csv(rows));
    int failed = 0;
    for (const auto& row : rows)
        if (!row.ok) {
            ++failed;
            std::cerr << "cell delta=" << row.delta << " p_stage=" << row.p_stage
                      << " seed=" << row.seed << " method=" << row.label << " failed: " << row.error
                      << "\n";
        }
    std::cout << "wrote " << out_dir << "/sweep.csv (" << rows.size() << " rows, " << failed
              << " failed)\n";
    return kExitOk;
}

int cmd_distortion(const std::string& checkpoint_path, const std::string& stream_path,
                   const std::string& out_path, int max_hops, std::uint64_t seed) {
    const seaer::ModelParams model = seaer::load_checkpoint(checkpoint_path);
    const seaer::TaskStream stream = seaer::read_stream(stream_path);
    if (model.in_dim != stream.feature_dim)
        throw seaer::ConfigError("checkpoint expects feature dim " + std::to_string(model.in_dim) +
                                 " but the stream has " + std::to_string(stream.feature_dim));

    const seaer::Graph g = seaer::induce_graph(stream, stream.num_tasks());
    const seaer::Matrix features = stream.stacked_features(stream.num_tasks());
    const seaer::Matrix embeddings = seaer::embeddings_for(model, g, features);

    std::vector<seaer::vertex_t> anchors;
    seaer::SplitRatios ratios;
    for (int i = 0; i < stream.num_tasks(); ++i) {
        const seaer::TaskSplit split =
            seaer::split_task(stream.batches[i], ratios, seaer::split_seed(seed, 0x10 + i));
        anchors.insert(anchors.end(), split.train.begin(), split.train.end());
    }
    const seaer::DistortionProfile profile =
        seaer::distortion_profile(embeddings, g, anchors, max_hops);

    std::string csv = "# seaer-csv v1 distortion slope=" + seaer::format_double(profile.slope) +
                      " alpha_hat=" + seaer::format_double(profile.alpha_hat) +
                      " degenerate=" + (profile.degenerate ? std::string("1") : std::string("0")) +
                      "\nhop,count,mean_distance\n";
    for (const auto& bucket : profile.buckets)
        csv += std::to_string(bucket.hop) + "," + std::to_string(bucket.count) + "," +
               seaer::format_double(bucket.mean_distance) + "\n";
    seaer::write_text(out_path, csv);
    std::cout << "wrote " << out_path << " (slope=" << profile.slope
              << ", alpha_hat=" << profile.alpha_hat << ")\n";
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_path) {
    const std::string csv = seaer::report_csv(run_dirs);
    seaer::write_text(out_path, csv);
    std::cout << "wrote " << out_path << " (" << run_dirs.size() << " runs)\n";
    return kExitOk;
}

int cmd_ingest(const std::string& edges, const std::string& features, const std::string& labels,
               const std::string& out_path, int classes_per_task) {
    std::vector<int> label_values;
    {
        const std::string text = seaer::read_text(labels);
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                if (!cur.empty()) label_values.push_back(std::stoi(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) label_values.push_back(std::stoi(cur));
    }
    const seaer::TaskPartition partition =
        seaer::partition_by_class(label_values, classes_per_task);
    const seaer::TaskStream stream = seaer::to_stream(edges, features, labels, partition);
    seaer::write_stream(stream, out_path);
    std::cout << "wrote " << out_path << " (" << stream.num_tasks() << " tasks, "
              << stream.total_vertices() << " vertices)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"node-wise graph continual learning lab"};
    app.require_subcommand(1);

    std::string config_path, out_path, checkpoint_path, stream_path;
    std::string edges_path, features_path, labels_path;
    std::vector<std::string> run_dirs;
    int max_hops = 5;
    int classes_per_task = 2;
    std::uint64_t seed = 0;

    auto* generate = app.add_subcommand("generate", "generate a synthetic cSBM stream");
    generate->add_option("--config", config_path, "generator config (JSON)")->required();
    generate->add_option("--out", out_path, "output stream file")->required();

    auto* run = app.add_subcommand("run", "run one continual-learning experiment");
    run->add_option("--config", config_path, "run config (JSON)")->required();
    run->add_option("--out", out_path, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "grid of cSBM shift configurations");
    sweep->add_option("--config", config_path, "sweep config (JSON)")->required();
    sweep->add_option("--out", out_path, "output directory")->required();

    auto* distortion = app.add_subcommand("distortion", "embedding-vs-hop distortion profile");
    distortion->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    distortion->add_option("--stream", stream_path, "stream file")->required();
    distortion->add_option("--out", out_path, "output CSV")->required();
    distortion->add_option("--max-hops", max_hops, "bucket range (default 5)");
    distortion->add_option("--seed", seed, "split seed for the anchor set (default 0)");

    auto* report = app.add_subcommand("report", "aggregate run directories into a summary table");
    report->add_option("--out", out_path, "output CSV")->required();
    report->add_option("dirs", run_dirs, "run output directories")->required();

    auto* ingest = app.add_subcommand("ingest", "convert raw node-classification files to a stream");
    ingest->add_option("--edges", edges_path, "whitespace-separated edge list")->required();
    ingest->add_option("--features", features_path, "CSV feature rows")->required();
    ingest->add_option("--labels", labels_path, "one label per line")->required();
    ingest->add_option("--out", out_path, "output stream file")->required();
    ingest->add_option("--classes-per-task", classes_per_task, "classes per task (default 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, out_path);
        if (run->parsed()) return cmd_run(config_path, out_path);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path);
        if (distortion->parsed())
            return cmd_distortion(checkpoint_path, stream_path, out_path, max_hops, seed);
        if (report->parsed()) return cmd_report(run_dirs, out_path);
        if (ingest->parsed())
            return cmd_ingest(edges_path, features_path, labels_path, out_path, classes_per_task);
    } catch (const seaer::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const seaer::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
