#include "seaer/run_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "seaer/errors.hpp"
#include "seaer/metrics.hpp"
#include "seaer/sha1.hpp"
#include "seaer/stream_io.hpp"

namespace seaer {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || key == k;
        if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

json load_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

template <typename T>
T get_required(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key)) throw ConfigError(origin + ": missing key \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": bad value for \"" + key + "\": " + e.what());
    }
}

CsbmConfig csbm_from_json(const json& j, const std::string& origin, bool require_seed) {
    check_keys(j,
               {"n_per_stage", "p_dim", "mu", "p_intra", "p_inter", "p_stage", "delta",
                "num_stages", "seed", "symmetric_labels", "consecutive_only"},
               origin);
    CsbmConfig cfg;
    cfg.n_per_stage = get_or(j, "n_per_stage", cfg.n_per_stage);
    cfg.p_dim = get_or(j, "p_dim", cfg.p_dim);
    cfg.mu = get_or(j, "mu", cfg.mu);
    cfg.p_intra = get_or(j, "p_intra", cfg.p_intra);
    cfg.p_inter = get_or(j, "p_inter", cfg.p_inter);
    cfg.p_stage = get_or(j, "p_stage", cfg.p_stage);
    cfg.delta = get_or(j, "delta", cfg.delta);
    cfg.num_stages = get_or(j, "num_stages", cfg.num_stages);
    if (require_seed)
        cfg.seed = get_required<std::uint64_t>(j, "seed", origin);
    else
        cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.symmetric_labels = get_or(j, "symmetric_labels", cfg.symmetric_labels);
    cfg.consecutive_only = get_or(j, "consecutive_only", cfg.consecutive_only);
    validate_config(cfg);
    return cfg;
}

TrainConfig train_from_json(const json& j, const std::string& origin) {
    check_keys(j,
               {"learning_rate", "weight_decay", "epochs", "hidden_dim", "arch",
                "last_activation"},
               origin + ".train");
    TrainConfig t;
    t.learning_rate = get_or(j, "learning_rate", t.learning_rate);
    t.weight_decay = get_or(j, "weight_decay", t.weight_decay);
    t.epochs = get_or(j, "epochs", t.epochs);
    t.hidden_dim = get_or(j, "hidden_dim", t.hidden_dim);
    if (j.contains("arch")) t.arch = arch_from_string(j.at("arch").get<std::string>());
    if (j.contains("last_activation")) {
        const std::string act = j.at("last_activation").get<std::string>();
        if (act == "sigmoid")
            t.last_act = LastActivation::kSigmoid;
        else if (act == "relu")
            t.last_act = LastActivation::kRelu;
        else
            throw ConfigError(origin + ": unknown last_activation \"" + act + "\"");
    }
    if (t.learning_rate <= 0.0) throw ConfigError(origin + ": learning_rate must be positive");
    if (t.epochs < 1) throw ConfigError(origin + ": epochs must be >= 1");
    if (t.hidden_dim < 1) throw ConfigError(origin + ": hidden_dim must be >= 1");
    return t;
}

// method-level keys shared by run configs and sweep method entries
ExperimentConfig experiment_from_json(const json& j, const std::string& origin) {
    check_keys(j,
               {"method", "strategy", "alignment", "stratify", "budget_fraction",
                "budget_absolute", "ratios", "train", "kernel_scales", "beta_bounds", "label",
                "stream", "seeds"},
               origin);
    ExperimentConfig cfg;
    cfg.method = method_from_string(get_required<std::string>(j, "method", origin));
    if (j.contains("strategy")) {
        const std::string s = j.at("strategy").get<std::string>();
        if (s == "influence")
            throw ConfigError(origin +
                              ": influence-score selection is unavailable; choose one of "
                              "kcenter_greedy, kcenter_sampling, degree_distance, random, "
                              "top_degree, representation");
        cfg.strategy = strategy_from_string(s);
    }
    cfg.alignment = get_or(j, "alignment", false);
    cfg.stratify = get_or(j, "stratify", true);
    if (j.contains("budget_fraction") && j.contains("budget_absolute"))
        throw ConfigError(origin + ": budget_fraction and budget_absolute are exclusive");
    cfg.budget_fraction = get_or(j, "budget_fraction", cfg.budget_fraction);
    cfg.budget_absolute = get_or(j, "budget_absolute", cfg.budget_absolute);
    if (j.contains("ratios")) {
        const auto r = j.at("ratios").get<std::vector<double>>();
        if (r.size() != 3) throw ConfigError(origin + ": ratios must be [train, valid, test]");
        cfg.ratios = {r[0], r[1], r[2]};
    }
    if (j.contains("train")) cfg.train = train_from_json(j.at("train"), origin);
    if (j.contains("kernel_scales")) {
        cfg.kernel.scales = j.at("kernel_scales").get<std::vector<double>>();
        if (cfg.kernel.scales.empty()) throw ConfigError(origin + ": kernel_scales is empty");
    }
    if (j.contains("beta_bounds")) {
        const auto b = j.at("beta_bounds").get<std::vector<double>>();
        if (b.size() != 2 || !(b[0] >= 0.0) || !(b[0] < b[1]))
            throw ConfigError(origin + ": beta_bounds must be [lower, upper] with 0 <= lower < upper");
        cfg.bounds = {b[0], b[1]};
    }
    return cfg;
}

std::string default_label(const ExperimentConfig& cfg) {
    switch (cfg.method) {
        case Method::kBare: return "bare";
        case Method::kJoint: return "joint";
        case Method::kReplay: {
            std::string label = "er:" + to_string(cfg.strategy);
            if (cfg.alignment) label += "+sa";
            return label;
        }
    }
    return "?";
}

std::vector<std::uint64_t> seeds_from_json(const json& j, const std::string& origin) {
    if (j.is_number_unsigned() || j.is_number_integer()) {
        const std::int64_t n = j.get<std::int64_t>();
        if (n < 1) throw ConfigError(origin + ": seed count must be >= 1");
        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) seeds[i] = static_cast<std::uint64_t>(i);
        return seeds;
    }
    auto seeds = j.get<std::vector<std::uint64_t>>();
    if (seeds.empty()) throw ConfigError(origin + ": seeds must be nonempty");
    return seeds;
}

json experiment_to_json(const ExperimentConfig& cfg) {
    json j;
    j["method"] = to_string(cfg.method);
    if (cfg.method == Method::kReplay) {
        j["strategy"] = to_string(cfg.strategy);
        j["alignment"] = cfg.alignment;
        j["stratify"] = cfg.stratify;
        if (cfg.budget_absolute >= 0)
            j["budget_absolute"] = cfg.budget_absolute;
        else
            j["budget_fraction"] = cfg.budget_fraction;
        j["kernel_scales"] = cfg.kernel.scales;
        j["beta_bounds"] = {cfg.bounds.lower, cfg.bounds.upper};
    }
    j["ratios"] = {cfg.ratios.train, cfg.ratios.valid, cfg.ratios.test};
    j["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"weight_decay", cfg.train.weight_decay},
                  {"epochs", cfg.train.epochs},
                  {"hidden_dim", cfg.train.hidden_dim},
                  {"arch", to_string(cfg.train.arch)},
                  {"last_activation",
                   cfg.train.last_act == LastActivation::kSigmoid ? "sigmoid" : "relu"}};
    return j;
}

}  // namespace

CsbmConfig parse_csbm_config(const std::string& text, const std::string& origin) {
    return csbm_from_json(load_json(text, origin), origin, /*require_seed=*/true);
}

CsbmConfig read_csbm_config(const std::string& path) {
    return parse_csbm_config(read_text(path), path);
}

RunSpec parse_run_config(const std::string& text, const std::string& origin) {
    const json j = load_json(text, origin);
    RunSpec spec;
    spec.experiment = experiment_from_json(j, origin);
    spec.stream_path = get_required<std::string>(j, "stream", origin);
    if (!j.contains("seeds")) throw ConfigError(origin + ": missing key \"seeds\"");
    spec.seeds = seeds_from_json(j.at("seeds"), origin);
    spec.label = get_or<std::string>(j, "label", default_label(spec.experiment));
    return spec;
}

RunSpec read_run_config(const std::string& path) { return parse_run_config(read_text(path), path); }

SweepSpec parse_sweep_config(const std::string& text, const std::string& origin) {
    const json j = load_json(text, origin);
    check_keys(j, {"csbm", "deltas", "p_stages", "seeds", "methods"}, origin);
    SweepSpec spec;
    spec.csbm = j.contains("csbm") ? csbm_from_json(j.at("csbm"), origin + ".csbm", false)
                                   : CsbmConfig{};
    spec.deltas = get_required<std::vector<int>>(j, "deltas", origin);
    spec.p_stages = get_required<std::vector<double>>(j, "p_stages", origin);
    if (!j.contains("seeds")) throw ConfigError(origin + ": missing key \"seeds\"");
    spec.seeds = seeds_from_json(j.at("seeds"), origin);
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw ConfigError(origin + ": methods must be a nonempty array");
    int k = 0;
    for (const auto& jm : j.at("methods")) {
        const std::string where = origin + ".methods[" + std::to_string(k++) + "]";
        SweepMethod method;
        method.experiment = experiment_from_json(jm, where);
        method.label = get_or<std::string>(jm, "label", default_label(method.experiment));
        spec.methods.push_back(std::move(method));
    }
    if (spec.deltas.empty() || spec.p_stages.empty())
        throw ConfigError(origin + ": deltas and p_stages must be nonempty");
    return spec;
}

SweepSpec read_sweep_config(const std::string& path) {
    return parse_sweep_config(read_text(path), path);
}

std::string matrix_csv(const PerformanceMatrix& m) {
    const int stages = m.num_stages();
    int tasks = 0;
    for (const auto& row : m.rows) tasks = std::max(tasks, static_cast<int>(row.size()));
    std::string out = "# seaer-csv v1 performance-matrix\nstage";
    for (int j = 1; j <= tasks; ++j) out += ",task" + std::to_string(j);
    out += "\n";
    for (int i = 0; i < stages; ++i) {
        out += std::to_string(i + 1);
        for (int j = 0; j < tasks; ++j) {
            out += ",";
            if (j < static_cast<int>(m.rows[i].size())) out += format_double(m.rows[i][j]);
        }
        out += "\n";
    }
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

std::vector<SeedOutcome> execute_run(const RunSpec& spec, const TaskStream& stream,
                                     const std::string& stream_hash, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["label"] = spec.label;
    manifest["config"] = experiment_to_json(spec.experiment);
    manifest["stream"] = spec.stream_path;
    manifest["stream_hash"] = stream_hash;
    manifest["seeds"] = spec.seeds;
    manifest["status"] = "running";
    write_text(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    std::vector<SeedOutcome> outcomes;
    json metrics;
    metrics["per_seed"] = json::array();
    json buffers_log = json::object();
    json timings = json::object();
    try {
        for (std::uint64_t seed : spec.seeds) {
            SeedOutcome outcome;
            outcome.seed = seed;
            outcome.result = spec.experiment.method == Method::kJoint
                                 ? run_joint(stream, spec.experiment, seed)
                                 : run_continual(stream, spec.experiment, seed);
            const std::string tag = "seed" + std::to_string(seed);
            write_text(out_dir + "/matrix_" + tag + ".csv", matrix_csv(outcome.result.matrix));
            save_checkpoint(outcome.result.model, out_dir + "/checkpoint_" + tag + ".bin");

            json betas = json::array();
            for (const auto& b : outcome.result.betas) betas.push_back(b);
            write_text(out_dir + "/betas_" + tag + ".json", betas.dump() + "\n");

            json buf = json::array();
            for (const auto& ids : outcome.result.buffers) buf.push_back(ids);
            buffers_log[tag] = std::move(buf);
            timings[tag] = outcome.result.seconds;

            json row;
            row["seed"] = seed;
            row["fap"] = fap(outcome.result.matrix);
            row["faf"] = spec.experiment.method == Method::kJoint
                             ? json(nullptr)
                             : json(faf(outcome.result.matrix));
            metrics["per_seed"].push_back(std::move(row));
            outcomes.push_back(std::move(outcome));
        }
    } catch (...) {
        manifest["status"] = "failed";
        write_text(out_dir + "/manifest.json", manifest.dump(2) + "\n");
        throw;
    }

    const auto aggregate = [&](const char* key) {
        std::vector<double> xs;
        for (const auto& row : metrics["per_seed"])
            if (!row.at(key).is_null()) xs.push_back(row.at(key).get<double>());
        json agg;
        if (xs.empty()) {
            agg["mean"] = nullptr;
            agg["std"] = nullptr;
            return agg;
        }
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        agg["mean"] = mean;
        agg["std"] = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
        return agg;
    };
    metrics["fap"] = aggregate("fap");
    metrics["faf"] = aggregate("faf");
    write_text(out_dir + "/metrics.json", metrics.dump(2) + "\n");

    manifest["status"] = "ok";
    manifest["buffers"] = std::move(buffers_log);
    manifest["timings"] = std::move(timings);
    json artifacts = json::array();
    for (std::uint64_t seed : spec.seeds) {
        const std::string tag = "seed" + std::to_string(seed);
        artifacts.push_back("matrix_" + tag + ".csv");
        artifacts.push_back("betas_" + tag + ".json");
        artifacts.push_back("checkpoint_" + tag + ".bin");
    }
    artifacts.push_back("metrics.json");
    manifest["artifacts"] = std::move(artifacts);
    write_text(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return outcomes;
}

std::vector<SweepRow> execute_sweep(const SweepSpec& spec) {
    struct Cell {
        int delta;
        double p_stage;
        std::uint64_t seed;
        const SweepMethod* method;
    };
    std::vector<Cell> cells;
    for (int delta : spec.deltas)
        for (double p_stage : spec.p_stages)
            for (std::uint64_t seed : spec.seeds)
                for (const auto& method : spec.methods)
                    cells.push_back({delta, p_stage, seed, &method});

    std::vector<SweepRow> rows(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        SweepRow row;
        row.delta = cell.delta;
        row.p_stage = cell.p_stage;
        row.seed = cell.seed;
        row.label = cell.method->label;
        try {
            CsbmConfig csbm = spec.csbm;
            csbm.delta = cell.delta;
            csbm.p_stage = cell.p_stage;
            csbm.seed = cell.seed;
            const TaskStream stream = generate_stream(csbm);
            const RunResult result =
                cell.method->experiment.method == Method::kJoint
                    ? run_joint(stream, cell.method->experiment, cell.seed)
                    : run_continual(stream, cell.method->experiment, cell.seed);
            row.fap = fap(result.matrix);
            row.faf = cell.method->experiment.method == Method::kJoint ? 0.0 : faf(result.matrix);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows[c] = std::move(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "# seaer-csv v1 sweep\ndelta,p_stage,seed,method,fap,faf,status\n";
    for (const auto& row : rows) {
        out += std::to_string(row.delta) + "," + format_double(row.p_stage) + "," +
               std::to_string(row.seed) + "," + row.label + ",";
        if (row.ok)
            out += format_double(row.fap) + "," + format_double(row.faf) + ",ok\n";
        else
            out += ",,failed\n";
    }
    return out;
}

std::string report_csv(const std::vector<std::string>& run_dirs) {
    std::string out = "# seaer-csv v1 report\nrun,label,seeds,fap_mean,fap_std,faf_mean,faf_std\n";
    for (const std::string& dir : run_dirs) {
        const json manifest = load_json(read_text(dir + "/manifest.json"), dir + "/manifest.json");
        const json metrics = load_json(read_text(dir + "/metrics.json"), dir + "/metrics.json");
        out += dir + "," + manifest.at("label").get<std::string>() + ",";
        out += std::to_string(metrics.at("per_seed").size()) + ",";
        const auto cell = [&](const json& agg, const char* key) -> std::string {
            return agg.at(key).is_null() ? std::string("NA")
                                         : format_double(agg.at(key).get<double>());
        };
        out += cell(metrics.at("fap"), "mean") + "," + cell(metrics.at("fap"), "std") + ",";
        out += cell(metrics.at("faf"), "mean") + "," + cell(metrics.at("faf"), "std") + "\n";
    }
    return out;
}

}  // namespace seaer
