#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seaer/continual.hpp"
#include "seaer/csbm.hpp"

namespace seaer {

inline constexpr const char* kToolVersion = "0.1.0";

std::string format_double(double v);  // shortest round-trip decimal

// ---- configs (strict JSON: unknown keys are rejected) ----

// cSBM generator config. "seed" is required, everything else defaults.
CsbmConfig parse_csbm_config(const std::string& text, const std::string& origin);
CsbmConfig read_csbm_config(const std::string& path);

struct RunSpec {
    std::string stream_path;
    ExperimentConfig experiment;
    std::vector<std::uint64_t> seeds;
    std::string label;  // method label used in reports
};

RunSpec parse_run_config(const std::string& text, const std::string& origin);
RunSpec read_run_config(const std::string& path);

struct SweepMethod {
    ExperimentConfig experiment;
    std::string label;
};

struct SweepSpec {
    CsbmConfig csbm;  // delta / p_stage / seed filled per cell
    std::vector<int> deltas;
    std::vector<double> p_stages;
    std::vector<std::uint64_t> seeds;
    std::vector<SweepMethod> methods;
};

SweepSpec parse_sweep_config(const std::string& text, const std::string& origin);
SweepSpec read_sweep_config(const std::string& path);

// ---- artifacts ----

std::string matrix_csv(const PerformanceMatrix& m);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

struct SeedOutcome {
    std::uint64_t seed = 0;
    RunResult result;
};

// Runs every seed of the spec and writes manifest.json, matrix_seed<k>.csv,
// metrics.json, betas_seed<k>.json and checkpoint_seed<k>.bin under out_dir.
// The manifest is written up front and finalized afterwards.
std::vector<SeedOutcome> execute_run(const RunSpec& spec, const TaskStream& stream,
                                     const std::string& stream_hash, const std::string& out_dir);

struct SweepRow {
    int delta = 0;
    double p_stage = 0.0;
    std::uint64_t seed = 0;
    std::string label;
    double fap = 0.0;
    double faf = 0.0;
    bool ok = false;
    std::string error;
};

// Grid of (delta, p_stage, seed, method) cells; cells run independently (in
// parallel when OpenMP threads are available) and failures are recorded
// without stopping the sweep. Rows come back in deterministic grid order.
std::vector<SweepRow> execute_sweep(const SweepSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Aggregates run directories (manifest.json + metrics.json) into one summary
// CSV with mean/std FAP and FAF per directory.
std::string report_csv(const std::vector<std::string>& run_dirs);

}  // namespace seaer
