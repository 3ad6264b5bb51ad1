#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "falqon/experiment.hpp"
#include "falqon/graph.hpp"
#include "falqon/maxcut.hpp"

// File-handoff stages behind the CLI subcommands. Every stage writes its
// outputs atomically and returns the paths it produced.
namespace falqon::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";

struct StageOptions {
  int jobs = 1;
  int qubit_limit = kDefaultQubitLimit;
  std::ostream* log = nullptr;
};

// ---- generate ---------------------------------------------------------------

struct GenerateRequest {
  std::vector<int> sizes;
  int instances = 10;
  int degree = 3;
  std::uint64_t seed = 0;
  bool require_connected = true;
};

/// Writes g_n{n}_i{index}.json per (size, instance).
std::vector<fs::path> generate(const GenerateRequest& req, const fs::path& out_dir, const StageOptions& opt = {});

// ---- baseline ---------------------------------------------------------------

struct BaselineRequest {
  BaselineMethod method = BaselineMethod::exhaustive;
  std::uint64_t seed = 0;
  AnnealParams anneal{};
};

/// Writes <graph stem>.baseline.json for every graph file.
std::vector<fs::path> baseline(const std::vector<fs::path>& graph_files, const BaselineRequest& req,
                               const fs::path& out_dir, const StageOptions& opt = {});

// ---- loading ----------------------------------------------------------------

struct Instance {
  fs::path graph_path;
  std::string stem;
  Graph graph;
  BaselineRecord baseline;
};

/// JSON files in `dir` matching g_*.json, sorted by (n, name).
std::vector<fs::path> list_graph_files(const fs::path& dir);
/// Accepts directories (expanded with list_graph_files) and plain files.
std::vector<fs::path> expand_graph_inputs(const std::vector<fs::path>& inputs);

/// Pairs each graph with the baseline in `baseline_dir` carrying its graph_id.
std::vector<Instance> load_instances(const std::vector<fs::path>& graph_files, const fs::path& baseline_dir);

// ---- scan -------------------------------------------------------------------

struct SizeSummary {
  int n = 0;
  int instances = 0;
  MeanStd best_dt;
  MeanStd best_ratio;
  struct Entry {
    std::string stem;
    std::string graph_id;
    double best_dt = 0;
    double best_ratio = 0;
    std::string stop_reason;
    int evaluated = 0;
    int safeguard_events = 0;
  };
  std::vector<Entry> graphs;
};

struct ScanStageResult {
  std::vector<fs::path> artifacts;
  std::map<int, SizeSummary> summaries;
};

/// Per graph: curve_<stem>.csv, schedule_<stem>.json, result_<stem>.json.
/// Per size: summary_n{n}.json. With `resume`, graphs whose result file
/// already exists are not rescanned.
ScanStageResult scan(const std::vector<Instance>& instances, const ExperimentConfig& cfg, const fs::path& out_dir,
                     const StageOptions& opt = {}, bool resume = false);

std::string serialize_summary(const SizeSummary& s);
SizeSummary parse_summary(std::string_view text);
/// All summary_n*.json in `dir`, keyed by n.
std::map<int, SizeSummary> load_summaries(const fs::path& dir);

// ---- transfer ---------------------------------------------------------------

struct TransferStageResult {
  std::vector<fs::path> artifacts;
  std::vector<TransferRecord> records;
  std::vector<TransferCell> cells;
  std::size_t skipped_pairs = 0;
};

/// Replays schedule_*.json from `schedule_dir` (restricted to `train_sizes`
/// when non-empty) on every target with n_train <= n_target. Writes
/// transfer_pairs.csv, transfer_matrix.csv and, when native summaries are
/// given, native_vs_transfer.csv.
TransferStageResult transfer(const std::vector<fs::path>& schedule_files, const std::vector<Instance>& targets,
                             const std::map<int, SizeSummary>& native, const std::vector<int>& train_sizes,
                             const fs::path& out_dir, const StageOptions& opt = {});

std::vector<fs::path> list_schedule_files(const fs::path& dir);

// ---- fit / report -----------------------------------------------------------

struct FitStageResult {
  std::vector<fs::path> artifacts;
  PowerLawFit fit;
};

/// fit.json plus fig1_dt_scaling.csv (n, mean_dt, fitted_dt).
FitStageResult fit(const std::map<int, SizeSummary>& summaries, const fs::path& out_dir);

std::string serialize_fit(const PowerLawFit& fit);

/// Collects the three figure tables and the fit into one directory.
std::vector<fs::path> report(const fs::path& scan_dir, const fs::path& transfer_dir, const fs::path& out_dir);

// ---- full pipeline ----------------------------------------------------------

struct RunRequest {
  ExperimentConfig config;
  BaselineRequest baseline;
  bool require_connected = true;
};

struct RunResult {
  std::map<int, SizeSummary> summaries;
  TransferStageResult transfer;
  PowerLawFit fit;
  std::vector<fs::path> artifacts;
};

/// generate -> baseline -> scan -> transfer -> fit -> report under `out_root`,
/// plus manifest.json.
RunResult run_all(const RunRequest& req, const fs::path& out_root, const StageOptions& opt = {});

// ---- manifest / validation --------------------------------------------------

struct Manifest {
  std::string command;
  std::string config_json;  // pre-rendered JSON object
  std::vector<fs::path> artifacts;
  std::vector<std::pair<std::string, double>> timing_seconds;
};

fs::path write_manifest(const Manifest& m, const fs::path& out_dir);

std::string config_to_json(const ExperimentConfig& cfg);

/// Re-parses every artifact under `dir` against its schema; returns the file count.
std::size_t validate_artifacts(const fs::path& dir);

}  // namespace falqon::pipeline
