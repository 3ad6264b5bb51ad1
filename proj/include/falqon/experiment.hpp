#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "falqon/engine.hpp"
#include "falqon/maxcut.hpp"

namespace falqon {

/// Stop an ascending scan after `window` consecutive points whose ratio is
/// below max(floor, best_so_far - drop). Points before the best ratio first
/// reaches `floor` never count toward the window.
struct EarlyStopParams {
  int window = 5;
  double drop = 0.2;
  double floor = 0.5;
};

struct ExperimentConfig {
  std::vector<int> sizes{6, 8, 10, 12, 14, 16};
  std::vector<int> train_sizes{6, 8, 10, 12, 14, 16};
  int instances_per_size = 10;
  int degree = 3;
  int layers = 16;
  double dt_min = 0.1;
  double dt_max = 1.0;
  double dt_step = 0.005;
  FeedbackOrder order = FeedbackOrder::second;
  std::uint64_t master_seed = 0;
  EarlyStopParams early_stop{};
  SafeguardParams safeguards{};

  /// Throws invalid-parameters when an invariant fails.
  void validate() const;
  /// dt_min + i * dt_step for every i keeping the value <= dt_max (1e-9 slack).
  std::vector<double> dt_grid() const;
};

/// Paper-scale protocol: sizes 6..24, 20 instances, step 0.001.
ExperimentConfig paper_scale_config();

enum class StopReason { grid_exhausted, diverged, plateau };
std::string to_string(StopReason reason);

struct ScanPoint {
  double dt = 0;
  double ratio = 0;
  double energy = 0;
};

struct ScanResult {
  std::string graph_id;
  double best_dt = 0;
  double best_ratio = 0;
  double best_energy = 0;
  Schedule best_schedule;
  std::vector<ScanPoint> curve;
  StopReason stop_reason = StopReason::grid_exhausted;
};

struct Evaluation {
  double ratio = 0;
  double energy = 0;
  Schedule schedule;
};

/// dt -> final-layer outcome. Throwing diverged-state (or returning a
/// non-finite ratio) ends the scan with StopReason::diverged.
using Evaluator = std::function<Evaluation(double dt)>;

Evaluator native_evaluator(const CostDiagonal& d, const BaselineRecord& baseline, int layers, FeedbackOrder order,
                           const SafeguardParams& safeguards = {});

/// Ascending scan over `grid` with early stopping; ties go to the smallest dt.
ScanResult scan_dt(const std::vector<double>& grid, const EarlyStopParams& early_stop, const Evaluator& evaluate,
                   std::string graph_id = {});

/// Native scan of one graph under `cfg`.
ScanResult scan_dt(const CostDiagonal& d, const BaselineRecord& baseline, const ExperimentConfig& cfg);

struct TransferTarget {
  const CostDiagonal* diagonal = nullptr;
  const BaselineRecord* baseline = nullptr;
};

struct TransferRecord {
  int n_train = 0;
  int n_target = 0;
  std::string train_graph_id;
  std::string target_graph_id;
  double ratio = 0;
};

/// Replays every schedule on every target, schedule-major.
std::vector<TransferRecord> cross_evaluate(const std::vector<Schedule>& schedules,
                                           const std::vector<TransferTarget>& targets,
                                           const SafeguardParams& safeguards = {});

struct TransferCell {
  int n_train = 0;
  int n_target = 0;
  double mean_ratio = 0;
  double std_ratio = 0;  // population
  int pair_count = 0;
};

/// One cell per (n_train, n_target), sorted by that key.
std::vector<TransferCell> aggregate_matrix(const std::vector<TransferRecord>& records);

struct PowerLawFit {
  double coefficient = 0;
  double exponent = 0;
  double r_squared = 0;

  double operator()(double n) const;
};

struct SizePoint {
  int n = 0;
  double dt = 0;
};

/// Least squares of ln dt on ln n: dt ~ coefficient * n^exponent.
PowerLawFit fit_power_law(const std::vector<SizePoint>& points);

struct MeanStd {
  double mean = 0;
  double std = 0;  // population
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace falqon
