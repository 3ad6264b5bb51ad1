#include "falqon/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "falqon/error.hpp"

namespace falqon {

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_parameters, msg); };
  if (!(dt_min > 0)) fail("dt_min must be positive");
  if (!(dt_min <= dt_max)) fail("dt_min must not exceed dt_max");
  if (!(dt_step > 0)) fail("dt_step must be positive");
  if (layers < 1) fail("layers must be at least 1");
  if (instances_per_size < 1) fail("instances must be at least 1");
  if (sizes.empty()) fail("no sizes given");
  for (int n : sizes) {
    if (n < 2 || degree >= n || (n * degree) % 2 != 0) {
      fail("size " + std::to_string(n) + " admits no " + std::to_string(degree) + "-regular graph");
    }
  }
  const std::set<int> all(sizes.begin(), sizes.end());
  for (int n : train_sizes) {
    if (!all.count(n)) fail("train size " + std::to_string(n) + " is not among the sizes");
  }
  if (early_stop.window < 1) fail("early-stop window must be at least 1");
}

std::vector<double> ExperimentConfig::dt_grid() const {
  std::vector<double> grid;
  const double span = (dt_max - dt_min) / dt_step;
  const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
  grid.reserve(static_cast<std::size_t>(std::max(count, 0LL)));
  for (long long i = 0; i < count; ++i) grid.push_back(dt_min + static_cast<double>(i) * dt_step);
  return grid;
}

ExperimentConfig paper_scale_config() {
  ExperimentConfig cfg;
  cfg.sizes = {6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  cfg.train_sizes = {6, 8, 10, 12, 14, 16, 18};
  cfg.instances_per_size = 20;
  cfg.dt_step = 0.001;
  return cfg;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::grid_exhausted: return "grid-exhausted";
    case StopReason::diverged: return "diverged";
    case StopReason::plateau: return "plateau";
  }
  return "unknown";
}

Evaluator native_evaluator(const CostDiagonal& d, const BaselineRecord& baseline, int layers, FeedbackOrder order,
                           const SafeguardParams& safeguards) {
  if (baseline.graph_id != d.graph_id) {
    throw Error(ErrorKind::baseline_mismatch,
                "baseline for " + baseline.graph_id + " used with graph " + d.graph_id);
  }
  return [&d, ground = baseline.ground_energy, layers, order, safeguards](double dt) {
    FeedbackRun run = run_feedback(d, dt, layers, order, safeguards);
    Evaluation out;
    out.energy = run.trajectory.final_energy();
    out.ratio = approximation_ratio(out.energy, ground);
    out.schedule = std::move(run.schedule);
    return out;
  };
}

ScanResult scan_dt(const std::vector<double>& grid, const EarlyStopParams& early_stop, const Evaluator& evaluate,
                   std::string graph_id) {
  if (grid.empty()) throw Error(ErrorKind::empty_grid, "time-step grid is empty");
  ScanResult result;
  result.graph_id = std::move(graph_id);
  result.stop_reason = StopReason::grid_exhausted;
  bool have_best = false;
  int below = 0;

  for (double dt : grid) {
    Evaluation ev;
    try {
      ev = evaluate(dt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::diverged_state) throw;
      result.stop_reason = StopReason::diverged;
      break;
    }
    if (!std::isfinite(ev.ratio)) {
      result.stop_reason = StopReason::diverged;
      break;
    }
    result.curve.push_back({dt, ev.ratio, ev.energy});
    if (!have_best || ev.ratio > result.best_ratio) {
      have_best = true;
      result.best_dt = dt;
      result.best_ratio = ev.ratio;
      result.best_energy = ev.energy;
      result.best_schedule = std::move(ev.schedule);
    }
    // The counter only arms once some point has reached the floor. Small
    // steps can sit below it for a while before the ratio climbs.
    const double threshold = std::max(early_stop.floor, result.best_ratio - early_stop.drop);
    below = result.best_ratio >= early_stop.floor && ev.ratio < threshold ? below + 1 : 0;
    if (below >= early_stop.window) {
      result.stop_reason = StopReason::plateau;
      break;
    }
  }
  if (!have_best) throw Error(ErrorKind::diverged_state, "scan diverged at the first grid point");
  return result;
}

ScanResult scan_dt(const CostDiagonal& d, const BaselineRecord& baseline, const ExperimentConfig& cfg) {
  return scan_dt(cfg.dt_grid(), cfg.early_stop, native_evaluator(d, baseline, cfg.layers, cfg.order, cfg.safeguards),
                 d.graph_id);
}

std::vector<TransferRecord> cross_evaluate(const std::vector<Schedule>& schedules,
                                           const std::vector<TransferTarget>& targets,
                                           const SafeguardParams& safeguards) {
  for (const auto& t : targets) {
    if (t.baseline->graph_id != t.diagonal->graph_id) {
      throw Error(ErrorKind::baseline_mismatch,
                  "baseline for " + t.baseline->graph_id + " paired with graph " + t.diagonal->graph_id);
    }
  }
  std::vector<TransferRecord> records;
  records.reserve(schedules.size() * targets.size());
  for (const auto& s : schedules) {
    for (const auto& t : targets) {
      const Trajectory traj = replay_schedule(*t.diagonal, s, safeguards);
      records.push_back({s.n_train, t.diagonal->n, s.train_graph_id, t.diagonal->graph_id,
                         approximation_ratio(traj.final_energy(), t.baseline->ground_energy)});
    }
  }
  return records;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "no values to average");
  double sum = 0;
  for (double v : values) sum += v;
  MeanStd out;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

std::vector<TransferCell> aggregate_matrix(const std::vector<TransferRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::empty_input, "no transfer records to aggregate");
  std::map<std::pair<int, int>, std::vector<double>> cells;
  for (const auto& r : records) cells[{r.n_train, r.n_target}].push_back(r.ratio);
  std::vector<TransferCell> out;
  out.reserve(cells.size());
  for (const auto& [key, ratios] : cells) {
    const MeanStd ms = mean_std(ratios);
    out.push_back({key.first, key.second, ms.mean, ms.std, static_cast<int>(ratios.size())});
  }
  return out;
}

double PowerLawFit::operator()(double n) const { return coefficient * std::pow(n, exponent); }

PowerLawFit fit_power_law(const std::vector<SizePoint>& points) {
  std::set<int> distinct;
  for (const auto& p : points) {
    if (!(p.dt > 0) || !std::isfinite(p.dt) || p.n < 1) {
      throw Error(ErrorKind::degenerate_input, "power-law fit needs positive n and dt");
    }
    distinct.insert(p.n);
  }
  if (points.size() < 2 || distinct.size() < 2) {
    throw Error(ErrorKind::degenerate_input, "power-law fit needs at least two distinct sizes");
  }
  const double m = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += std::log(static_cast<double>(p.n));
    my += std::log(p.dt);
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    const double dy = std::log(p.dt) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  double ss_res = 0;
  for (const auto& p : points) {
    const double r = std::log(p.dt) - (my + fit.exponent * (std::log(static_cast<double>(p.n)) - mx));
    ss_res += r * r;
  }
  // a constant series is fitted exactly by exponent 0
  fit.r_squared = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace falqon
