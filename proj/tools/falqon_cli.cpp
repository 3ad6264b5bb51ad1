// falqon: command-line driver for the feedback-optimization transfer pipeline.
//
//   falqon generate  --sizes 6,8 --instances 10 --seed 7 --out data/graphs
//   falqon baseline  --graphs data/graphs --out data/baselines
//   falqon scan      --graphs data/graphs --baselines data/baselines --out data/scan
//   falqon transfer  --schedules data/scan --graphs data/graphs --baselines data/baselines --out data/transfer
//   falqon fit       --summaries data/scan --out data/fit
//   falqon report    --scan data/scan --transfer data/transfer --out data/report
//   falqon run       --out data            (all of the above)
//
// Exit codes: 0 success, 1 user error, 2 internal invariant violation.

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "falqon/engine.hpp"
#include "falqon/error.hpp"
#include "falqon/experiment.hpp"
#include "falqon/io.hpp"
#include "falqon/pipeline.hpp"

namespace fs = std::filesystem;
using namespace falqon;

namespace {

constexpr int kForcedQubitLimit = 34;

struct CommonFlags {
  int jobs = 1;
  bool force = false;
  bool validate = false;
  bool quiet = false;

  pipeline::StageOptions stage() const {
    pipeline::StageOptions opt;
    opt.jobs = jobs;
    opt.qubit_limit = force ? kForcedQubitLimit : kDefaultQubitLimit;
    opt.log = quiet ? nullptr : &std::cerr;
    return opt;
  }
};

struct ConfigFlags {
  std::vector<int> sizes;
  std::vector<int> train_sizes;
  int instances = -1;
  int degree = 3;
  int layers = 16;
  double dt_min = 0.1;
  double dt_max = 1.0;
  double dt_step = -1;
  int order = 2;
  std::uint64_t seed = 0;
  bool paper_scale = false;
  double beta_max = 10.0;

  ExperimentConfig build() const {
    ExperimentConfig cfg = paper_scale ? paper_scale_config() : ExperimentConfig{};
    if (!sizes.empty()) cfg.sizes = sizes;
    cfg.train_sizes = train_sizes.empty() ? cfg.sizes : train_sizes;
    if (train_sizes.empty() && paper_scale && sizes.empty()) cfg.train_sizes = paper_scale_config().train_sizes;
    if (instances > 0) cfg.instances_per_size = instances;
    cfg.degree = degree;
    cfg.layers = layers;
    cfg.dt_min = dt_min;
    cfg.dt_max = dt_max;
    if (dt_step > 0) cfg.dt_step = dt_step;
    cfg.order = parse_order(order);
    cfg.master_seed = seed;
    cfg.safeguards.beta_max = beta_max;
    return cfg;
  }
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--force", f.force, "Allow more than 26 qubits");
  app->add_flag("--validate", f.validate, "Re-parse every artifact in the output directory afterwards");
  app->add_flag("--quiet", f.quiet, "No progress output");
}

void add_scan_config(CLI::App* app, ConfigFlags& c) {
  app->add_option("--sizes", c.sizes, "Graph sizes")->delimiter(',');
  app->add_option("--train-sizes", c.train_sizes, "Sizes whose schedules are transferred")->delimiter(',');
  app->add_option("--layers", c.layers, "Circuit depth")->capture_default_str();
  app->add_option("--dt-min", c.dt_min)->capture_default_str();
  app->add_option("--dt-max", c.dt_max)->capture_default_str();
  app->add_option("--dt-step", c.dt_step, "Grid resolution (default 0.005, 0.001 with --paper-scale)");
  app->add_option("--order", c.order, "Feedback order (1 or 2)")->capture_default_str();
  app->add_option("--beta-max", c.beta_max, "Feedback parameter clamp")->capture_default_str();
  app->add_flag("--paper-scale", c.paper_scale, "Sizes 6..24, 20 instances, dt step 0.001");
}

pipeline::Manifest manifest_for(const std::string& command, const std::vector<fs::path>& artifacts,
                                std::chrono::steady_clock::time_point start, std::string config = {}) {
  pipeline::Manifest m;
  m.command = command;
  m.config_json = std::move(config);
  m.artifacts = artifacts;
  m.timing_seconds.emplace_back(command,
                                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return m;
}

void finish(const CommonFlags& common, const fs::path& out) {
  if (common.validate) {
    const std::size_t n = pipeline::validate_artifacts(out);
    if (!common.quiet) std::cerr << "validate: " << n << " artifacts OK under " << out.string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback-based quantum optimization for Max-Cut: scans, schedule transfer and scaling fits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pipeline::kToolVersion);

  CommonFlags common;
  ConfigFlags cfg_flags;
  std::string out;
  std::vector<fs::path> graph_inputs;
  fs::path baselines_dir, schedules_dir, summaries_dir, scan_dir, transfer_dir;

  // generate
  auto* gen = app.add_subcommand("generate", "Generate random regular graphs");
  bool allow_disconnected = false;
  gen->add_option("--sizes", cfg_flags.sizes, "Graph sizes")->delimiter(',')->required();
  gen->add_option("--instances", cfg_flags.instances, "Graphs per size")->required();
  gen->add_option("--degree", cfg_flags.degree)->capture_default_str();
  gen->add_option("--seed", cfg_flags.seed)->capture_default_str();
  gen->add_option("--out", out)->required();
  gen->add_flag("--allow-disconnected", allow_disconnected);
  add_common(gen, common);

  // baseline
  auto* base = app.add_subcommand("baseline", "Exact or annealed Max-Cut baselines");
  std::string method = "exhaustive";
  base->add_option("--graphs", graph_inputs, "Graph files or directories")->required();
  base->add_option("--method", method)->check(CLI::IsMember({"exhaustive", "annealing"}))->capture_default_str();
  base->add_option("--seed", cfg_flags.seed)->capture_default_str();
  base->add_option("--out", out)->required();
  add_common(base, common);

  // scan
  auto* scan = app.add_subcommand("scan", "Native time-step scans with early stopping");
  bool resume = false;
  scan->add_option("--graphs", graph_inputs)->required();
  scan->add_option("--baselines", baselines_dir)->required();
  scan->add_option("--out", out)->required();
  scan->add_flag("--resume", resume, "Skip graphs that already have results");
  add_scan_config(scan, cfg_flags);
  add_common(scan, common);

  // transfer
  auto* xfer = app.add_subcommand("transfer", "Replay schedules on target graphs");
  xfer->add_option("--schedules", schedules_dir, "Directory with schedule_*.json")->required();
  xfer->add_option("--graphs", graph_inputs)->required();
  xfer->add_option("--baselines", baselines_dir)->required();
  xfer->add_option("--scan-summaries", summaries_dir, "Directory with native summary_n*.json");
  xfer->add_option("--train-sizes", cfg_flags.train_sizes)->delimiter(',');
  xfer->add_option("--out", out)->required();
  add_common(xfer, common);

  // fit
  auto* fitc = app.add_subcommand("fit", "Power-law fit of the mean best time step");
  fitc->add_option("--summaries", summaries_dir)->required();
  fitc->add_option("--out", out)->required();
  add_common(fitc, common);

  // report
  auto* rep = app.add_subcommand("report", "Bundle figure datasets");
  rep->add_option("--scan", scan_dir)->required();
  rep->add_option("--transfer", transfer_dir)->required();
  rep->add_option("--out", out)->required();
  add_common(rep, common);

  // run
  auto* run = app.add_subcommand("run", "Full pipeline under one output directory");
  run->add_option("--instances", cfg_flags.instances, "Graphs per size (default 10)");
  run->add_option("--degree", cfg_flags.degree)->capture_default_str();
  run->add_option("--seed", cfg_flags.seed)->capture_default_str();
  run->add_option("--method", method)->check(CLI::IsMember({"exhaustive", "annealing"}))->capture_default_str();
  run->add_option("--out", out)->required();
  run->add_flag("--allow-disconnected", allow_disconnected);
  add_scan_config(run, cfg_flags);
  add_common(run, common);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Single run on one graph, printing the trajectory");
  fs::path graph_file, schedule_file, baseline_file, dump_path;
  double sim_dt = 0.2;
  sim->add_option("--graph", graph_file)->required();
  sim->add_option("--schedule", schedule_file, "Replay this schedule instead of running feedback");
  sim->add_option("--baseline", baseline_file, "Report approximation ratios against this baseline");
  sim->add_option("--dt", sim_dt)->capture_default_str();
  sim->add_option("--layers", cfg_flags.layers)->capture_default_str();
  sim->add_option("--order", cfg_flags.order)->capture_default_str();
  sim->add_option("--dump-state", dump_path, "Write the final amplitudes (index re im per line)");
  sim->add_flag("--force", common.force);

  // validate
  auto* val = app.add_subcommand("validate", "Re-parse every artifact under a directory");
  fs::path validate_dir;
  val->add_option("dir", validate_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const pipeline::StageOptions opt = common.stage();

    if (*gen) {
      pipeline::GenerateRequest req{cfg_flags.sizes, cfg_flags.instances, cfg_flags.degree, cfg_flags.seed,
                                    !allow_disconnected};
      const auto files = pipeline::generate(req, out, opt);
      pipeline::write_manifest(manifest_for("generate", files, start), out);
      finish(common, out);
    } else if (*base) {
      pipeline::BaselineRequest req;
      req.method = parse_baseline_method(method);
      req.seed = cfg_flags.seed;
      const auto files = pipeline::baseline(pipeline::expand_graph_inputs(graph_inputs), req, out, opt);
      pipeline::write_manifest(manifest_for("baseline", files, start), out);
      finish(common, out);
    } else if (*scan) {
      ExperimentConfig cfg = cfg_flags.build();
      const auto instances = pipeline::load_instances(pipeline::expand_graph_inputs(graph_inputs), baselines_dir);
      if (cfg_flags.sizes.empty()) {
        // default to whatever sizes were supplied
        std::set<int> present;
        for (const auto& i : instances) present.insert(i.graph.node_count());
        cfg.sizes.assign(present.begin(), present.end());
        cfg.train_sizes = cfg.sizes;
      }
      const auto stage = pipeline::scan(instances, cfg, out, opt, resume);
      pipeline::write_manifest(manifest_for("scan", stage.artifacts, start, pipeline::config_to_json(cfg)), out);
      finish(common, out);
    } else if (*xfer) {
      const auto targets = pipeline::load_instances(pipeline::expand_graph_inputs(graph_inputs), baselines_dir);
      std::map<int, pipeline::SizeSummary> native;
      if (!summaries_dir.empty()) native = pipeline::load_summaries(summaries_dir);
      const auto stage = pipeline::transfer(pipeline::list_schedule_files(schedules_dir), targets, native,
                                            cfg_flags.train_sizes, out, opt);
      pipeline::write_manifest(manifest_for("transfer", stage.artifacts, start), out);
      finish(common, out);
    } else if (*fitc) {
      const auto stage = pipeline::fit(pipeline::load_summaries(summaries_dir), out);
      std::cout << pipeline::serialize_fit(stage.fit);
      pipeline::write_manifest(manifest_for("fit", stage.artifacts, start), out);
      finish(common, out);
    } else if (*rep) {
      const auto files = pipeline::report(scan_dir, transfer_dir, out);
      pipeline::write_manifest(manifest_for("report", files, start), out);
      finish(common, out);
    } else if (*run) {
      pipeline::RunRequest req;
      req.config = cfg_flags.build();
      if (cfg_flags.sizes.empty() && !cfg_flags.paper_scale) req.config.train_sizes = req.config.sizes;
      req.baseline.method = parse_baseline_method(method);
      req.require_connected = !allow_disconnected;
      const auto result = pipeline::run_all(req, out, opt);
      std::cout << pipeline::serialize_fit(result.fit);
      finish(common, out);
    } else if (*sim) {
      const Graph g = parse_graph(read_text_file(graph_file));
      const CostDiagonal d = build_cost_diagonal(g, common.force ? kForcedQubitLimit : kDefaultQubitLimit);
      StateVector final_state;
      Trajectory traj;
      Schedule schedule;
      if (!schedule_file.empty()) {
        schedule = parse_schedule(read_text_file(schedule_file));
        traj = replay_schedule(d, schedule, {}, &final_state);
      } else {
        FeedbackRun r = run_feedback(d, sim_dt, cfg_flags.layers, parse_order(cfg_flags.order), {}, &final_state);
        schedule = std::move(r.schedule);
        traj = std::move(r.trajectory);
      }
      double ground = 0;
      if (!baseline_file.empty()) ground = parse_baseline(read_text_file(baseline_file)).ground_energy;
      std::cout << "layer,beta,energy" << (ground < 0 ? ",ratio" : "") << "\n";
      for (std::size_t k = 0; k < traj.energies.size(); ++k) {
        std::cout << k << "," << (k ? format_double(schedule.betas[k - 1]) : std::string("")) << ","
                  << format_double(traj.energies[k]);
        if (ground < 0) std::cout << "," << format_double(approximation_ratio(traj.energies[k], ground));
        std::cout << "\n";
      }
      if (!dump_path.empty()) {
        std::ofstream os(dump_path);
        if (!os) throw Error(ErrorKind::io_error, "cannot write " + dump_path.string());
        dump_state(os, final_state);
      }
    } else if (*val) {
      std::cout << pipeline::validate_artifacts(validate_dir) << " artifacts OK\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_user_error(e.kind()) ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
