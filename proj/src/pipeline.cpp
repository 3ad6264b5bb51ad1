#include "falqon/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "falqon/error.hpp"
#include "falqon/io.hpp"
#include "falqon/parallel.hpp"
#include "falqon/seeding.hpp"

namespace falqon::pipeline {

using nlohmann::json;

namespace {

std::mutex log_mutex;

template <class... Parts>
void log(const StageOptions& opt, const Parts&... parts) {
  if (!opt.log) return;
  std::lock_guard lock(log_mutex);
  ((*opt.log) << ... << parts) << '\n';
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// (n, index, name) parsed from g_n{n}_i{index}.json; unmatched names sort last by name.
std::tuple<int, int, std::string> graph_file_key(const fs::path& p) {
  static const std::regex pattern(R"(g_n(\d+)_i(\d+)\.json)");
  const std::string name = p.filename().string();
  std::smatch m;
  if (std::regex_match(name, m, pattern)) return {std::stoi(m[1]), std::stoi(m[2]), name};
  return {std::numeric_limits<int>::max(), 0, name};
}

json parse_json_file(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_input, what + ": " + e.what());
  }
}

template <class T>
T json_get(const json& obj, const char* key, const std::string& what) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::malformed_input, what + ": missing or mistyped \"" + key + "\"");
  }
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::regex& pattern) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::io_error, "not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct GraphResult {
  SizeSummary::Entry entry;
  int n = 0;
};

std::string serialize_result(const GraphResult& r) {
  const auto& e = r.entry;
  std::string out = "{\n";
  out += "  \"graph_id\": " + json_string(e.graph_id) + ",\n";
  out += "  \"n\": " + std::to_string(r.n) + ",\n";
  out += "  \"best_dt\": " + format_double(e.best_dt) + ",\n";
  out += "  \"best_ratio\": " + format_double(e.best_ratio) + ",\n";
  out += "  \"stop_reason\": " + json_string(e.stop_reason) + ",\n";
  out += "  \"evaluated\": " + std::to_string(e.evaluated) + ",\n";
  out += "  \"safeguard_events\": " + std::to_string(e.safeguard_events) + "\n}\n";
  return out;
}

GraphResult parse_result(std::string_view text, const std::string& stem) {
  const std::string what = "scan result " + stem;
  const json doc = parse_json_file(text, what);
  GraphResult r;
  r.entry.stem = stem;
  r.entry.graph_id = json_get<std::string>(doc, "graph_id", what);
  r.n = json_get<int>(doc, "n", what);
  r.entry.best_dt = json_get<double>(doc, "best_dt", what);
  r.entry.best_ratio = json_get<double>(doc, "best_ratio", what);
  r.entry.stop_reason = json_get<std::string>(doc, "stop_reason", what);
  r.entry.evaluated = json_get<int>(doc, "evaluated", what);
  r.entry.safeguard_events = json_get<int>(doc, "safeguard_events", what);
  return r;
}

std::string curve_csv(const ScanResult& r) {
  std::string out = "graph_id,dt,final_ratio,final_energy\n";
  for (const auto& p : r.curve) {
    out += r.graph_id + "," + format_double(p.dt) + "," + format_double(p.ratio) + "," + format_double(p.energy) +
           "\n";
  }
  return out;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  std::error_code ec;
  auto rel = fs::relative(p, base, ec);
  return (ec || rel.empty()) ? p.generic_string() : rel.generic_string();
}

}  // namespace

// ---- generate ---------------------------------------------------------------

std::vector<fs::path> generate(const GenerateRequest& req, const fs::path& out_dir, const StageOptions& opt) {
  if (req.instances < 1) throw Error(ErrorKind::invalid_parameters, "instances must be at least 1");
  if (req.sizes.empty()) throw Error(ErrorKind::invalid_parameters, "no sizes given");
  for (int n : req.sizes) {
    if (req.degree < 1 || req.degree >= n || (n * req.degree) % 2 != 0) {
      throw Error(ErrorKind::invalid_parameters,
                  "no simple " + std::to_string(req.degree) + "-regular graph on " + std::to_string(n) + " vertices");
    }
  }
  std::vector<std::pair<int, int>> jobs;
  for (int n : req.sizes)
    for (int i = 0; i < req.instances; ++i) jobs.emplace_back(n, i);

  std::vector<fs::path> out(jobs.size());
  GenerateOptions gen;
  gen.require_connected = req.require_connected;
  parallel_for(jobs.size(), opt.jobs, [&](std::size_t k) {
    const auto [n, i] = jobs[k];
    const std::uint64_t seed = derive_seed(req.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i),
                                           SeedPurpose::graph);
    const Graph g = generate_regular(n, req.degree, seed, gen);
    out[k] = out_dir / ("g_n" + std::to_string(n) + "_i" + std::to_string(i) + ".json");
    write_file_atomic(out[k], serialize_graph(g));
  });
  log(opt, "generate: wrote ", out.size(), " graphs to ", out_dir.string());
  return out;
}

// ---- baseline ---------------------------------------------------------------

std::vector<fs::path> baseline(const std::vector<fs::path>& graph_files, const BaselineRequest& req,
                               const fs::path& out_dir, const StageOptions& opt) {
  std::vector<fs::path> out(graph_files.size());
  parallel_for(graph_files.size(), opt.jobs, [&](std::size_t k) {
    const fs::path& path = graph_files[k];
    Graph g = [&] {
      try {
        return parse_graph(read_text_file(path));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::io_error) throw;
        throw Error(e.kind(), path.string() + ": " + e.what());
      }
    }();
    BaselineRecord rec;
    if (req.method == BaselineMethod::exhaustive) {
      rec = brute_force_max_cut(g, opt.qubit_limit);
    } else {
      const std::uint64_t seed =
          derive_seed(req.seed, static_cast<std::uint64_t>(g.node_count()), fnv1a64(g.id()), SeedPurpose::anneal);
      rec = anneal_max_cut(g, req.anneal, seed);
    }
    out[k] = out_dir / (path.stem().string() + ".baseline.json");
    write_file_atomic(out[k], serialize_baseline(rec));
  });
  log(opt, "baseline: wrote ", out.size(), " ", to_string(req.method), " baselines to ", out_dir.string());
  return out;
}

// ---- loading ----------------------------------------------------------------

std::vector<fs::path> list_graph_files(const fs::path& dir) {
  static const std::regex pattern(R"(g_.*\.json)");
  auto files = sorted_files(dir, pattern);
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return graph_file_key(a) < graph_file_key(b); });
  return files;
}

std::vector<fs::path> expand_graph_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      auto files = list_graph_files(p);
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Instance> load_instances(const std::vector<fs::path>& graph_files, const fs::path& baseline_dir) {
  static const std::regex pattern(R"(.*\.baseline\.json)");
  std::map<std::string, BaselineRecord> by_id;
  for (const auto& p : sorted_files(baseline_dir, pattern)) {
    try {
      BaselineRecord b = parse_baseline(read_text_file(p));
      by_id.emplace(b.graph_id, std::move(b));
    } catch (const Error& e) {
      throw Error(e.kind(), p.string() + ": " + e.what());
    }
  }
  std::vector<Instance> out;
  out.reserve(graph_files.size());
  for (const auto& p : graph_files) {
    Graph g = [&] {
      try {
        return parse_graph(read_text_file(p));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::io_error) throw;
        throw Error(e.kind(), p.string() + ": " + e.what());
      }
    }();
    auto it = by_id.find(g.id());
    if (it == by_id.end()) {
      throw Error(ErrorKind::baseline_mismatch,
                  "no baseline for graph " + g.id() + " (" + p.string() + ") in " + baseline_dir.string());
    }
    if (static_cast<int>(it->second.witness.size()) != g.node_count() ||
        cut_value(g, it->second.witness) != it->second.max_cut) {
      throw Error(ErrorKind::baseline_mismatch, "baseline witness does not attain max_cut for " + p.string());
    }
    out.push_back(Instance{p, p.stem().string(), std::move(g), it->second});
  }
  return out;
}

// ---- scan -------------------------------------------------------------------

std::string serialize_summary(const SizeSummary& s) {
  std::string out = "{\n";
  out += "  \"n\": " + std::to_string(s.n) + ",\n";
  out += "  \"instances\": " + std::to_string(s.instances) + ",\n";
  out += "  \"std_convention\": \"population\",\n";
  out += "  \"mean_best_dt\": " + format_double(s.best_dt.mean) + ",\n";
  out += "  \"std_best_dt\": " + format_double(s.best_dt.std) + ",\n";
  out += "  \"mean_best_ratio\": " + format_double(s.best_ratio.mean) + ",\n";
  out += "  \"std_best_ratio\": " + format_double(s.best_ratio.std) + ",\n";
  out += "  \"graphs\": [";
  for (std::size_t k = 0; k < s.graphs.size(); ++k) {
    const auto& g = s.graphs[k];
    out += k ? ",\n    " : "\n    ";
    out += "{\"stem\": " + json_string(g.stem) + ", \"graph_id\": " + json_string(g.graph_id) +
           ", \"best_dt\": " + format_double(g.best_dt) + ", \"best_ratio\": " + format_double(g.best_ratio) +
           ", \"stop_reason\": " + json_string(g.stop_reason) + ", \"evaluated\": " + std::to_string(g.evaluated) +
           ", \"safeguard_events\": " + std::to_string(g.safeguard_events) + "}";
  }
  out += s.graphs.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

SizeSummary parse_summary(std::string_view text) {
  const std::string what = "scan summary";
  const json doc = parse_json_file(text, what);
  SizeSummary s;
  s.n = json_get<int>(doc, "n", what);
  s.instances = json_get<int>(doc, "instances", what);
  s.best_dt = {json_get<double>(doc, "mean_best_dt", what), json_get<double>(doc, "std_best_dt", what)};
  s.best_ratio = {json_get<double>(doc, "mean_best_ratio", what), json_get<double>(doc, "std_best_ratio", what)};
  const json graphs = json_get<json>(doc, "graphs", what);
  if (!graphs.is_array()) throw Error(ErrorKind::malformed_input, what + ": \"graphs\" must be an array");
  for (const auto& g : graphs) {
    SizeSummary::Entry e;
    e.stem = json_get<std::string>(g, "stem", what);
    e.graph_id = json_get<std::string>(g, "graph_id", what);
    e.best_dt = json_get<double>(g, "best_dt", what);
    e.best_ratio = json_get<double>(g, "best_ratio", what);
    e.stop_reason = json_get<std::string>(g, "stop_reason", what);
    e.evaluated = json_get<int>(g, "evaluated", what);
    e.safeguard_events = json_get<int>(g, "safeguard_events", what);
    s.graphs.push_back(std::move(e));
  }
  if (s.instances != static_cast<int>(s.graphs.size())) {
    throw Error(ErrorKind::malformed_input, what + ": instance count does not match the graph list");
  }
  return s;
}

std::map<int, SizeSummary> load_summaries(const fs::path& dir) {
  static const std::regex pattern(R"(summary_n\d+\.json)");
  std::map<int, SizeSummary> out;
  for (const auto& p : sorted_files(dir, pattern)) {
    SizeSummary s = parse_summary(read_text_file(p));
    out[s.n] = std::move(s);
  }
  return out;
}

ScanStageResult scan(const std::vector<Instance>& instances, const ExperimentConfig& cfg, const fs::path& out_dir,
                     const StageOptions& opt, bool resume) {
  cfg.validate();
  const std::set<int> sizes(cfg.sizes.begin(), cfg.sizes.end());
  std::vector<const Instance*> todo;
  for (const auto& inst : instances)
    if (sizes.count(inst.graph.node_count())) todo.push_back(&inst);
  if (todo.empty()) throw Error(ErrorKind::invalid_parameters, "no graphs match the requested sizes");

  std::vector<GraphResult> results(todo.size());
  parallel_for(todo.size(), opt.jobs, [&](std::size_t k) {
    const Instance& inst = *todo[k];
    const fs::path result_path = out_dir / ("result_" + inst.stem + ".json");
    const fs::path curve_path = out_dir / ("curve_" + inst.stem + ".csv");
    const fs::path schedule_path = out_dir / ("schedule_" + inst.stem + ".json");
    if (resume && fs::exists(result_path) && fs::exists(curve_path) && fs::exists(schedule_path)) {
      results[k] = parse_result(read_text_file(result_path), inst.stem);
      if (results[k].entry.graph_id == inst.graph.id()) {
        log(opt, "scan: ", inst.stem, " already done, skipping");
        return;
      }
    }
    const auto start = std::chrono::steady_clock::now();
    const CostDiagonal d = build_cost_diagonal(inst.graph, opt.qubit_limit);
    const ScanResult r = scan_dt(d, inst.baseline, cfg);

    GraphResult& out = results[k];
    out.n = inst.graph.node_count();
    out.entry = {inst.stem,
                 r.graph_id,
                 r.best_dt,
                 r.best_ratio,
                 to_string(r.stop_reason),
                 static_cast<int>(r.curve.size()),
                 r.best_schedule.safeguard_events};
    write_file_atomic(curve_path, curve_csv(r));
    write_file_atomic(schedule_path, serialize_schedule(r.best_schedule));
    write_file_atomic(result_path, serialize_result(out));
    log(opt, "scan: ", inst.stem, " n=", out.n, " best_dt=", format_double(r.best_dt),
        " ratio=", format_double(r.best_ratio), " points=", r.curve.size(), " stop=", to_string(r.stop_reason), " (",
        elapsed_since(start), " s)");
  });

  ScanStageResult stage;
  for (std::size_t k = 0; k < todo.size(); ++k) {
    const Instance& inst = *todo[k];
    stage.artifacts.push_back(out_dir / ("curve_" + inst.stem + ".csv"));
    stage.artifacts.push_back(out_dir / ("schedule_" + inst.stem + ".json"));
    stage.artifacts.push_back(out_dir / ("result_" + inst.stem + ".json"));
    SizeSummary& s = stage.summaries[results[k].n];
    s.n = results[k].n;
    s.graphs.push_back(results[k].entry);
  }
  for (auto& [n, s] : stage.summaries) {
    std::vector<double> dts, ratios;
    for (const auto& g : s.graphs) {
      dts.push_back(g.best_dt);
      ratios.push_back(g.best_ratio);
    }
    s.instances = static_cast<int>(s.graphs.size());
    s.best_dt = mean_std(dts);
    s.best_ratio = mean_std(ratios);
    const fs::path p = out_dir / ("summary_n" + std::to_string(n) + ".json");
    write_file_atomic(p, serialize_summary(s));
    stage.artifacts.push_back(p);
    log(opt, "scan: n=", n, " mean best_dt=", format_double(s.best_dt.mean),
        " mean best ratio=", format_double(s.best_ratio.mean));
  }
  return stage;
}

// ---- transfer ---------------------------------------------------------------

std::vector<fs::path> list_schedule_files(const fs::path& dir) {
  static const std::regex pattern(R"(schedule_.*\.json)");
  auto files = sorted_files(dir, pattern);
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    // schedule_g_n6_i0.json -> g_n6_i0.json
    auto key = [](const fs::path& p) { return graph_file_key(p.filename().string().substr(9)); };
    return key(a) < key(b);
  });
  return files;
}

TransferStageResult transfer(const std::vector<fs::path>& schedule_files, const std::vector<Instance>& targets,
                             const std::map<int, SizeSummary>& native, const std::vector<int>& train_sizes,
                             const fs::path& out_dir, const StageOptions& opt) {
  const std::set<int> wanted(train_sizes.begin(), train_sizes.end());
  std::vector<Schedule> schedules;
  for (const auto& p : schedule_files) {
    Schedule s = [&] {
      try {
        return parse_schedule(read_text_file(p));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::io_error) throw;
        throw Error(e.kind(), p.string() + ": " + e.what());
      }
    }();
    if (wanted.empty() || wanted.count(s.n_train)) schedules.push_back(std::move(s));
  }
  if (schedules.empty()) throw Error(ErrorKind::empty_input, "no schedules to transfer");
  std::stable_sort(schedules.begin(), schedules.end(),
                   [](const Schedule& a, const Schedule& b) { return a.n_train < b.n_train; });

  struct Keyed {
    std::size_t schedule = 0, target = 0;
    TransferRecord record;
  };
  std::vector<std::vector<Keyed>> per_target(targets.size());
  std::vector<std::size_t> skipped(targets.size(), 0);
  parallel_for(targets.size(), opt.jobs, [&](std::size_t t) {
    const Instance& inst = targets[t];
    const int n_target = inst.graph.node_count();
    std::vector<Schedule> eligible;
    std::vector<std::size_t> index;
    for (std::size_t s = 0; s < schedules.size(); ++s) {
      if (schedules[s].n_train <= n_target) {
        eligible.push_back(schedules[s]);
        index.push_back(s);
      } else {
        ++skipped[t];
      }
    }
    if (eligible.empty()) return;
    const CostDiagonal d = build_cost_diagonal(inst.graph, opt.qubit_limit);
    const auto records = cross_evaluate(eligible, {TransferTarget{&d, &inst.baseline}});
    for (std::size_t k = 0; k < records.size(); ++k) per_target[t].push_back({index[k], t, records[k]});
  });

  std::vector<Keyed> all;
  for (auto& v : per_target) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.record.n_train, a.record.n_target, a.schedule, a.target) <
           std::tie(b.record.n_train, b.record.n_target, b.schedule, b.target);
  });

  TransferStageResult stage;
  for (auto s : skipped) stage.skipped_pairs += s;
  for (auto& k : all) stage.records.push_back(std::move(k.record));
  if (stage.records.empty()) throw Error(ErrorKind::empty_input, "no (schedule, target) pair has n_train <= n_target");
  stage.cells = aggregate_matrix(stage.records);
  log(opt, "transfer: ", stage.records.size(), " pairs evaluated, ", stage.skipped_pairs,
      " skipped (n_train > n_target)");

  std::string pairs = "n_train,n_target,train_graph_id,target_graph_id,ratio\n";
  for (const auto& r : stage.records) {
    pairs += std::to_string(r.n_train) + "," + std::to_string(r.n_target) + "," + r.train_graph_id + "," +
             r.target_graph_id + "," + format_double(r.ratio) + "\n";
  }
  std::string matrix = "n_train,n_target,mean_ratio,std_ratio,pair_count\n";
  for (const auto& c : stage.cells) {
    matrix += std::to_string(c.n_train) + "," + std::to_string(c.n_target) + "," + format_double(c.mean_ratio) + "," +
              format_double(c.std_ratio) + "," + std::to_string(c.pair_count) + "\n";
  }
  stage.artifacts.push_back(out_dir / "transfer_pairs.csv");
  write_file_atomic(stage.artifacts.back(), pairs);
  stage.artifacts.push_back(out_dir / "transfer_matrix.csv");
  write_file_atomic(stage.artifacts.back(), matrix);

  if (!native.empty()) {
    std::set<int> target_sizes;
    for (const auto& c : stage.cells) target_sizes.insert(c.n_target);
    for (const auto& [n, s] : native) target_sizes.insert(n);
    std::string cmp = "n_target,series,mean_ratio,std_ratio,count\n";
    for (int n : target_sizes) {
      if (auto it = native.find(n); it != native.end()) {
        cmp += std::to_string(n) + ",native," + format_double(it->second.best_ratio.mean) + "," +
               format_double(it->second.best_ratio.std) + "," + std::to_string(it->second.instances) + "\n";
      }
      for (const auto& c : stage.cells) {
        if (c.n_target != n) continue;
        cmp += std::to_string(n) + ",train_n" + std::to_string(c.n_train) + "," + format_double(c.mean_ratio) + "," +
               format_double(c.std_ratio) + "," + std::to_string(c.pair_count) + "\n";
      }
    }
    stage.artifacts.push_back(out_dir / "native_vs_transfer.csv");
    write_file_atomic(stage.artifacts.back(), cmp);
  }
  return stage;
}

// ---- fit / report -----------------------------------------------------------

std::string serialize_fit(const PowerLawFit& fit) {
  return "{\n  \"coefficient\": " + format_double(fit.coefficient) + ",\n  \"exponent\": " +
         format_double(fit.exponent) + ",\n  \"r_squared\": " + format_double(fit.r_squared) + "\n}\n";
}

FitStageResult fit(const std::map<int, SizeSummary>& summaries, const fs::path& out_dir) {
  std::vector<SizePoint> points;
  for (const auto& [n, s] : summaries) points.push_back({n, s.best_dt.mean});
  FitStageResult stage;
  stage.fit = fit_power_law(points);
  std::string table = "n,mean_dt,fitted_dt\n";
  for (const auto& p : points) {
    table += std::to_string(p.n) + "," + format_double(p.dt) + "," + format_double(stage.fit(p.n)) + "\n";
  }
  stage.artifacts.push_back(out_dir / "fit.json");
  write_file_atomic(stage.artifacts.back(), serialize_fit(stage.fit));
  stage.artifacts.push_back(out_dir / "fig1_dt_scaling.csv");
  write_file_atomic(stage.artifacts.back(), table);
  return stage;
}

std::vector<fs::path> report(const fs::path& scan_dir, const fs::path& transfer_dir, const fs::path& out_dir) {
  std::vector<fs::path> out = fit(load_summaries(scan_dir), out_dir).artifacts;
  const std::pair<const char*, const char*> copies[] = {
      {"transfer_matrix.csv", "fig2_transfer_matrix.csv"},
      {"native_vs_transfer.csv", "fig3_native_vs_transfer.csv"},
  };
  for (const auto& [from, to] : copies) {
    out.push_back(out_dir / to);
    write_file_atomic(out.back(), read_text_file(transfer_dir / from));
  }
  return out;
}

// ---- full pipeline ----------------------------------------------------------

RunResult run_all(const RunRequest& req, const fs::path& out_root, const StageOptions& opt) {
  req.config.validate();
  const ExperimentConfig& cfg = req.config;
  RunResult result;
  Manifest manifest;
  manifest.command = "run";
  manifest.config_json = config_to_json(cfg);
  auto stage_clock = std::chrono::steady_clock::now();
  auto lap = [&](const char* name) {
    manifest.timing_seconds.emplace_back(name, elapsed_since(stage_clock));
    stage_clock = std::chrono::steady_clock::now();
  };
  auto keep = [&](const std::vector<fs::path>& paths) {
    manifest.artifacts.insert(manifest.artifacts.end(), paths.begin(), paths.end());
  };

  GenerateRequest gen{cfg.sizes, cfg.instances_per_size, cfg.degree, cfg.master_seed, req.require_connected};
  const auto graphs = generate(gen, out_root / "graphs", opt);
  keep(graphs);
  lap("generate");

  BaselineRequest base = req.baseline;
  base.seed = cfg.master_seed;
  keep(baseline(graphs, base, out_root / "baselines", opt));
  lap("baseline");

  const auto instances = load_instances(graphs, out_root / "baselines");
  ScanStageResult scanned = scan(instances, cfg, out_root / "scan", opt);
  keep(scanned.artifacts);
  result.summaries = scanned.summaries;
  lap("scan");

  result.transfer = transfer(list_schedule_files(out_root / "scan"), instances, result.summaries, cfg.train_sizes,
                             out_root / "transfer", opt);
  keep(result.transfer.artifacts);
  lap("transfer");

  if (result.summaries.size() >= 2) {
    FitStageResult fitted = fit(result.summaries, out_root / "fit");
    result.fit = fitted.fit;
    keep(fitted.artifacts);
    keep(report(out_root / "scan", out_root / "transfer", out_root / "report"));
  }
  lap("fit+report");

  result.artifacts = manifest.artifacts;
  write_manifest(manifest, out_root);
  return result;
}

// ---- manifest / validation --------------------------------------------------

std::string config_to_json(const ExperimentConfig& cfg) {
  auto ints = [](const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + std::to_string(v[k]);
    return s + "]";
  };
  std::string out = "{";
  out += "\"sizes\": " + ints(cfg.sizes);
  out += ", \"train_sizes\": " + ints(cfg.train_sizes);
  out += ", \"instances_per_size\": " + std::to_string(cfg.instances_per_size);
  out += ", \"degree\": " + std::to_string(cfg.degree);
  out += ", \"layers\": " + std::to_string(cfg.layers);
  out += ", \"dt_min\": " + format_double(cfg.dt_min);
  out += ", \"dt_max\": " + format_double(cfg.dt_max);
  out += ", \"dt_step\": " + format_double(cfg.dt_step);
  out += ", \"order\": " + std::to_string(static_cast<int>(cfg.order));
  out += ", \"master_seed\": " + json_string(std::to_string(cfg.master_seed));
  out += ", \"early_stop\": {\"window\": " + std::to_string(cfg.early_stop.window) +
         ", \"drop\": " + format_double(cfg.early_stop.drop) + ", \"floor\": " + format_double(cfg.early_stop.floor) +
         "}";
  out += ", \"safeguards\": {\"epsilon_b\": " + format_double(cfg.safeguards.epsilon_b) +
         ", \"beta_max\": " + format_double(cfg.safeguards.beta_max) + "}";
  return out + "}";
}

fs::path write_manifest(const Manifest& m, const fs::path& out_dir) {
  std::string out = "{\n";
  out += "  \"tool\": \"falqon\",\n";
  out += "  \"version\": " + json_string(kToolVersion) + ",\n";
  out += "  \"command\": " + json_string(m.command) + ",\n";
  out += "  \"config\": " + (m.config_json.empty() ? std::string("{}") : m.config_json) + ",\n";
  out += "  \"artifacts\": [";
  for (std::size_t k = 0; k < m.artifacts.size(); ++k) {
    out += (k ? ",\n    " : "\n    ") + json_string(relative_to(m.artifacts[k], out_dir));
  }
  out += m.artifacts.empty() ? "],\n" : "\n  ],\n";
  out += "  \"timing_seconds\": {";
  for (std::size_t k = 0; k < m.timing_seconds.size(); ++k) {
    out += (k ? ", " : "") + json_string(m.timing_seconds[k].first) + ": " + format_double(m.timing_seconds[k].second);
  }
  out += "}\n}\n";
  const fs::path path = out_dir / "manifest.json";
  write_file_atomic(path, out);
  return path;
}

namespace {

const std::map<std::string, std::vector<std::string>>& csv_schemas() {
  static const std::map<std::string, std::vector<std::string>> schemas = {
      {"graph_id,dt,final_ratio,final_energy", {"s", "f", "f", "f"}},
      {"n_train,n_target,train_graph_id,target_graph_id,ratio", {"i", "i", "s", "s", "f"}},
      {"n_train,n_target,mean_ratio,std_ratio,pair_count", {"i", "i", "f", "f", "i"}},
      {"n_target,series,mean_ratio,std_ratio,count", {"i", "s", "f", "f", "i"}},
      {"n,mean_dt,fitted_dt", {"i", "f", "f"}},
  };
  return schemas;
}

void validate_csv(const fs::path& p) {
  std::istringstream in(read_text_file(p));
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::malformed_input, p.string() + ": empty CSV");
  auto it = csv_schemas().find(header);
  if (it == csv_schemas().end()) throw Error(ErrorKind::malformed_input, p.string() + ": unknown CSV header");
  const auto& types = it->second;
  std::string line;
  for (int row = 2; std::getline(in, line); ++row) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    const std::string where = p.string() + ":" + std::to_string(row);
    if (fields.size() != types.size()) throw Error(ErrorKind::malformed_input, where + ": wrong field count");
    for (std::size_t k = 0; k < types.size(); ++k) {
      const std::string& f = fields[k];
      const char* end = f.data() + f.size();
      if (types[k] == "i") {
        long long v;
        auto r = std::from_chars(f.data(), end, v);
        if (r.ec != std::errc{} || r.ptr != end) throw Error(ErrorKind::malformed_input, where + ": bad integer");
      } else if (types[k] == "f") {
        double v;
        auto r = std::from_chars(f.data(), end, v);
        if (r.ec != std::errc{} || r.ptr != end || !std::isfinite(v)) {
          throw Error(ErrorKind::malformed_input, where + ": bad number");
        }
      } else if (f.empty()) {
        throw Error(ErrorKind::malformed_input, where + ": empty field");
      }
    }
  }
}

}  // namespace

std::size_t validate_artifacts(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::io_error, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t checked = 0;
  for (const auto& p : files) {
    const std::string name = p.filename().string();
    auto with_path = [&](auto&& parse) {
      try {
        parse(read_text_file(p));
      } catch (const Error& e) {
        throw Error(e.kind(), p.string() + ": " + e.what());
      }
      ++checked;
    };
    auto starts = [&](std::string_view prefix) { return name.rfind(prefix, 0) == 0; };
    auto ends = [&](std::string_view suffix) {
      return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };

    if (ends(".baseline.json")) {
      with_path([](const std::string& t) { parse_baseline(t); });
    } else if (starts("g_") && ends(".json")) {
      with_path([](const std::string& t) { parse_graph(t); });
    } else if (starts("schedule_") && ends(".json")) {
      with_path([](const std::string& t) { parse_schedule(t); });
    } else if (starts("summary_n") && ends(".json")) {
      with_path([](const std::string& t) { parse_summary(t); });
    } else if (starts("result_") && ends(".json")) {
      with_path([&](const std::string& t) { parse_result(t, name); });
    } else if (name == "fit.json") {
      with_path([](const std::string& t) {
        const json doc = parse_json_file(t, "fit file");
        const double r2 = json_get<double>(doc, "r_squared", "fit file");
        json_get<double>(doc, "coefficient", "fit file");
        json_get<double>(doc, "exponent", "fit file");
        if (r2 < 0 || r2 > 1) throw Error(ErrorKind::malformed_input, "fit file: r_squared outside [0, 1]");
      });
    } else if (name == "manifest.json") {
      with_path([&](const std::string& t) {
        const json doc = parse_json_file(t, "manifest");
        for (const auto& a : json_get<std::vector<std::string>>(doc, "artifacts", "manifest")) {
          if (!fs::exists(p.parent_path() / a)) {
            throw Error(ErrorKind::malformed_input, "manifest references missing artifact " + a);
          }
        }
      });
    } else if (ends(".csv")) {
      validate_csv(p);
      ++checked;
    }
  }
  return checked;
}

}  // namespace falqon::pipeline
