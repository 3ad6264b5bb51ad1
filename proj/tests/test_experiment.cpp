#include <doctest.h>

#include <cmath>

#include "dense_reference.hpp"
#include "falqon/error.hpp"
#include "falqon/experiment.hpp"
#include "falqon/seeding.hpp"

using namespace falqon;
namespace ref = falqon::testing;

namespace {

// Final-layer ratios on K4 (ground energy -4), order 2, 16 layers, from the
// dense reference simulator.
constexpr double kK4Ratios[] = {0.30934204681647892, 0.95694696623666853, 0.93295120635338447,
                                0.020110575121396503, 0.35566429530112537};

Evaluator synthetic(const std::vector<double>& grid, const std::vector<double>& ratios, int* calls = nullptr) {
  return [grid, ratios, calls](double dt) {
    if (calls) ++*calls;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == dt) return Evaluation{ratios[i], -ratios[i], Schedule{dt, {}, FeedbackOrder::second, "", 0, 0}};
    }
    FAIL("dt not on grid");
    return Evaluation{};
  };
}

}  // namespace

TEST_CASE("dt grid construction") {
  ExperimentConfig cfg;
  cfg.dt_min = 0.1;
  cfg.dt_max = 1.0;
  cfg.dt_step = 0.005;
  const auto grid = cfg.dt_grid();
  CHECK(grid.size() == 181);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == doctest::Approx(1.0).epsilon(1e-12));
  cfg.dt_step = 0.001;
  CHECK(cfg.dt_grid().size() == 901);
  cfg.dt_max = 0.1;
  CHECK(cfg.dt_grid().size() == 1);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.dt_min = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.dt_max = 0.05;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.layers = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.train_sizes = {18};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.sizes = {5};
  bad.train_sizes = {5};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("single-point grid evaluates once") {
  int calls = 0;
  const std::vector<double> grid{0.3};
  const auto r = scan_dt(grid, {}, synthetic(grid, {0.7}, &calls));
  CHECK(calls == 1);
  CHECK(r.best_dt == 0.3);
  CHECK(r.best_ratio == 0.7);
  CHECK(r.stop_reason == StopReason::grid_exhausted);
}

TEST_CASE("plateau rule stops the scan and ties go to the smaller dt") {
  std::vector<double> grid;
  for (int i = 0; i < 12; ++i) grid.push_back(0.1 + 0.1 * i);
  std::vector<double> ratios{0.8, 0.9, 0.9, 0.2, 0.2, 0.2, 0.2, 0.2, 0.95, 0.95, 0.95, 0.95};
  int calls = 0;
  const auto r = scan_dt(grid, {}, synthetic(grid, ratios, &calls));
  CHECK(calls == 8);
  CHECK(r.curve.size() == 8);
  CHECK(r.stop_reason == StopReason::plateau);
  CHECK(r.best_dt == grid[1]);
  CHECK(r.best_ratio == 0.9);
  CHECK(r.best_schedule.dt == grid[1]);
}

TEST_CASE("plateau counter resets on a good point") {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.1 * (i + 1));
  const std::vector<double> ratios{0.9, 0.2, 0.2, 0.2, 0.2, 0.8, 0.2, 0.2, 0.2, 0.2};
  const auto r = scan_dt(grid, {}, synthetic(grid, ratios));
  CHECK(r.stop_reason == StopReason::grid_exhausted);
  CHECK(r.curve.size() == 10);
}

TEST_CASE("points below the floor before it is first reached do not count") {
  std::vector<double> grid;
  for (int i = 0; i < 9; ++i) grid.push_back(0.1 * (i + 1));
  const std::vector<double> ratios{0.3, 0.25, 0.2, 0.2, 0.3, 0.4, 0.45, 0.9, 0.85};
  const auto r = scan_dt(grid, {}, synthetic(grid, ratios));
  CHECK(r.stop_reason == StopReason::grid_exhausted);
  CHECK(r.curve.size() == 9);
  CHECK(r.best_dt == grid[7]);
}

TEST_CASE("floor of 0.5 applies once reached") {
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(0.1 * (i + 1));
  // 0.45 is within 0.2 of the best but under the floor
  const std::vector<double> ratios{0.6, 0.45, 0.45, 0.45, 0.45, 0.45, 0.9, 0.9};
  const auto r = scan_dt(grid, {}, synthetic(grid, ratios));
  CHECK(r.stop_reason == StopReason::plateau);
  CHECK(r.curve.size() == 6);
  CHECK(r.best_dt == grid[0]);
}

TEST_CASE("divergence stops the scan") {
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4};
  Evaluator ev = [](double dt) {
    if (dt > 0.25) throw Error(ErrorKind::diverged_state, "norm");
    return Evaluation{dt, -dt, Schedule{dt, {}, FeedbackOrder::second, "", 0, 0}};
  };
  const auto r = scan_dt(grid, {}, ev);
  CHECK(r.stop_reason == StopReason::diverged);
  CHECK(r.curve.size() == 2);
  CHECK(r.best_dt == 0.2);

  Evaluator nan_ev = [](double dt) {
    return Evaluation{dt > 0.15 ? std::nan("") : 0.6, 0, Schedule{dt, {}, FeedbackOrder::second, "", 0, 0}};
  };
  CHECK(scan_dt(grid, {}, nan_ev).stop_reason == StopReason::diverged);

  Evaluator other = [](double) -> Evaluation { throw Error(ErrorKind::dimension_mismatch, "x"); };
  CHECK_THROWS_AS(scan_dt(grid, {}, other), Error);
  CHECK_THROWS_AS(scan_dt(std::vector<double>{}, {}, ev), Error);
}

TEST_CASE("K4 scan over five points picks the dense-reference argmax") {
  const Graph k4 = make_complete(4);
  const auto base = brute_force_max_cut(k4);
  ExperimentConfig cfg;
  cfg.dt_min = 0.1;
  cfg.dt_max = 0.5;
  cfg.dt_step = 0.1;
  const auto r = scan_dt(build_cost_diagonal(k4), base, cfg);

  // the oracle agrees with the frozen fixture
  for (int i = 0; i < 5; ++i) {
    const auto dense = ref::dense_feedback(4, k4.edges(), cfg.dt_grid()[i], 16, 2);
    CHECK(std::abs(dense.energies.back() / -4.0 - kK4Ratios[i]) < 1e-9);
  }
  // 0.93 at 0.3 then 0.02 and 0.36 fall below 0.757; no plateau within five points
  CHECK(r.stop_reason == StopReason::grid_exhausted);
  REQUIRE(r.curve.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(r.curve[i].ratio - kK4Ratios[i]) < 1e-9);
  CHECK(r.best_dt == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(r.best_ratio - kK4Ratios[1]) < 1e-9);
  CHECK(r.best_schedule.betas.size() == 16);
}

TEST_CASE("scan rejects a baseline for another graph") {
  const Graph k4 = make_complete(4);
  auto base = brute_force_max_cut(make_complete_bipartite(3, 3));
  CHECK_THROWS_AS(scan_dt(build_cost_diagonal(k4), base, ExperimentConfig{}), Error);
}

TEST_CASE("scan is deterministic") {
  const Graph g = generate_regular(8, 3, 31);
  const auto base = brute_force_max_cut(g);
  const auto d = build_cost_diagonal(g);
  ExperimentConfig cfg;
  cfg.dt_step = 0.02;
  const auto a = scan_dt(d, base, cfg);
  const auto b = scan_dt(d, base, cfg);
  CHECK(a.best_dt == b.best_dt);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.stop_reason == b.stop_reason);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].ratio == b.curve[i].ratio);
  CHECK(a.best_schedule.betas == b.best_schedule.betas);
}

TEST_CASE("cross evaluation") {
  std::vector<Graph> graphs;
  for (std::uint64_t i = 0; i < 4; ++i) graphs.push_back(generate_regular(8, 3, derive_seed(5, 8, i, SeedPurpose::test)));
  std::vector<CostDiagonal> diags;
  std::vector<BaselineRecord> bases;
  for (const auto& g : graphs) {
    diags.push_back(build_cost_diagonal(g));
    bases.push_back(brute_force_max_cut(g));
  }
  std::vector<TransferTarget> targets;
  for (std::size_t i = 0; i < graphs.size(); ++i) targets.push_back({&diags[i], &bases[i]});

  SUBCASE("self transfer equals the native ratio") {
    const auto run = run_feedback(diags[0], 0.2, 16, FeedbackOrder::second);
    const auto recs = cross_evaluate({run.schedule}, {targets[0]});
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].ratio == approximation_ratio(run.trajectory.final_energy(), bases[0].ground_energy));
  }
  SUBCASE("zero schedule gives the uniform ratio") {
    Schedule zero{0.3, std::vector<double>(16, 0.0), FeedbackOrder::second, "z", 6, 0};
    const auto recs = cross_evaluate({zero}, targets);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(std::abs(recs[i].ratio - (graphs[i].edge_count() / 2.0) / bases[i].max_cut) < 1e-12);
    }
  }
  SUBCASE("schedule-major ordering") {
    std::vector<Schedule> schedules;
    for (int i = 0; i < 3; ++i) {
      auto s = run_feedback(diags[i], 0.15 + 0.05 * i, 16, FeedbackOrder::second).schedule;
      schedules.push_back(s);
    }
    const auto recs = cross_evaluate(schedules, targets);
    REQUIRE(recs.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) {
      CHECK(recs[k].train_graph_id == schedules[k / 4].train_graph_id);
      CHECK(recs[k].target_graph_id == graphs[k % 4].id());
    }
  }
  SUBCASE("mismatched baseline") {
    CHECK_THROWS_AS(cross_evaluate({Schedule{0.2, {0.0}, FeedbackOrder::second, "", 8, 0}}, {{&diags[0], &bases[1]}}),
                    Error);
  }
}

TEST_CASE("aggregate matrix") {
  auto rec = [](int a, int b, double r) { return TransferRecord{a, b, "t", "g", r}; };
  auto one = aggregate_matrix({rec(6, 8, 0.7)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean_ratio == 0.7);
  CHECK(one[0].std_ratio == 0.0);
  CHECK(one[0].pair_count == 1);

  auto two = aggregate_matrix({rec(6, 8, 0.6), rec(6, 8, 0.8)});
  CHECK(two[0].mean_ratio == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(two[0].std_ratio == doctest::Approx(0.1).epsilon(1e-12));

  auto grid = aggregate_matrix({rec(6, 6, 0.7), rec(6, 8, 0.7), rec(8, 8, 0.6), rec(6, 6, 0.5)});
  REQUIRE(grid.size() == 3);
  CHECK(grid[0].n_train == 6);
  CHECK(grid[0].n_target == 6);
  CHECK(grid[0].pair_count == 2);
  for (const auto& c : grid) CHECK(c.n_train <= c.n_target);

  CHECK_THROWS_AS(aggregate_matrix({}), Error);
}

TEST_CASE("power-law fit recovers planted constants") {
  std::vector<SizePoint> pts;
  for (int n = 6; n <= 24; n += 2) pts.push_back({n, 0.4984 * std::pow(n, -0.5110)});
  const auto fit = fit_power_law(pts);
  CHECK(std::abs(fit.coefficient - 0.4984) < 1e-6);
  CHECK(std::abs(fit.exponent + 0.5110) < 1e-6);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const auto two = fit_power_law({{6, 0.2}, {12, 0.14}});
  CHECK(two.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two(6) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(two(12) == doctest::Approx(0.14).epsilon(1e-12));

  const auto flat = fit_power_law({{6, 0.3}, {8, 0.3}, {10, 0.3}});
  CHECK(std::abs(flat.exponent) < 1e-12);
  CHECK(flat.coefficient == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(flat.r_squared == 1.0);

  CHECK_THROWS_AS(fit_power_law({{6, 0.2}}), Error);
  CHECK_THROWS_AS(fit_power_law({{6, 0.2}, {6, 0.3}}), Error);
  CHECK_THROWS_AS(fit_power_law({{6, 0.2}, {8, 0.0}}), Error);

  Engine rng(4);
  std::vector<SizePoint> noisy;
  for (int n = 6; n <= 24; n += 2) noisy.push_back({n, 0.5 * std::pow(n, -0.5) * (1 + 0.1 * (uniform01(rng) - 0.5))});
  const auto nf = fit_power_law(noisy);
  CHECK(nf.r_squared >= 0.0);
  CHECK(nf.r_squared <= 1.0);
  CHECK(nf.coefficient > 0);
}
