#include "falqon/maxcut.hpp"

#include <bit>
#include <cmath>

#include "falqon/error.hpp"
#include "falqon/seeding.hpp"

namespace falqon {

std::string to_string(BaselineMethod method) {
  return method == BaselineMethod::exhaustive ? "exhaustive" : "annealing";
}

BaselineMethod parse_baseline_method(const std::string& text) {
  if (text == "exhaustive") return BaselineMethod::exhaustive;
  if (text == "annealing") return BaselineMethod::annealing;
  throw Error(ErrorKind::invalid_parameters, "unknown baseline method '" + text + "'");
}

BaselineRecord brute_force_max_cut(const Graph& g, int qubit_limit) {
  const int n = g.node_count();
  if (n > qubit_limit || n > 62) {
    throw Error(ErrorKind::size_limit_exceeded,
                std::to_string(n) + " vertices exceeds the exhaustive limit of " + std::to_string(qubit_limit));
  }
  const auto adj = g.adjacency();
  CutAssignment side(n, 0);
  int cut = 0;
  int best = 0;
  std::uint64_t best_x = 0;
  std::uint64_t x = 0;

  // Flipping vertex v changes the cut by (#same-side neighbours - #other-side neighbours).
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < steps; ++k) {
    const int v = std::countr_zero(k);
    int delta = 0;
    for (int w : adj[v]) delta += (side[w] == side[v]) ? 1 : -1;
    side[v] ^= 1;
    x ^= std::uint64_t{1} << v;
    cut += delta;
    if (cut > best) {
      best = cut;
      best_x = x;
    }
  }

  BaselineRecord rec;
  rec.graph_id = g.id();
  rec.max_cut = best;
  rec.ground_energy = -best;
  rec.method = BaselineMethod::exhaustive;
  rec.witness = assignment_from_index(best_x, n);
  return rec;
}

BaselineRecord anneal_max_cut(const Graph& g, const AnnealParams& params, std::uint64_t seed) {
  if (!(params.t_start > 0) || !(params.t_end > 0) || !(params.t_start > params.t_end) || params.restarts < 1 ||
      params.sweeps_per_vertex < 1) {
    throw Error(ErrorKind::invalid_parameters,
                "annealing needs t_start > t_end > 0, restarts >= 1 and sweeps_per_vertex >= 1");
  }
  const int n = g.node_count();
  const auto adj = g.adjacency();
  const long long sweeps = static_cast<long long>(params.sweeps_per_vertex) * n;
  const double cooling = sweeps > 1 ? std::pow(params.t_end / params.t_start, 1.0 / double(sweeps - 1)) : 1.0;

  Engine rng(seed);
  CutAssignment side(n);
  CutAssignment best_side(n, 0);
  int best = -1;

  for (int r = 0; r < params.restarts; ++r) {
    for (auto& s : side) s = static_cast<std::uint8_t>(rng() >> 63);
    int cut = cut_value(g, side);
    if (cut > best) {
      best = cut;
      best_side = side;
    }
    double t = params.t_start;
    for (long long sweep = 0; sweep < sweeps; ++sweep, t *= cooling) {
      for (int step = 0; step < n; ++step) {
        const int v = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
        int gain = 0;
        for (int w : adj[v]) gain += (side[w] == side[v]) ? 1 : -1;
        if (gain >= 0 || uniform01(rng) < std::exp(gain / t)) {
          side[v] ^= 1;
          cut += gain;
          if (cut > best) {
            best = cut;
            best_side = side;
          }
        }
      }
    }
  }

  BaselineRecord rec;
  rec.graph_id = g.id();
  rec.max_cut = best;
  rec.ground_energy = -best;
  rec.method = BaselineMethod::annealing;
  rec.witness = std::move(best_side);
  return rec;
}

}  // namespace falqon
