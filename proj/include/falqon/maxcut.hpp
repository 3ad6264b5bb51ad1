#pragma once

#include <cstdint>
#include <string>

#include "falqon/graph.hpp"

namespace falqon {

enum class BaselineMethod { exhaustive, annealing };

std::string to_string(BaselineMethod method);
BaselineMethod parse_baseline_method(const std::string& text);

struct BaselineRecord {
  std::string graph_id;
  int max_cut = 0;
  int ground_energy = 0;  // -max_cut, in units of H_C
  BaselineMethod method = BaselineMethod::exhaustive;
  CutAssignment witness;
};

/// Exact maximum cut by Gray-code enumeration of the 2^(n-1) assignments with
/// vertex n-1 pinned to side 0.
BaselineRecord brute_force_max_cut(const Graph& g, int qubit_limit = kDefaultQubitLimit);

struct AnnealParams {
  int restarts = 32;
  int sweeps_per_vertex = 200;  // sweeps per restart = sweeps_per_vertex * n
  double t_start = 2.0;
  double t_end = 0.01;
};

/// Single-flip Metropolis annealing with geometric cooling; best cut over all restarts.
BaselineRecord anneal_max_cut(const Graph& g, const AnnealParams& params, std::uint64_t seed);

}  // namespace falqon
