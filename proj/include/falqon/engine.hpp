#pragma once

#include <string>
#include <vector>

#include "falqon/graph.hpp"
#include "falqon/statevector.hpp"

namespace falqon {

enum class FeedbackOrder { first = 1, second = 2 };

FeedbackOrder parse_order(int value);

struct SafeguardParams {
  double epsilon_b = 1e-9;  // |<B>| below this falls back to the first-order rule
  double beta_max = 10.0;
  double norm_tolerance = 1e-6;
};

/// Transferable artifact: time step plus the feedback parameters it produced.
struct Schedule {
  double dt = 0;
  std::vector<double> betas;
  FeedbackOrder order = FeedbackOrder::second;
  std::string train_graph_id;
  int n_train = 0;
  int safeguard_events = 0;

  int layers() const { return static_cast<int>(betas.size()); }
};

struct Trajectory {
  std::vector<double> energies;  // <H_C> before any layer, then after each layer
  double final_ratio = 0;        // set by callers that have a baseline

  double final_energy() const { return energies.back(); }
};

struct BetaDecision {
  double beta = 0;
  bool fallback = false;
  bool clamped = false;
};

/// first:  beta = -<A>
/// second: beta = -(<A> + dt <C>) / (2 dt <B>), falling back to -<A> when |<B>| < epsilon_b.
/// Both are clamped to [-beta_max, beta_max].
BetaDecision compute_beta(const FeedbackExpectations& e, double dt, FeedbackOrder order,
                          const SafeguardParams& safeguards = {});

struct FeedbackRun {
  Schedule schedule;
  Trajectory trajectory;
};

/// Feedback loop from |+>^n: beta_k is measured on psi_k, then
/// psi_{k+1} = exp(-i dt beta_k H_M) exp(-i dt H_C) psi_k.
FeedbackRun run_feedback(const CostDiagonal& d, double dt, int layers, FeedbackOrder order,
                         const SafeguardParams& safeguards = {}, StateVector* final_state = nullptr);

/// Same unitary sequence as run_feedback with the stored betas; no feedback evaluation.
Trajectory replay_schedule(const CostDiagonal& target, const Schedule& s, const SafeguardParams& safeguards = {},
                           StateVector* final_state = nullptr);

double approximation_ratio(double energy, double ground_energy);

}  // namespace falqon
