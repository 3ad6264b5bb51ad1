#include "falqon/engine.hpp"

#include <algorithm>
#include <cmath>

#include "falqon/error.hpp"

namespace falqon {

namespace {

void check_norm(const StateVector& psi, const SafeguardParams& safeguards, int layer) {
  const double norm = psi.norm();
  if (!(std::abs(norm - 1.0) <= safeguards.norm_tolerance)) {
    throw Error(ErrorKind::diverged_state,
                "state norm " + std::to_string(norm) + " after layer " + std::to_string(layer));
  }
}

void check_dt(double dt) {
  if (!std::isfinite(dt) || !(dt > 0)) throw Error(ErrorKind::invalid_parameters, "time step must be positive");
}

}  // namespace

FeedbackOrder parse_order(int value) {
  if (value == 1) return FeedbackOrder::first;
  if (value == 2) return FeedbackOrder::second;
  throw Error(ErrorKind::invalid_parameters, "order must be 1 or 2, got " + std::to_string(value));
}

BetaDecision compute_beta(const FeedbackExpectations& e, double dt, FeedbackOrder order,
                          const SafeguardParams& safeguards) {
  if (!std::isfinite(e.a_val) || !std::isfinite(e.b_val) || !std::isfinite(e.c_val)) {
    throw Error(ErrorKind::non_finite, "feedback expectations are not finite");
  }
  check_dt(dt);
  BetaDecision out;
  if (order == FeedbackOrder::first) {
    out.beta = -e.a_val;
  } else if (std::abs(e.b_val) < safeguards.epsilon_b) {
    out.beta = -e.a_val;
    out.fallback = true;
  } else {
    out.beta = -(e.a_val + dt * e.c_val) / (2.0 * dt * e.b_val);
  }
  if (std::abs(out.beta) > safeguards.beta_max) {
    out.beta = std::clamp(out.beta, -safeguards.beta_max, safeguards.beta_max);
    out.clamped = true;
  }
  return out;
}

FeedbackRun run_feedback(const CostDiagonal& d, double dt, int layers, FeedbackOrder order,
                         const SafeguardParams& safeguards, StateVector* final_state) {
  check_dt(dt);
  if (layers < 0) throw Error(ErrorKind::invalid_parameters, "layer count must be non-negative");

  FeedbackRun run;
  run.schedule.dt = dt;
  run.schedule.order = order;
  run.schedule.train_graph_id = d.graph_id;
  run.schedule.n_train = d.n;
  run.schedule.betas.reserve(layers);
  run.trajectory.energies.reserve(layers + 1);

  StateVector psi = uniform_state(d.n, std::max(d.n, kDefaultQubitLimit));
  FeedbackWorkspace ws;
  run.trajectory.energies.push_back(expect_cost(psi, d));
  for (int k = 0; k < layers; ++k) {
    const BetaDecision beta = compute_beta(ws.evaluate(psi, d), dt, order, safeguards);
    if (beta.fallback || beta.clamped) ++run.schedule.safeguard_events;
    run.schedule.betas.push_back(beta.beta);

    apply_cost_phase(psi, d, dt);
    apply_mixer(psi, dt * beta.beta);
    check_norm(psi, safeguards, k + 1);
    run.trajectory.energies.push_back(expect_cost(psi, d));
  }
  if (final_state) *final_state = std::move(psi);
  return run;
}

Trajectory replay_schedule(const CostDiagonal& target, const Schedule& s, const SafeguardParams& safeguards,
                           StateVector* final_state) {
  check_dt(s.dt);
  Trajectory traj;
  traj.energies.reserve(s.betas.size() + 1);
  StateVector psi = uniform_state(target.n, std::max(target.n, kDefaultQubitLimit));
  traj.energies.push_back(expect_cost(psi, target));
  for (std::size_t k = 0; k < s.betas.size(); ++k) {
    apply_cost_phase(psi, target, s.dt);
    apply_mixer(psi, s.dt * s.betas[k]);
    check_norm(psi, safeguards, static_cast<int>(k) + 1);
    traj.energies.push_back(expect_cost(psi, target));
  }
  if (final_state) *final_state = std::move(psi);
  return traj;
}

double approximation_ratio(double energy, double ground_energy) {
  if (!(ground_energy < 0)) {
    throw Error(ErrorKind::zero_or_positive_ground_energy,
                "ground energy " + std::to_string(ground_energy) + " is not negative");
  }
  return energy / ground_energy;
}

}  // namespace falqon
