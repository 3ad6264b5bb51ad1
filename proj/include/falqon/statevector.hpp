#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "falqon/graph.hpp"

namespace falqon {

using Amplitude = std::complex<double>;

/// Dense 2^n statevector. Bit i of a basis index is qubit (vertex) i.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n, int qubit_limit = kDefaultQubitLimit);
  StateVector(int n, std::vector<Amplitude> amplitudes);

  int qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude& operator[](std::size_t i) { return amps_[i]; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;

 private:
  int n_ = 0;
  std::vector<Amplitude> amps_;
};

/// |+>^n: every amplitude 2^(-n/2).
StateVector uniform_state(int n, int qubit_limit = kDefaultQubitLimit);

/// psi[x] *= exp(-i dt E[x]).
void apply_cost_phase(StateVector& psi, const CostDiagonal& d, double dt);

/// exp(-i angle H_M) with H_M = sum_i X_i, applied qubit by qubit.
void apply_mixer(StateVector& psi, double angle);

double expect_cost(const StateVector& psi, const CostDiagonal& d);

struct FeedbackExpectations {
  double a_val = 0;  // <i[H_M, H_C]>
  double b_val = 0;  // <1/2 [[H_M, H_C], H_M]>
  double c_val = 0;  // <[[H_M, H_C], H_C]>
  double cost = 0;   // <H_C>
  double max_imag_residue = 0;
};

/// Scratch buffers reused across layers so a run holds at most four extra
/// vectors besides the state.
class FeedbackWorkspace {
 public:
  FeedbackExpectations evaluate(const StateVector& psi, const CostDiagonal& d);

 private:
  std::vector<Amplitude> phi_c_;
  std::vector<Amplitude> phi_m_;
  std::vector<Amplitude> phi_mm_;
  std::vector<Amplitude> m_phi_c_;
};

/// Evaluates <A>, <B>, <C>, <H_C> from the auxiliary vectors
///   phi_C = H_C psi, phi_M = H_M psi, phi_MM = H_M phi_M
/// using
///   <A> = -2 Im<phi_M, phi_C>
///   <B> = <phi_M, H_C phi_M> - Re<phi_MM, phi_C>
///   <C> = 2 Re<phi_M, H_C phi_C> - 2 <phi_C, H_M phi_C>
/// Throws non-finite if any value is NaN/inf.
FeedbackExpectations feedback_expectations(const StateVector& psi, const CostDiagonal& d);

/// H_M v into out (out resized); out[y] = sum_i v[y ^ (1 << i)].
void apply_mixer_hamiltonian(std::span<const Amplitude> v, int n, std::vector<Amplitude>& out);

/// One "index real imag" line per amplitude, full precision.
void dump_state(std::ostream& os, const StateVector& psi);

}  // namespace falqon
