#pragma once

// Independent dense-matrix model of the feedback loop, used only as a test
// oracle. Operators are built from explicit Pauli Kronecker products and
// evolved with a general matrix exponential; nothing here touches the
// statevector kernel.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace falqon::testing {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cd = std::complex<double>;

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Tensor product with ops[q] on qubit q; qubit 0 is the least significant bit,
/// so it is the rightmost factor.
inline Mat tensor(const std::vector<Mat>& ops) {
  Mat out = Mat::Identity(1, 1);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) out = kron(out, *it);
  return out;
}

inline Mat on_qubits(int n, const std::vector<std::pair<int, Mat>>& placed) {
  std::vector<Mat> ops(n, Mat::Identity(2, 2));
  for (const auto& [q, m] : placed) ops[q] = m;
  return tensor(ops);
}

/// H_C = -1/2 sum_{(i,j)} (1 - Z_i Z_j)
inline Mat cost_hamiltonian(int n, const std::vector<std::pair<int, int>>& edges) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (const auto& [i, j] : edges) {
    h -= 0.5 * (Mat::Identity(dim, dim) - on_qubits(n, {{i, pauli_z()}, {j, pauli_z()}}));
  }
  return h;
}

/// H_M = sum_i X_i
inline Mat mixer_hamiltonian(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int q = 0; q < n; ++q) h += on_qubits(n, {{q, pauli_x()}});
  return h;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

inline cd expectation(const Vec& psi, const Mat& op) { return psi.dot(op * psi); }

struct DenseOperators {
  Mat hc, hm, a, b, c;

  DenseOperators(int n, const std::vector<std::pair<int, int>>& edges)
      : hc(cost_hamiltonian(n, edges)), hm(mixer_hamiltonian(n)) {
    const Mat k = commutator(hm, hc);
    a = cd(0, 1) * k;
    b = 0.5 * commutator(k, hm);
    c = commutator(k, hc);
  }
};

inline Vec uniform(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  return Vec::Constant(dim, cd(std::pow(2.0, -0.5 * n), 0));
}

/// exp(-i t H) by the general matrix exponential.
inline Mat evolution(const Mat& h, double t) { return (cd(0, -t) * h).exp(); }

struct DenseRun {
  std::vector<double> betas;
  std::vector<double> energies;
  Vec state;
};

/// Reference feedback loop. Beta rule written out independently of the
/// library: first order -<A>; second order -(<A> + dt <C>) / (2 dt <B>) with
/// fallback to -<A> when |<B>| < eps_b, then clamp to beta_max.
inline DenseRun dense_feedback(int n, const std::vector<std::pair<int, int>>& edges, double dt, int layers,
                               int order, double eps_b = 1e-9, double beta_max = 10.0) {
  const DenseOperators ops(n, edges);
  const Mat cost_step = evolution(ops.hc, dt);
  DenseRun run;
  Vec psi = uniform(n);
  run.energies.push_back(expectation(psi, ops.hc).real());
  for (int k = 0; k < layers; ++k) {
    const double a = expectation(psi, ops.a).real();
    const double b = expectation(psi, ops.b).real();
    const double c = expectation(psi, ops.c).real();
    double beta = -a;
    if (order == 2 && std::abs(b) >= eps_b) beta = -(a + dt * c) / (2 * dt * b);
    beta = std::max(-beta_max, std::min(beta_max, beta));
    run.betas.push_back(beta);
    psi = evolution(ops.hm, dt * beta) * (cost_step * psi);
    run.energies.push_back(expectation(psi, ops.hc).real());
  }
  run.state = psi;
  return run;
}

/// Reference replay of a fixed beta sequence.
inline DenseRun dense_replay(int n, const std::vector<std::pair<int, int>>& edges, double dt,
                             const std::vector<double>& betas) {
  const DenseOperators ops(n, edges);
  const Mat cost_step = evolution(ops.hc, dt);
  DenseRun run;
  run.betas = betas;
  Vec psi = uniform(n);
  run.energies.push_back(expectation(psi, ops.hc).real());
  for (double beta : betas) {
    psi = evolution(ops.hm, dt * beta) * (cost_step * psi);
    run.energies.push_back(expectation(psi, ops.hc).real());
  }
  run.state = psi;
  return run;
}

}  // namespace falqon::testing
