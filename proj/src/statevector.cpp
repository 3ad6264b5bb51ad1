#include "falqon/statevector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "falqon/error.hpp"

namespace falqon {

namespace {

void check_qubits(int n, int qubit_limit) {
  if (n < 1 || n > qubit_limit || n > 62) {
    throw Error(ErrorKind::size_limit_exceeded,
                std::to_string(n) + " qubits is outside [1, " + std::to_string(qubit_limit) + "]");
  }
}

void check_dims(const StateVector& psi, const CostDiagonal& d) {
  if (psi.qubits() != d.n || psi.dimension() != d.dimension()) {
    throw Error(ErrorKind::dimension_mismatch, "state has " + std::to_string(psi.qubits()) +
                                                   " qubits, cost diagonal has " + std::to_string(d.n));
  }
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

StateVector::StateVector(int n, int qubit_limit) : n_(n) {
  check_qubits(n, qubit_limit);
  amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n, std::vector<Amplitude> amplitudes) : n_(n), amps_(std::move(amplitudes)) {
  if (n < 1 || n > 62 || amps_.size() != (std::size_t{1} << n)) {
    throw Error(ErrorKind::dimension_mismatch,
                std::to_string(amps_.size()) + " amplitudes do not form a " + std::to_string(n) + "-qubit state");
  }
}

double StateVector::norm() const {
  double s = 0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector uniform_state(int n, int qubit_limit) {
  StateVector psi(n, qubit_limit);
  const Amplitude value{std::pow(2.0, -0.5 * n), 0.0};
  std::fill(psi.amplitudes().begin(), psi.amplitudes().end(), value);
  return psi;
}

void apply_cost_phase(StateVector& psi, const CostDiagonal& d, double dt) {
  check_dims(psi, d);
  if (!std::isfinite(dt)) throw Error(ErrorKind::non_finite, "time step is not finite");
  // energies are -cut in [-|E|, 0]; one phase per distinct cut size
  std::vector<Amplitude> phase(d.edge_count + 1);
  for (std::size_t k = 0; k < phase.size(); ++k) phase[k] = std::polar(1.0, dt * static_cast<double>(k));
  auto amps = psi.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) amps[x] *= phase[static_cast<std::size_t>(-d.energies[x])];
}

void apply_mixer(StateVector& psi, double angle) {
  if (!std::isfinite(angle)) throw Error(ErrorKind::non_finite, "mixer angle is not finite");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  auto amps = psi.amplitudes();
  const std::size_t dim = amps.size();
  for (int q = 0; q < psi.qubits(); ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t j = base; j < base + stride; ++j) {
        const Amplitude a0 = amps[j];
        const Amplitude a1 = amps[j + stride];
        // [[c, -is], [-is, c]]
        amps[j] = Amplitude(c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real());
        amps[j + stride] = Amplitude(c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real());
      }
    }
  }
}

double expect_cost(const StateVector& psi, const CostDiagonal& d) {
  check_dims(psi, d);
  double e = 0;
  const auto amps = psi.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) e += std::norm(amps[x]) * d.energies[x];
  return e;
}

void apply_mixer_hamiltonian(std::span<const Amplitude> v, int n, std::vector<Amplitude>& out) {
  const std::size_t dim = v.size();
  out.assign(dim, Amplitude{0.0, 0.0});
  for (int q = 0; q < n; ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t j = base; j < base + stride; ++j) {
        out[j] += v[j + stride];
        out[j + stride] += v[j];
      }
    }
  }
}

FeedbackExpectations FeedbackWorkspace::evaluate(const StateVector& psi, const CostDiagonal& d) {
  check_dims(psi, d);
  const auto amps = psi.amplitudes();
  const std::size_t dim = amps.size();
  const int n = psi.qubits();

  phi_c_.resize(dim);
  for (std::size_t x = 0; x < dim; ++x) phi_c_[x] = amps[x] * static_cast<double>(d.energies[x]);
  apply_mixer_hamiltonian(amps, n, phi_m_);
  apply_mixer_hamiltonian(phi_m_, n, phi_mm_);
  apply_mixer_hamiltonian(phi_c_, n, m_phi_c_);

  Amplitude m_c{0, 0};     // <phi_M, phi_C>
  double m_hc_m = 0;       // <phi_M, H_C phi_M>
  Amplitude mm_c{0, 0};    // <phi_MM, phi_C>
  Amplitude m_hc_c{0, 0};  // <phi_M, H_C phi_C>
  Amplitude c_hm_c{0, 0};  // <phi_C, H_M phi_C>
  Amplitude psi_c{0, 0};   // <psi, phi_C>
  for (std::size_t x = 0; x < dim; ++x) {
    const double e = d.energies[x];
    const Amplitude m_conj = std::conj(phi_m_[x]);
    m_c += m_conj * phi_c_[x];
    m_hc_m += e * std::norm(phi_m_[x]);
    mm_c += std::conj(phi_mm_[x]) * phi_c_[x];
    m_hc_c += m_conj * phi_c_[x] * e;
    c_hm_c += std::conj(phi_c_[x]) * m_phi_c_[x];
    psi_c += std::conj(amps[x]) * phi_c_[x];
  }

  FeedbackExpectations out;
  out.a_val = -2.0 * m_c.imag();
  out.b_val = m_hc_m - mm_c.real();
  out.c_val = 2.0 * m_hc_c.real() - 2.0 * c_hm_c.real();
  out.cost = psi_c.real();
  out.max_imag_residue = std::max(std::abs(c_hm_c.imag()), std::abs(psi_c.imag()));

  if (!std::isfinite(out.a_val) || !std::isfinite(out.b_val) || !std::isfinite(out.c_val) ||
      !std::isfinite(out.cost)) {
    throw Error(ErrorKind::non_finite, "feedback expectation is NaN or infinite");
  }
  return out;
}

FeedbackExpectations feedback_expectations(const StateVector& psi, const CostDiagonal& d) {
  FeedbackWorkspace ws;
  return ws.evaluate(psi, d);
}

void dump_state(std::ostream& os, const StateVector& psi) {
  const auto amps = psi.amplitudes();
  for (std::size_t x = 0; x < amps.size(); ++x) {
    os << x << ' ' << shortest(amps[x].real()) << ' ' << shortest(amps[x].imag()) << '\n';
  }
}

}  // namespace falqon
