#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dense_reference.hpp"
#include "falqon/error.hpp"
#include "falqon/seeding.hpp"
#include "falqon/statevector.hpp"

using namespace falqon;
namespace ref = falqon::testing;

namespace {

const Graph& triangle() {
  static const Graph g(3, {{0, 1}, {1, 2}, {0, 2}});
  return g;
}

StateVector random_state(int n, Engine& rng) {
  std::vector<Amplitude> amps(std::size_t{1} << n);
  double norm = 0;
  for (auto& a : amps) {
    a = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return StateVector(n, std::move(amps));
}

StateVector basis_state(int n, std::size_t x) {
  std::vector<Amplitude> amps(std::size_t{1} << n);
  amps[x] = 1.0;
  return StateVector(n, std::move(amps));
}

ref::Vec to_eigen(const StateVector& psi) {
  ref::Vec v(static_cast<Eigen::Index>(psi.dimension()));
  for (std::size_t i = 0; i < psi.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

double max_diff(const StateVector& psi, const ref::Vec& v) {
  double m = 0;
  for (std::size_t i = 0; i < psi.dimension(); ++i) m = std::max(m, std::abs(psi[i] - v(Eigen::Index(i))));
  return m;
}

}  // namespace

TEST_CASE("uniform state amplitudes") {
  const StateVector one = uniform_state(1);
  CHECK(one[0].real() == doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-15));
  CHECK(one[1].imag() == 0.0);
  const StateVector two = uniform_state(2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(two[i] == Amplitude(0.5, 0.0));
  for (int n = 1; n <= 16; ++n) CHECK(std::abs(uniform_state(n).norm() - 1.0) < 1e-14);
  CHECK_THROWS_AS(uniform_state(0), Error);
  CHECK_THROWS_AS(uniform_state(27), Error);
}

TEST_CASE("cost phase") {
  const CostDiagonal d = build_cost_diagonal(triangle());

  StateVector psi = uniform_state(3);
  const StateVector before = psi;
  apply_cost_phase(psi, d, 0.0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(psi[i] == before[i]);

  StateVector basis = basis_state(3, 5);
  apply_cost_phase(basis, d, 0.77);
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::norm(basis[i]) == doctest::Approx(i == 5 ? 1.0 : 0.0));

  // oracle: general matrix exponential of -i dt H_C with H_C from Pauli products
  StateVector u = uniform_state(3);
  apply_cost_phase(u, d, 0.37);
  const ref::Mat hc = ref::cost_hamiltonian(3, triangle().edges());
  const ref::Vec expected = ref::evolution(hc, 0.37) * ref::uniform(3);
  CHECK(max_diff(u, expected) < 1e-12);

  StateVector wrong = uniform_state(4);
  CHECK_THROWS_AS(apply_cost_phase(wrong, d, 0.1), Error);
}

TEST_CASE("mixer") {
  Engine rng(1);
  StateVector psi = random_state(3, rng);
  const StateVector before = psi;
  apply_mixer(psi, 0.0);
  for (std::size_t i = 0; i < 8; ++i) CHECK(psi[i] == before[i]);

  StateVector zero = basis_state(1, 0);
  apply_mixer(zero, std::numbers::pi / 2);
  CHECK(std::abs(zero[0]) < 1e-15);
  CHECK(std::abs(zero[1] - Amplitude(0, -1)) < 1e-15);

  // oracle: explicit tensor product of single-qubit rotations
  StateVector r = random_state(3, rng);
  const ref::Vec v = to_eigen(r);
  apply_mixer(r, 0.3);
  ref::Mat rx(2, 2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  rx << c, ref::cd(0, -s), ref::cd(0, -s), c;
  const ref::Mat u = ref::tensor({rx, rx, rx});
  CHECK(max_diff(r, u * v) < 1e-12);
  CHECK(max_diff(r, ref::evolution(ref::mixer_hamiltonian(3), 0.3) * v) < 1e-12);

  CHECK_THROWS_AS(apply_mixer(r, std::nan("")), Error);
}

TEST_CASE("norm is preserved over 16 layers") {
  Engine rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 8;
    const Graph g = generate_regular(n % 2 ? n + 1 : n, 3, rng());
    const CostDiagonal d = build_cost_diagonal(g);
    StateVector psi = random_state(d.n, rng);
    for (int k = 0; k < 16; ++k) {
      apply_cost_phase(psi, d, 2 * uniform01(rng));
      apply_mixer(psi, 10 * (uniform01(rng) - 0.5));
    }
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("cost expectation") {
  const CostDiagonal tri = build_cost_diagonal(triangle());
  CHECK(expect_cost(uniform_state(3), tri) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(expect_cost(basis_state(3, 0b010), tri) == -2.0);
  CHECK(expect_cost(uniform_state(4), build_cost_diagonal(make_complete(4))) ==
        doctest::Approx(-3.0).epsilon(1e-15));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = generate_regular(12, 3, s);
    CHECK(std::abs(expect_cost(uniform_state(12), build_cost_diagonal(g)) + g.edge_count() / 2.0) < 1e-12);
  }
}

TEST_CASE("feedback expectations on eigenstates") {
  const CostDiagonal tri = build_cost_diagonal(triangle());
  for (const Graph& g : {triangle(), make_complete(4), generate_regular(8, 3, 4)}) {
    const CostDiagonal d = build_cost_diagonal(g);
    const auto e = feedback_expectations(uniform_state(g.node_count()), d);
    CHECK(std::abs(e.a_val) < 1e-12);
    CHECK(std::abs(e.b_val) < 1e-12);
    for (std::size_t x = 0; x < d.dimension(); x += 3) {
      const auto eb = feedback_expectations(basis_state(g.node_count(), x), d);
      CHECK(eb.a_val == 0.0);
      CHECK(eb.c_val == 0.0);
      CHECK(eb.cost == d.energies[x]);
    }
  }
  const auto e000 = feedback_expectations(basis_state(3, 0), tri);
  CHECK(e000.b_val == -6.0);

  // cross-check the same value from explicit commutator matrices
  const ref::DenseOperators ops(3, triangle().edges());
  CHECK(ref::expectation(to_eigen(basis_state(3, 0)), ops.b).real() == doctest::Approx(-6.0).epsilon(1e-14));
}

TEST_CASE("feedback expectations match dense commutators on random states") {
  Engine rng(10);
  const Graph graphs[] = {make_complete(4), generate_regular(6, 3, 6), make_complete_bipartite(3, 3)};
  for (const Graph& g : graphs) {
    const ref::DenseOperators ops(g.node_count(), g.edges());
    const CostDiagonal d = build_cost_diagonal(g);
    for (int t = 0; t < 60; ++t) {
      const StateVector psi = random_state(g.node_count(), rng);
      const auto e = feedback_expectations(psi, d);
      const ref::Vec v = to_eigen(psi);
      CHECK(std::abs(e.a_val - ref::expectation(v, ops.a).real()) < 1e-10);
      CHECK(std::abs(e.b_val - ref::expectation(v, ops.b).real()) < 1e-10);
      CHECK(std::abs(e.c_val - ref::expectation(v, ops.c).real()) < 1e-10);
      CHECK(std::abs(e.cost - ref::expectation(v, ops.hc).real()) < 1e-10);
      CHECK(e.max_imag_residue < 1e-9);
    }
  }
}

TEST_CASE("feedback expectations dimension check") {
  const CostDiagonal d = build_cost_diagonal(make_complete(4));
  CHECK_THROWS_AS(feedback_expectations(uniform_state(3), d), Error);
  CHECK_THROWS_AS(expect_cost(uniform_state(5), d), Error);
}

TEST_CASE("state dump lists every amplitude at full precision") {
  StateVector psi = uniform_state(2);
  apply_mixer(psi, 0.1);
  std::ostringstream os;
  dump_state(os, psi);
  std::istringstream is(os.str());
  std::size_t idx;
  double re, im;
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(static_cast<bool>(is >> idx >> re >> im));
    CHECK(idx == i);
    CHECK(re == psi[i].real());
    CHECK(im == psi[i].imag());
  }
}
