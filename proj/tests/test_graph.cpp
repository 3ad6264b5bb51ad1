#include <doctest.h>

#include <algorithm>

#include "falqon/error.hpp"
#include "falqon/graph.hpp"
#include "falqon/seeding.hpp"

using namespace falqon;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::internal;
}

}  // namespace

TEST_CASE("graph construction normalizes and rejects non-simple input") {
  Graph g(4, {{2, 1}, {0, 3}});
  CHECK(g.edges() == std::vector<Edge>{{0, 3}, {1, 2}});
  CHECK(g.degree() == 1);
  CHECK(kind_of([] { Graph(4, {{3, 3}}); }) == ErrorKind::malformed_input);
  CHECK(kind_of([] { Graph(4, {{0, 4}}); }) == ErrorKind::malformed_input);
  CHECK(kind_of([] { Graph(4, {{0, 1}, {1, 0}}); }) == ErrorKind::malformed_input);
  CHECK(kind_of([] { Graph(4, {{0, 1}}, 0, 3); }) == ErrorKind::malformed_input);
}

TEST_CASE("generate_regular on 4 vertices is K4") {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 0xdeadbeefULL}) {
    const Graph g = generate_regular(4, 3, seed);
    CHECK(g.edges() == make_complete(4).edges());
  }
}

TEST_CASE("generate_regular is deterministic in its arguments") {
  const Graph a = generate_regular(6, 3, 1234);
  const Graph b = generate_regular(6, 3, 1234);
  CHECK(a == b);
  CHECK(a.id() == b.id());
  const Graph c = generate_regular(6, 3, 1235);
  CHECK(a.id() != c.id());
}

TEST_CASE("generate_regular rejects impossible parameters") {
  CHECK(kind_of([] { generate_regular(5, 3, 1); }) == ErrorKind::invalid_parameters);
  CHECK(kind_of([] { generate_regular(4, 4, 1); }) == ErrorKind::invalid_parameters);
  CHECK(kind_of([] { generate_regular(4, 0, 1); }) == ErrorKind::invalid_parameters);
}

TEST_CASE("generate_regular exhausts its retry budget") {
  GenerateOptions opt;
  opt.max_restarts = 0;
  CHECK(kind_of([&] { generate_regular(6, 3, 1, opt); }) == ErrorKind::generation_exhausted);
  // 2 vertices of degree 1 is always connected, 4 vertices of degree 1 never is
  opt.max_restarts = 50;
  CHECK(kind_of([&] { generate_regular(4, 1, 1, opt); }) == ErrorKind::generation_exhausted);
  opt.require_connected = false;
  CHECK(generate_regular(4, 1, 1, opt).edge_count() == 2);
}

TEST_CASE("generated graphs are simple, regular and connected") {
  for (int n : {6, 8, 10, 12, 14, 16, 20, 24}) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      const Graph g = generate_regular(n, 3, derive_seed(7, n, i, SeedPurpose::test));
      const auto deg = g.degrees();
      CHECK(std::all_of(deg.begin(), deg.end(), [](int d) { return d == 3; }));
      CHECK(g.edge_count() * 2 == static_cast<std::size_t>(n) * 3);
      CHECK(g.connected());
      for (const auto& [a, b] : g.edges()) CHECK(a < b);
    }
  }
}

TEST_CASE("cut_value examples") {
  const Graph tri = triangle();
  CHECK(cut_value(tri, assignment_from_string("010")) == 2);
  CHECK(cut_value(tri, assignment_from_string("000")) == 0);
  CHECK(cut_value(make_complete(4), assignment_from_string("0011")) == 4);
  CHECK(kind_of([&] { cut_value(tri, assignment_from_string("01")); }) == ErrorKind::length_mismatch);
}

TEST_CASE("cut_value is invariant under complement") {
  const Graph g = generate_regular(10, 3, 42);
  const std::uint64_t mask = (1ULL << 10) - 1;
  Engine rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t x = rng() & mask;
    CHECK(cut_value(g, assignment_from_index(x, 10)) == cut_value(g, assignment_from_index(x ^ mask, 10)));
  }
}

TEST_CASE("cost diagonal matches cut values") {
  const Graph tri = triangle();
  const CostDiagonal d = build_cost_diagonal(tri);
  CHECK(d.energies[0] == 0);
  CHECK(d.energies[0b001] == -2);  // vertex 0 separated
  CHECK(d.energies[0b100] == -2);  // vertex 2 separated

  const Graph g = generate_regular(12, 3, 3);
  const CostDiagonal dg = build_cost_diagonal(g);
  const std::size_t mask = dg.dimension() - 1;
  int lowest = 0;
  for (std::size_t x = 0; x < dg.dimension(); ++x) {
    CHECK(dg.energies[x] == -cut_value(g, assignment_from_index(x, 12)));
    CHECK(dg.energies[x] == dg.energies[x ^ mask]);
    lowest = std::min(lowest, int(dg.energies[x]));
  }
  CHECK(dg.energies[0] == 0);
  CHECK(lowest >= -static_cast<int>(g.edge_count()));
}

TEST_CASE("cost diagonal respects the qubit limit") {
  const Graph g = generate_regular(8, 3, 1);
  CHECK(kind_of([&] { build_cost_diagonal(g, 6); }) == ErrorKind::size_limit_exceeded);
}

TEST_CASE("assignment strings put vertex 0 first") {
  const CutAssignment bits = assignment_from_index(0b0110, 4);
  CHECK(assignment_to_string(bits) == "0110");
  CHECK(assignment_to_index(assignment_from_string("1000")) == 1);
  CHECK(kind_of([] { assignment_from_string("01x"); }) == ErrorKind::malformed_input);
}
