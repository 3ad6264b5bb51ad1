#include "falqon/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <set>

#include "falqon/error.hpp"
#include "falqon/seeding.hpp"

namespace falqon {

namespace {

std::string graph_digest(int n, int degree, std::uint64_t seed, const std::vector<Edge>& edges) {
  std::string canon = "falqon-graph|v" + std::to_string(kGeneratorVersion) + "|" + std::to_string(n) +
                      "|" + std::to_string(degree) + "|" + std::to_string(seed) + "|";
  for (const auto& [i, j] : edges) {
    canon += std::to_string(i);
    canon += '-';
    canon += std::to_string(j);
    canon += ',';
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(fnv1a64(canon))));
  return buf;
}

}  // namespace

Graph::Graph(int node_count, std::vector<Edge> edges, std::uint64_t seed, int degree)
    : n_(node_count), edges_(std::move(edges)), seed_(seed), degree_(degree) {
  if (n_ < 1) throw Error(ErrorKind::malformed_input, "node count must be positive");
  for (auto& [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
      throw Error(ErrorKind::malformed_input, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") has an endpoint outside [0, " + std::to_string(n_) + ")");
    }
    if (i == j) throw Error(ErrorKind::malformed_input, "self-loop on vertex " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw Error(ErrorKind::malformed_input,
                "duplicate edge (" + std::to_string(dup->first) + "," + std::to_string(dup->second) + ")");
  }
  const auto deg = degrees();
  const bool regular = std::all_of(deg.begin(), deg.end(), [&](int d) { return d == deg.front(); });
  if (degree_ < 0) {
    degree_ = regular ? deg.front() : 0;
  } else if (degree_ > 0 && (!regular || deg.front() != degree_)) {
    throw Error(ErrorKind::malformed_input, "graph is not " + std::to_string(degree_) + "-regular");
  }
  id_ = graph_digest(n_, degree_, seed_, edges_);
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n_, 0);
  for (const auto& [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n_);
  for (const auto& [i, j] : edges_) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

bool Graph::connected() const {
  const auto adj = adjacency();
  std::vector<char> seen(n_, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n_;
}

Graph make_complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, std::move(edges));
}

Graph make_complete_bipartite(int left, int right) {
  std::vector<Edge> edges;
  for (int i = 0; i < left; ++i)
    for (int j = 0; j < right; ++j) edges.emplace_back(i, left + j);
  return Graph(left + right, std::move(edges));
}

CutAssignment assignment_from_index(std::uint64_t x, int n) {
  CutAssignment bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((x >> i) & 1U);
  return bits;
}

std::uint64_t assignment_to_index(const CutAssignment& bits) {
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) x |= std::uint64_t{1} << i;
  return x;
}

std::string assignment_to_string(const CutAssignment& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

CutAssignment assignment_from_string(const std::string& text) {
  CutAssignment bits;
  bits.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::malformed_input,
                  "assignment string has '" + std::string(1, c) + "' at position " + std::to_string(pos));
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return bits;
}

Graph generate_regular(int n, int degree, std::uint64_t seed, const GenerateOptions& options) {
  if (degree < 1 || degree >= n || (static_cast<long long>(n) * degree) % 2 != 0) {
    throw Error(ErrorKind::invalid_parameters,
                "no simple " + std::to_string(degree) + "-regular graph on " + std::to_string(n) + " vertices");
  }

  Engine rng(seed);
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * degree);
  std::set<Edge> seen;

  for (int attempt = 0; attempt < options.max_restarts; ++attempt) {
    stubs.clear();
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      std::swap(stubs[i], stubs[uniform_below(rng, i + 1)]);
    }

    seen.clear();
    bool simple = true;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      int a = stubs[k], b = stubs[k + 1];
      if (a == b) {
        simple = false;
        break;
      }
      if (a > b) std::swap(a, b);
      if (!seen.emplace(a, b).second) {
        simple = false;
        break;
      }
    }
    if (!simple) continue;

    Graph g(n, std::vector<Edge>(seen.begin(), seen.end()), seed, degree);
    if (options.require_connected && !g.connected()) {
      // fresh stream so a disconnected draw is not revisited
      rng.seed(derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(attempt),
                           SeedPurpose::regenerate));
      continue;
    }
    return g;
  }
  throw Error(ErrorKind::generation_exhausted,
              "no simple" + std::string(options.require_connected ? " connected " : " ") +
                  std::to_string(degree) + "-regular graph on " + std::to_string(n) + " vertices after " +
                  std::to_string(options.max_restarts) + " restarts");
}

int cut_value(const Graph& g, std::span<const std::uint8_t> x) {
  if (x.size() != static_cast<std::size_t>(g.node_count())) {
    throw Error(ErrorKind::length_mismatch, "assignment has " + std::to_string(x.size()) +
                                                " entries for a graph with " + std::to_string(g.node_count()) +
                                                " vertices");
  }
  int cut = 0;
  for (const auto& [i, j] : g.edges()) cut += (x[i] != x[j]) ? 1 : 0;
  return cut;
}

CostDiagonal build_cost_diagonal(const Graph& g, int qubit_limit) {
  const int n = g.node_count();
  if (n > qubit_limit || n > 62) {
    throw Error(ErrorKind::size_limit_exceeded,
                std::to_string(n) + " qubits exceeds the limit of " + std::to_string(qubit_limit));
  }
  CostDiagonal d;
  d.n = n;
  d.graph_id = g.id();
  d.edge_count = g.edge_count();
  const std::size_t dim = std::size_t{1} << n;
  d.energies.assign(dim, 0);

  std::vector<std::uint64_t> masks;
  masks.reserve(g.edge_count());
  for (const auto& [i, j] : g.edges()) masks.push_back((std::uint64_t{1} << i) | (std::uint64_t{1} << j));

  // An edge is cut exactly when one of its two bits is set.
  for (std::size_t x = 0; x < dim; ++x) {
    std::int32_t cut = 0;
    for (std::uint64_t m : masks) {
      const std::uint64_t both = x & m;
      cut += (both != 0 && both != m) ? 1 : 0;
    }
    d.energies[x] = -cut;
  }
  return d;
}

}  // namespace falqon
