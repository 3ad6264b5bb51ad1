#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace falqon {

inline constexpr int kDefaultQubitLimit = 26;
inline constexpr int kGeneratorVersion = 1;

using Edge = std::pair<int, int>;

/// Undirected simple graph. Edges are stored normalized (i < j) and sorted.
class Graph {
 public:
  /// Validates and normalizes `edges`; throws malformed-input on self-loops,
  /// duplicates or out-of-range endpoints. `degree` is 0 for irregular graphs.
  Graph(int node_count, std::vector<Edge> edges, std::uint64_t seed = 0, int degree = -1);

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  int degree() const { return degree_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& id() const { return id_; }

  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;
  bool connected() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.seed_ == b.seed_ && a.degree_ == b.degree_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::uint64_t seed_;
  int degree_;
  std::string id_;
};

/// Common small graphs used by tests and examples.
Graph make_complete(int n);
Graph make_complete_bipartite(int left, int right);

/// Partition labels; bits[i] is the side of vertex i.
using CutAssignment = std::vector<std::uint8_t>;

CutAssignment assignment_from_index(std::uint64_t x, int n);
std::uint64_t assignment_to_index(const CutAssignment& bits);
/// Vertex 0 first, e.g. "0101".
std::string assignment_to_string(const CutAssignment& bits);
CutAssignment assignment_from_string(const std::string& text);

struct GenerateOptions {
  bool require_connected = true;
  int max_restarts = 10000;
};

/// Random d-regular graph from the pairing model with full restart on any
/// self-loop or multi-edge. Deterministic in (n, degree, seed).
Graph generate_regular(int n, int degree, std::uint64_t seed, const GenerateOptions& options = {});

int cut_value(const Graph& g, std::span<const std::uint8_t> x);

/// Energy table of H_C = -1/2 sum_{(i,j) in E} (1 - Z_i Z_j): entry x is -cut(x).
/// Bit i of the index is vertex i.
struct CostDiagonal {
  int n = 0;
  std::vector<std::int32_t> energies;
  std::string graph_id;
  std::size_t edge_count = 0;

  std::size_t dimension() const { return energies.size(); }
};

CostDiagonal build_cost_diagonal(const Graph& g, int qubit_limit = kDefaultQubitLimit);

}  // namespace falqon
