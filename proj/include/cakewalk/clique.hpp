#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cakewalk/policy.hpp"
#include "cakewalk/random.hpp"

namespace cakewalk::clique {

// Category that marks a vertex as a member of the selected subgraph.
inline constexpr int kMember = 2;
inline constexpr int kNonMember = 1;

// Undirected simple graph over vertices 0..n-1 with O(1) adjacency tests.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int vertex_count);

  // Adds {a, b}; self-loops are ignored and reported as false.
  bool add_edge(int a, int b);

  int vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_; }
  bool adjacent(int a, int b) const { return adjacency_[static_cast<std::size_t>(a) * n_ + b] != 0; }
  const std::vector<int>& neighbors(int v) const { return neighbors_[static_cast<std::size_t>(v)]; }

 private:
  int n_ = 0;
  std::size_t edges_ = 0;
  std::vector<unsigned char> adjacency_;
  std::vector<std::vector<int>> neighbors_;
};

class DimacsParseError : public std::runtime_error {
 public:
  DimacsParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct DimacsGraph {
  Graph graph;
  std::size_t self_loops_dropped = 0;
};

// DIMACS clq text: `c` comments, one `p edge <n> <m>` line, `e <i> <j>`
// lines with 1-based vertices. Edges are symmetrised and deduplicated.
DimacsGraph parse_dimacs(std::istream& in);
DimacsGraph parse_dimacs_file(const std::string& path);
void write_dimacs(std::ostream& out, const Graph& g);

// G(n, p) random graph.
Graph random_graph(int n, double p, Rng& rng);

// 0-based members of the subgraph a selection encodes.
std::vector<int> members(const Solution& x);
Solution selection(int vertex_count, const std::vector<int>& vertices);

// Ordered pairs (i, j), i != j, of members joined by an edge.
std::size_t ordered_edge_pairs(const std::vector<int>& vertices, const Graph& g);

// Numerator / max(|U| (|U| - 1 + kappa), 1).
double soft_clique_value(std::size_t ordered_pairs, std::size_t size, double kappa);

double soft_clique_size(const Solution& x, const Graph& g, double kappa);
double soft_clique_size(const std::vector<int>& vertices, const Graph& g, double kappa);

bool is_clique(const std::vector<int>& vertices, const Graph& g);
// False for non-cliques.
bool is_inclusion_maximal(const std::vector<int>& vertices, const Graph& g);
// No single-bit flip strictly increases the soft clique size.
bool is_local_optimum(const Solution& x, const Graph& g, double kappa);

}  // namespace cakewalk::clique
