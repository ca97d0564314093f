#include "cakewalk/clique.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cakewalk::clique {

Graph::Graph(int vertex_count) : n_(vertex_count) {
  if (vertex_count < 0) throw std::invalid_argument("Graph: negative vertex count");
  adjacency_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
  neighbors_.resize(static_cast<std::size_t>(n_));
}

bool Graph::add_edge(int a, int b) {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::out_of_range("Graph: vertex out of range");
  if (a == b) return false;
  auto& cell = adjacency_[static_cast<std::size_t>(a) * n_ + b];
  if (cell == 0) {
    cell = 1;
    adjacency_[static_cast<std::size_t>(b) * n_ + a] = 1;
    neighbors_[static_cast<std::size_t>(a)].push_back(b);
    neighbors_[static_cast<std::size_t>(b)].push_back(a);
    ++edges_;
  }
  return true;
}

namespace {

long parse_int(const std::string& token, std::size_t line) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) throw DimacsParseError(line, "malformed integer '" + token + "'");
  return value;
}

}  // namespace

DimacsGraph parse_dimacs(std::istream& in) {
  DimacsGraph out;
  bool have_problem = false;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::istringstream fields(text);
    std::string tag;
    if (!(fields >> tag) || tag == "c") continue;
    std::vector<std::string> rest;
    for (std::string tok; fields >> tok;) rest.push_back(tok);
    if (tag == "p") {
      if (have_problem) throw DimacsParseError(line, "duplicate problem line");
      if (rest.size() != 3 || (rest[0] != "edge" && rest[0] != "col")) {
        throw DimacsParseError(line, "expected 'p edge <n> <m>'");
      }
      const long n = parse_int(rest[1], line);
      parse_int(rest[2], line);
      if (n < 0) throw DimacsParseError(line, "negative vertex count");
      out.graph = Graph(static_cast<int>(n));
      have_problem = true;
    } else if (tag == "e") {
      if (!have_problem) throw DimacsParseError(line, "edge before problem line");
      if (rest.size() != 2) throw DimacsParseError(line, "expected 'e <i> <j>'");
      const long a = parse_int(rest[0], line);
      const long b = parse_int(rest[1], line);
      const long n = out.graph.vertex_count();
      if (a < 1 || a > n || b < 1 || b > n) throw DimacsParseError(line, "vertex index out of range");
      if (!out.graph.add_edge(static_cast<int>(a - 1), static_cast<int>(b - 1))) ++out.self_loops_dropped;
    } else {
      throw DimacsParseError(line, "unknown line type '" + tag + "'");
    }
  }
  if (!have_problem) throw DimacsParseError(line, "missing problem line");
  return out;
}

DimacsGraph parse_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

void write_dimacs(std::ostream& out, const Graph& g) {
  out << "p edge " << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (int a = 0; a < g.vertex_count(); ++a) {
    for (int b = a + 1; b < g.vertex_count(); ++b) {
      if (g.adjacent(a, b)) out << "e " << a + 1 << ' ' << b + 1 << '\n';
    }
  }
}

Graph random_graph(int n, double p, Rng& rng) {
  Graph g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (uniform01(rng) < p) g.add_edge(a, b);
    }
  }
  return g;
}

std::vector<int> members(const Solution& x) {
  std::vector<int> out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == kMember) out.push_back(static_cast<int>(j));
  }
  return out;
}

Solution selection(int vertex_count, const std::vector<int>& vertices) {
  Solution x(static_cast<std::size_t>(vertex_count), kNonMember);
  for (int v : vertices) x[static_cast<std::size_t>(v)] = kMember;
  return x;
}

std::size_t ordered_edge_pairs(const std::vector<int>& vertices, const Graph& g) {
  std::size_t count = 0;
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (g.adjacent(vertices[a], vertices[b])) count += 2;
    }
  }
  return count;
}

double soft_clique_value(std::size_t ordered_pairs, std::size_t size, double kappa) {
  const double u = static_cast<double>(size);
  const double denominator = std::max(u * (u - 1.0 + kappa), 1.0);
  return static_cast<double>(ordered_pairs) / denominator;
}

double soft_clique_size(const std::vector<int>& vertices, const Graph& g, double kappa) {
  return soft_clique_value(ordered_edge_pairs(vertices, g), vertices.size(), kappa);
}

double soft_clique_size(const Solution& x, const Graph& g, double kappa) {
  return soft_clique_size(members(x), g, kappa);
}

bool is_clique(const std::vector<int>& vertices, const Graph& g) {
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (!g.adjacent(vertices[a], vertices[b])) return false;
    }
  }
  return true;
}

bool is_inclusion_maximal(const std::vector<int>& vertices, const Graph& g) {
  if (!is_clique(vertices, g)) return false;
  std::vector<char> inside(static_cast<std::size_t>(g.vertex_count()), 0);
  for (int v : vertices) inside[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (inside[static_cast<std::size_t>(v)]) continue;
    const bool extends = std::all_of(vertices.begin(), vertices.end(), [&](int u) { return g.adjacent(u, v); });
    if (extends) return false;
  }
  return true;
}

bool is_local_optimum(const Solution& x, const Graph& g, double kappa) {
  const std::vector<int> u = members(x);
  const std::size_t pairs = ordered_edge_pairs(u, g);
  const double value = soft_clique_value(pairs, u.size(), kappa);
  for (int v = 0; v < g.vertex_count(); ++v) {
    std::size_t links = 0;
    for (int w : u) {
      if (g.adjacent(v, w)) ++links;
    }
    const bool inside = x[static_cast<std::size_t>(v)] == kMember;
    const double flipped = inside ? soft_clique_value(pairs - 2 * links, u.size() - 1, kappa)
                                  : soft_clique_value(pairs + 2 * links, u.size() + 1, kappa);
    if (flipped > value) return false;
  }
  return true;
}

}  // namespace cakewalk::clique
