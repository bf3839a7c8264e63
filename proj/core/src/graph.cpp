#include "decsliding/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace decsliding {

void require_dimension(const AgentVectors& xs, Eigen::Index dim, const char* where) {
  for (const auto& x : xs) {
    if (x.size() != dim) {
      throw ArgumentError(std::string(where) + ": dimension mismatch (expected " +
                          std::to_string(dim) + ", got " + std::to_string(x.size()) + ")");
    }
  }
}

double stacked_norm(const AgentVectors& xs) {
  double s = 0.0;
  for (const auto& x : xs) s += x.squaredNorm();
  return std::sqrt(s);
}

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "ring") return TopologyKind::ring;
  if (name == "path") return TopologyKind::path;
  if (name == "complete") return TopologyKind::complete;
  if (name == "erdos_renyi" || name == "er") return TopologyKind::erdos_renyi;
  throw ArgumentError("unknown topology kind '" + name +
                      "' (expected ring, path, complete or erdos_renyi)");
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::path: return "path";
    case TopologyKind::complete: return "complete";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
  }
  return "unknown";
}

bool is_connected(int m, const std::vector<Edge>& edges) {
  if (m <= 0) return false;
  std::vector<std::vector<int>> adj(m);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(m, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == m;
}

Topology Topology::from_edges(int m, std::vector<Edge> edges) {
  if (m < 2) throw ArgumentError("topology needs at least 2 agents, got m = " + std::to_string(m));
  for (auto& e : edges) {
    if (e.first < 0 || e.second < 0 || e.first >= m || e.second >= m) {
      throw ArgumentError("edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                          ") out of range for m = " + std::to_string(m));
    }
    if (e.first == e.second) {
      throw ArgumentError("self-edges are implicit; got (" + std::to_string(e.first) + ", " +
                          std::to_string(e.second) + ")");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (!is_connected(m, edges)) throw TopologyError("graph is not connected");

  Topology t;
  t.m_ = m;
  t.edges_ = std::move(edges);
  t.neighbors_.assign(m, {});
  for (int i = 0; i < m; ++i) t.neighbors_[i].push_back(i);
  for (const auto& [i, j] : t.edges_) {
    t.neighbors_[i].push_back(j);
    t.neighbors_[j].push_back(i);
  }
  t.coefficients_.assign(m, {});
  for (int i = 0; i < m; ++i) {
    auto& nb = t.neighbors_[i];
    std::sort(nb.begin(), nb.end());
    const int deg = static_cast<int>(nb.size()) - 1;
    t.d_max_ = std::max(t.d_max_, deg);
    for (AgentId j : nb) t.coefficients_[i].push_back(j == i ? deg : -1);
  }
  return t;
}

int Topology::laplacian(AgentId i, AgentId j) const {
  const auto& nb = neighbors_.at(i);
  auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0;
  return coefficients_[i][static_cast<std::size_t>(it - nb.begin())];
}

Eigen::MatrixXd Topology::dense_laplacian() const {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (std::size_t n = 0; n < neighbors_[i].size(); ++n) {
      lap(i, neighbors_[i][n]) = coefficients_[i][n];
    }
  }
  return lap;
}

namespace {

std::vector<Edge> erdos_renyi_edges(int m, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace

Topology build_topology(const TopologySpec& spec) {
  const int m = spec.m;
  if (m < 2) throw ArgumentError("build_topology: m must be >= 2, got " + std::to_string(m));
  std::vector<Edge> edges;
  switch (spec.kind) {
    case TopologyKind::path:
      for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      break;
    case TopologyKind::ring:
      for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      if (m > 2) edges.emplace_back(0, m - 1);
      break;
    case TopologyKind::complete:
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      break;
    case TopologyKind::erdos_renyi: {
      if (!(spec.p > 0.0 && spec.p <= 1.0)) {
        throw ArgumentError("erdos_renyi: p must lie in (0, 1], got " + std::to_string(spec.p));
      }
      std::mt19937_64 rng(spec.seed);
      for (int attempt = 0; attempt < kErdosRenyiMaxAttempts; ++attempt) {
        edges = erdos_renyi_edges(m, spec.p, rng);
        if (is_connected(m, edges)) return Topology::from_edges(m, std::move(edges));
      }
      throw TopologyError("erdos_renyi: no connected graph in " +
                          std::to_string(kErdosRenyiMaxAttempts) + " draws (m = " +
                          std::to_string(m) + ", p = " + std::to_string(spec.p) + ")");
    }
  }
  return Topology::from_edges(m, std::move(edges));
}

Vector apply_laplacian_row(const Topology& t, AgentId i, const AgentVectors& xs,
                           MessageCounter* counter) {
  if (i < 0 || i >= t.size()) throw ArgumentError("apply_laplacian_row: agent id out of range");
  if (static_cast<int>(xs.size()) != t.size()) {
    throw ArgumentError("apply_laplacian_row: expected one vector per agent");
  }
  return apply_laplacian_row(
      t, i, [&xs](AgentId j) -> const Vector& { return xs[static_cast<std::size_t>(j)]; },
      counter);
}

AgentVectors apply_laplacian(const Topology& t, const AgentVectors& xs) {
  if (static_cast<int>(xs.size()) != t.size()) {
    throw ArgumentError("apply_laplacian: expected one vector per agent");
  }
  if (!xs.empty()) require_dimension(xs, xs.front().size(), "apply_laplacian");
  AgentVectors out;
  out.reserve(xs.size());
  for (int i = 0; i < t.size(); ++i) out.push_back(apply_laplacian_row(t, i, xs));
  return out;
}

double feasibility_residual(const Topology& t, const AgentVectors& xs) {
  return stacked_norm(apply_laplacian(t, xs));
}

LaplacianReport check_laplacian(const Topology& t) {
  LaplacianReport r;
  const Eigen::MatrixXd lap = t.dense_laplacian();
  r.symmetric = (lap - lap.transpose()).cwiseAbs().maxCoeff() == 0.0;
  r.zero_row_sums = (lap.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  r.diagonal_matches_degree = true;
  for (int i = 0; i < t.size(); ++i) {
    if (lap(i, i) != static_cast<double>(t.neighbors(i).size() - 1)) r.diagonal_matches_degree = false;
    for (int j = 0; j < t.size(); ++j) {
      if (i == j) continue;
      const bool edge = std::binary_search(t.edges().begin(), t.edges().end(),
                                           Edge{std::min(i, j), std::max(i, j)});
      if (lap(i, j) != (edge ? -1.0 : 0.0)) r.diagonal_matches_degree = false;
    }
  }
  r.connected = is_connected(t.size(), t.edges());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = eig.eigenvalues().minCoeff();
  return r;
}

void write_edge_list(std::ostream& os, const Topology& t) {
  os << t.size() << '\n';
  for (const auto& [i, j] : t.edges()) os << i << ' ' << j << '\n';
}

Topology read_edge_list(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  int m = -1;
  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (m < 0) {
      if (!(ls >> m)) throw ParseError("expected agent count", lineno);
      continue;
    }
    int i = 0, j = 0;
    if (!(ls >> i >> j)) throw ParseError("expected 'i j' edge", lineno);
    std::string rest;
    if (ls >> rest) throw ParseError("trailing tokens after edge", lineno);
    edges.emplace_back(i, j);
  }
  if (m < 0) throw ParseError("empty edge list", 0);
  return Topology::from_edges(m, std::move(edges));
}

}  // namespace decsliding
