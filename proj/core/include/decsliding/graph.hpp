#ifndef DECSLIDING_GRAPH_HPP
#define DECSLIDING_GRAPH_HPP

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "decsliding/types.hpp"

namespace decsliding {

enum class TopologyKind { ring, path, complete, erdos_renyi };

TopologyKind parse_topology_kind(const std::string& name);
std::string to_string(TopologyKind kind);

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  int m = 0;
  double p = 0.5;  // edge probability, erdos_renyi only
  std::uint64_t seed = 0;
};

using Edge = std::pair<AgentId, AgentId>;

/// Undirected, connected communication graph together with its Laplacian.
///
/// Neighborhoods follow the self-loop convention: neighbors(i) contains i
/// itself, but the Laplacian diagonal is |N_i| - 1, so the self-loop carries
/// no extra weight. Rows are stored sparsely as (neighbor, coefficient)
/// pairs sorted by neighbor id. Immutable after construction.
class Topology {
 public:
  /// Builds from an edge list. Duplicate pairs and (j, i) mirrors collapse.
  /// Throws ArgumentError on self-edges, out-of-range ids or m < 2, and
  /// TopologyError when the graph is disconnected.
  static Topology from_edges(int m, std::vector<Edge> edges);

  int size() const noexcept { return m_; }
  int max_degree() const noexcept { return d_max_; }
  int degree(AgentId i) const { return static_cast<int>(neighbors_.at(i).size()) - 1; }

  /// N_i including i, ascending.
  std::span<const AgentId> neighbors(AgentId i) const { return neighbors_.at(i); }
  /// Laplacian coefficients aligned with neighbors(i).
  std::span<const int> laplacian_row(AgentId i) const { return coefficients_.at(i); }

  /// Sorted (i < j) edge list.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  int laplacian(AgentId i, AgentId j) const;
  Eigen::MatrixXd dense_laplacian() const;

 private:
  Topology() = default;

  int m_ = 0;
  int d_max_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> neighbors_;
  std::vector<std::vector<int>> coefficients_;
};

/// ring, path, complete, or Erdős–Rényi G(m, p). Erdős–Rényi draws are
/// resampled (same RNG stream, so still seed-deterministic) until connected,
/// at most kErdosRenyiMaxAttempts times.
Topology build_topology(const TopologySpec& spec);

inline constexpr int kErdosRenyiMaxAttempts = 1000;

/// Breadth-first reachability from agent 0 over an adjacency list.
bool is_connected(int m, const std::vector<Edge>& edges);

/// Counts vector slots read by Laplacian row applications. Each slot read is
/// one message from a neighbor (or from self) to the activated agent.
struct MessageCounter {
  std::int64_t slots_read = 0;
  std::int64_t gathers = 0;
};

/// sum_{j in N_i} L_{i,j} * value(j), where value is any callable returning
/// a vector-like for agent j. Only neighbors of i are queried.
template <typename ValueFn>
  requires std::invocable<ValueFn&, AgentId>
Vector apply_laplacian_row(const Topology& t, AgentId i, ValueFn&& value,
                           MessageCounter* counter = nullptr) {
  const auto nbrs = t.neighbors(i);
  const auto coef = t.laplacian_row(i);
  Vector out;
  for (std::size_t n = 0; n < nbrs.size(); ++n) {
    const auto& v = value(nbrs[n]);
    if (n == 0) {
      out = Vector::Zero(v.size());
    } else if (v.size() != out.size()) {
      throw ArgumentError("apply_laplacian_row: dimension mismatch among neighbor vectors");
    }
    if (coef[n] != 0) out.noalias() += static_cast<double>(coef[n]) * v;
  }
  if (counter) {
    counter->slots_read += static_cast<std::int64_t>(nbrs.size());
    counter->gathers += 1;
  }
  return out;
}

Vector apply_laplacian_row(const Topology& t, AgentId i, const AgentVectors& xs,
                           MessageCounter* counter = nullptr);

/// Stacked L x, one block per agent.
AgentVectors apply_laplacian(const Topology& t, const AgentVectors& xs);

/// ||L x|| over the stacked vector; zero exactly on consensus inputs.
double feasibility_residual(const Topology& t, const AgentVectors& xs);

/// Result of the structural checks every generated topology must satisfy.
struct LaplacianReport {
  bool symmetric = false;
  bool zero_row_sums = false;
  bool diagonal_matches_degree = false;
  bool connected = false;
  double min_eigenvalue = 0.0;
  bool positive_semidefinite() const { return min_eigenvalue >= -1e-10; }
  bool ok() const {
    return symmetric && zero_row_sums && diagonal_matches_degree && connected &&
           positive_semidefinite();
  }
};

LaplacianReport check_laplacian(const Topology& t);

/// Plain-text edge list: first line m, then "i j" per edge (0-based, i < j,
/// sorted).
void write_edge_list(std::ostream& os, const Topology& t);
Topology read_edge_list(std::istream& is);

}  // namespace decsliding

#endif
