#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "decsliding/graph.hpp"
#include "test_support.hpp"

using namespace decsliding;

namespace {

Topology make(TopologyKind kind, int m, double p = 0.5, std::uint64_t seed = 0) {
  return build_topology({kind, m, p, seed});
}

AgentVectors scalars(std::initializer_list<double> values) {
  AgentVectors out;
  for (double v : values) out.push_back(Vector::Constant(1, v));
  return out;
}

}  // namespace

TEST(Graph, PathThreeLaplacian) {
  const Topology t = make(TopologyKind::path, 3);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(t.dense_laplacian(), expected);
  EXPECT_EQ(t.max_degree(), 2);
}

TEST(Graph, CompleteTwoLaplacian) {
  const Topology t = make(TopologyKind::complete, 2);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(t.dense_laplacian(), expected);
  EXPECT_EQ(t.max_degree(), 1);
}

TEST(Graph, RingFourDiagonalAndRowSums) {
  const Topology t = make(TopologyKind::ring, 4);
  const Eigen::MatrixXd L = t.dense_laplacian();
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(L(i, i), 2.0);
    EXPECT_EQ(L.row(i).sum(), 0.0);
  }
  EXPECT_EQ(t.max_degree(), 2);
}

TEST(Graph, NeighborhoodIncludesSelf) {
  const Topology t = make(TopologyKind::ring, 5);
  for (int i = 0; i < 5; ++i) {
    const auto nbrs = t.neighbors(i);
    EXPECT_EQ(nbrs.size(), 3u);
    EXPECT_NE(std::find(nbrs.begin(), nbrs.end(), i), nbrs.end());
    EXPECT_EQ(t.degree(i), 2);
    EXPECT_EQ(t.laplacian(i, i), 2);
  }
}

TEST(Graph, RejectsBadInputs) {
  EXPECT_THROW(make(TopologyKind::ring, 1), ArgumentError);
  EXPECT_THROW(make(TopologyKind::erdos_renyi, 5, 0.0), ArgumentError);
  EXPECT_THROW(make(TopologyKind::erdos_renyi, 5, 1.5), ArgumentError);
  EXPECT_THROW(Topology::from_edges(3, {{0, 0}, {1, 2}}), ArgumentError);
  EXPECT_THROW(Topology::from_edges(3, {{0, 3}}), ArgumentError);
  EXPECT_THROW(Topology::from_edges(4, {{0, 1}, {2, 3}}), TopologyError);
}

TEST(Graph, ErdosRenyiUnreachableConnectivityFails) {
  // p tiny on many agents: no connected draw within the retry budget.
  EXPECT_THROW(make(TopologyKind::erdos_renyi, 60, 1e-4, 3), TopologyError);
}

TEST(Graph, DuplicateAndMirroredEdgesCollapse) {
  const Topology t = Topology::from_edges(3, {{0, 1}, {1, 0}, {0, 1}, {2, 1}});
  EXPECT_EQ(t.edges().size(), 2u);
  EXPECT_EQ(t.degree(1), 2);
}

TEST(Graph, ApplyRowExamples) {
  const Topology path = make(TopologyKind::path, 3);
  const Vector a = Vector::Constant(2, 0.7);
  EXPECT_EQ(apply_laplacian_row(path, 1, AgentVectors{a, a, a}), Vector::Zero(2));
  EXPECT_EQ(apply_laplacian_row(path, 0, scalars({1, 0, 0}))[0], 1.0);
  const Topology k2 = make(TopologyKind::complete, 2);
  EXPECT_EQ(apply_laplacian_row(k2, 0, scalars({2, 5}))[0], -3.0);
}

TEST(Graph, ApplyRowDimensionMismatch) {
  const Topology k2 = make(TopologyKind::complete, 2);
  EXPECT_THROW(apply_laplacian_row(k2, 0, AgentVectors{Vector::Zero(1), Vector::Zero(2)}), ArgumentError);
}

TEST(Graph, ApplyRowReadsOnlyNeighbors) {
  const Topology ring = make(TopologyKind::ring, 6);
  std::vector<int> reads(6, 0);
  const AgentVectors xs = testsupport::random_centers(6, 3, 5);
  MessageCounter counter;
  const Vector out = apply_laplacian_row(
      ring, 2,
      [&](AgentId l) -> const Vector& {
        ++reads[static_cast<std::size_t>(l)];
        return xs[static_cast<std::size_t>(l)];
      },
      &counter);
  EXPECT_EQ(reads, (std::vector<int>{0, 1, 1, 1, 0, 0}));
  EXPECT_EQ(counter.slots_read, 3);
  EXPECT_EQ(counter.gathers, 1);
  EXPECT_TRUE(out.isApprox(2 * xs[2] - xs[1] - xs[3]));
}

TEST(Graph, FeasibilityExamples) {
  const Topology k2 = make(TopologyKind::complete, 2);
  EXPECT_DOUBLE_EQ(feasibility_residual(k2, scalars({1, 0})), std::sqrt(2.0));
  const Topology path = make(TopologyKind::path, 3);
  EXPECT_DOUBLE_EQ(feasibility_residual(path, scalars({1, 1, 0})), std::sqrt(2.0));
  EXPECT_EQ(feasibility_residual(path, scalars({4, 4, 4})), 0.0);
}

TEST(Graph, StackedApplicationMatchesDense) {
  const Topology t = make(TopologyKind::erdos_renyi, 9, 0.4, 17);
  const AgentVectors xs = testsupport::random_centers(9, 4, 2);
  const AgentVectors lx = apply_laplacian(t, xs);
  const Eigen::MatrixXd L = t.dense_laplacian();
  for (int i = 0; i < 9; ++i) {
    Vector expected = Vector::Zero(4);
    for (int j = 0; j < 9; ++j) expected += L(i, j) * xs[static_cast<std::size_t>(j)];
    EXPECT_LT((lx[static_cast<std::size_t>(i)] - expected).norm(), 1e-12);
  }
}

class GraphInvariants : public ::testing::TestWithParam<std::tuple<TopologyKind, int>> {};

TEST_P(GraphInvariants, LaplacianProperties) {
  const auto [kind, m] = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Topology t = make(kind, m, 0.3, seed);
    const LaplacianReport r = check_laplacian(t);
    EXPECT_TRUE(r.symmetric);
    EXPECT_TRUE(r.zero_row_sums);
    EXPECT_TRUE(r.diagonal_matches_degree);
    EXPECT_TRUE(r.connected);
    EXPECT_TRUE(r.positive_semidefinite()) << r.min_eigenvalue;
    const Eigen::MatrixXd L = t.dense_laplacian();
    EXPECT_EQ(L, L.transpose());
    EXPECT_LT((L * Eigen::VectorXd::Ones(m)).norm(), 1e-15);
    int dmax = 0;
    for (int i = 0; i < m; ++i) dmax = std::max(dmax, static_cast<int>(L(i, i)));
    EXPECT_EQ(t.max_degree(), dmax);
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GraphInvariants,
                         ::testing::Combine(::testing::Values(TopologyKind::ring, TopologyKind::path,
                                                              TopologyKind::complete, TopologyKind::erdos_renyi),
                                            ::testing::Values(2, 3, 8, 20)));

TEST(Graph, NullSpaceIsConsensus) {
  // Connected graph: exactly one zero eigenvalue, eigenvector along ones.
  const Topology t = make(TopologyKind::erdos_renyi, 12, 0.3, 4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t.dense_laplacian());
  EXPECT_LT(std::abs(eig.eigenvalues()[0]), 1e-10);
  EXPECT_GT(eig.eigenvalues()[1], 1e-8);
}

TEST(Graph, ErdosRenyiReproducible) {
  const Topology a = make(TopologyKind::erdos_renyi, 15, 0.3, 99);
  const Topology b = make(TopologyKind::erdos_renyi, 15, 0.3, 99);
  EXPECT_EQ(a.edges(), b.edges());
  const Topology c = make(TopologyKind::erdos_renyi, 15, 0.3, 100);
  EXPECT_NE(a.edges(), c.edges());
}

TEST(Graph, EdgeListRoundTrip) {
  const Topology t = make(TopologyKind::erdos_renyi, 10, 0.4, 8);
  std::stringstream ss;
  write_edge_list(ss, t);
  const Topology back = read_edge_list(ss);
  EXPECT_EQ(back.size(), t.size());
  EXPECT_EQ(back.edges(), t.edges());
}

TEST(Graph, KindNamesRoundTrip) {
  for (auto kind : {TopologyKind::ring, TopologyKind::path, TopologyKind::complete, TopologyKind::erdos_renyi})
    EXPECT_EQ(parse_topology_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_topology_kind("star"), ArgumentError);
}
