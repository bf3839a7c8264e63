#include <benchmark/benchmark.h>

#include "decsliding/aasdcs.hpp"
#include "decsliding/adpd.hpp"
#include "decsliding/schedules.hpp"

namespace {

using namespace decsliding;

constexpr int kBudget = 100000;

AgentVectors centers(int m, int dim) {
  Rng rng(42);
  std::normal_distribution<double> normal(0.0, 1.0);
  AgentVectors out(static_cast<std::size_t>(m), Vector(dim));
  for (auto& c : out)
    for (Eigen::Index j = 0; j < dim; ++j) c[j] = normal(rng);
  return out;
}

// Args: agents, dimension, inner budget.
void BM_AcsProcedure(benchmark::State& state) {
  const auto dim = static_cast<int>(state.range(0));
  const auto T = static_cast<int>(state.range(1));
  const QuadraticObjective phi(Vector::Ones(dim), 1.0, 1.0);
  const InnerSchedule inner = inner_schedule(T, phi.constants());
  const Vector w = Vector::Constant(dim, 0.1), anchor = Vector::Zero(dim);
  Rng rng(1);
  AcsWorkspace ws;
  Vector x, xu;
  for (auto _ : state) {
    acs_procedure(phi, inner, 0.0, 1.0, w, anchor, rng, ws, x, xu);
    benchmark::DoNotOptimize(xu.data());
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_AcsProcedure)->Args({2, 16})->Args({22, 128})->Args({256, 128});

void BM_AdpdStep(benchmark::State& state) {
  const auto m = static_cast<int>(state.range(0));
  const auto dim = static_cast<int>(state.range(1));
  const Topology topo = build_topology({TopologyKind::erdos_renyi, m, 0.3, 1});
  const ProblemSet ps = make_quadratic_problem(centers(m, dim), 1.0);
  const OuterSchedule sched = adpd_schedule(m, topo.max_degree(), kBudget);
  const NetworkState start = NetworkState::initial(AgentVectors(static_cast<std::size_t>(m), Vector::Zero(dim)), false);
  NetworkState net = start;
  Rng rng(2);
  std::int64_t k = 0;
  for (auto _ : state) {
    if (k == kBudget) {
      state.PauseTiming();
      net = start;
      k = 0;
      state.ResumeTiming();
    }
    ++k;
    adpd_step(net, topo, ps, sched, k, draw_activation(rng, m));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdpdStep)->Args({8, 2})->Args({64, 22})->Args({256, 256});

void BM_AasdcsStep(benchmark::State& state) {
  const auto m = static_cast<int>(state.range(0));
  const auto dim = static_cast<int>(state.range(1));
  const Topology topo = build_topology({TopologyKind::erdos_renyi, m, 0.3, 1});
  const ProblemSet ps = make_quadratic_problem(centers(m, dim), 1.0, {1.0, Constraint::unconstrained()});
  const OuterSchedule sched = aasdcs_convex_schedule(m, topo.max_degree(), kBudget, aggregate_constants(ps));
  const NetworkState start = NetworkState::initial(AgentVectors(static_cast<std::size_t>(m), Vector::Zero(dim)), true);
  NetworkState net = start;
  const RngStreams streams(3);
  Rng rng = streams.activation();
  AcsWorkspace ws;
  std::int64_t k = 0;
  for (auto _ : state) {
    if (k == kBudget) {
      state.PauseTiming();
      net = start;
      k = 0;
      state.ResumeTiming();
    }
    ++k;
    Rng oracle = streams.oracle(k);
    aasdcs_step(net, topo, ps, sched, k, draw_activation(rng, m), oracle, ws);
  }
  state.counters["T_k"] = sched.T[1];
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AasdcsStep)->Args({8, 2})->Args({64, 22});

}  // namespace

BENCHMARK_MAIN();
