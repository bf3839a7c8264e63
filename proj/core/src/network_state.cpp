#include "decsliding/network_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decsliding {

Activation draw_activation(Rng& rng, int m) {
  std::uniform_int_distribution<AgentId> pick(0, m - 1);
  Activation a;
  a.i = pick(rng);
  a.j = pick(rng);
  return a;
}

NetworkState NetworkState::initial(const AgentVectors& x0, bool sliding) {
  NetworkState s;
  s.x = x0;
  s.x_before = x0;
  if (sliding) {
    s.x_under = x0;
    s.x_under_before = x0;
  }
  s.changed_at.assign(x0.size(), -1);
  s.y.reserve(x0.size());
  for (const auto& xi : x0) s.y.push_back(Vector::Zero(xi.size()));
  return s;
}

// ---------------------------------------------------------------- averaging

ErgodicAverager::ErgodicAverager(std::function<double(std::int64_t)> interior,
                                 const AgentVectors& start)
    : interior_(std::move(interior)), cumulative_{0.0}, since_(start.size(), 0) {
  partial_.reserve(start.size());
  for (const auto& z : start) partial_.push_back(Vector::Zero(z.size()));
}

double ErgodicAverager::cumulative(std::int64_t k) const {
  while (static_cast<std::int64_t>(cumulative_.size()) <= k) {
    const auto j = static_cast<std::int64_t>(cumulative_.size()) - 1;
    cumulative_.push_back(cumulative_.back() + interior_(j));
  }
  return cumulative_[static_cast<std::size_t>(k)];
}

void ErgodicAverager::record_change(std::int64_t k, AgentId i, const Vector& old_value) {
  const auto idx = static_cast<std::size_t>(i);
  partial_[idx].noalias() += (cumulative(k) - cumulative(since_[idx])) * old_value;
  since_[idx] = k;
}

AgentVectors ErgodicAverager::average(std::int64_t n, const AgentVectors& current, double terminal,
                                      double normalizer) const {
  AgentVectors out(current.size());
  const double total = cumulative(n);
  for (std::size_t i = 0; i < current.size(); ++i) {
    out[i] = (partial_[i] + (total - cumulative(since_[i]) + terminal) * current[i]) / normalizer;
  }
  return out;
}

PrefixAverage::PrefixAverage(WeightFamily family, int m, const AgentVectors& start)
    : family_(family),
      m_(m),
      acc_(
          [family, m](std::int64_t j) {
            const int jj = static_cast<int>(j);
            const double lead = j == 0 ? 1.0 : static_cast<double>(m);
            return lead * unnormalized_theta_hat(family, m, jj) -
                   (m - 1.0) * unnormalized_theta_hat(family, m, jj + 1);
          },
          start) {}

AgentVectors PrefixAverage::average(std::int64_t n, const AgentVectors& current) const {
  if (n == 0) return current;
  const double md = m_;
  const double nd = static_cast<double>(n);
  const double total = family_ == WeightFamily::uniform_tail ? md + nd
                                                             : 6.0 * md * md + nd * (nd + 6.0 * md + 1.0);
  const double terminal = md * unnormalized_theta_hat(family_, m_, static_cast<int>(n));
  return acc_.average(n, current, terminal, total);
}

// ---------------------------------------------------------------- outer loop

namespace detail {

void check_run_inputs(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                      const AgentVectors& x0) {
  const auto m = static_cast<std::size_t>(topo.size());
  if (problems.size() != m) throw ArgumentError("run: one objective per agent required");
  if (x0.size() != m) throw ArgumentError("run: one starting vector per agent required");
  if (sched.m != topo.size()) throw ArgumentError("run: schedule was built for a different m");
  require_dimension(x0, problems.front()->dim(), "run");
  for (const auto& p : problems) {
    if (p->dim() != problems.front()->dim()) throw ArgumentError("run: objectives differ in dimension");
  }
}

RunResult run_outer_loop(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                         const AgentVectors& x0, const RunOptions& options, bool sliding,
                         const StepFn& step) {
  check_run_inputs(topo, problems, sched, x0);
  if (options.log_every < 1) throw ArgumentError("run: log_every must be >= 1");
  const std::int64_t iterations = options.iterations.value_or(sched.N);
  if (iterations < 0 || iterations > sched.N) {
    throw ArgumentError("run: iterations must lie in [0, N]");
  }

  const RngStreams streams(options.seed);
  Rng activation_rng = streams.activation();
  RunResult result;
  result.state = NetworkState::initial(x0, sliding);
  NetworkState& state = result.state;
  const auto averaged = [&]() -> const AgentVectors& { return sliding ? state.x_under : state.x; };

  PrefixAverage prefix(sched.family, sched.m, x0);
  ErgodicAverager by_theta(
      [&sched](std::int64_t j) { return sched.theta[static_cast<std::size_t>(j)]; }, x0);

  const auto start = std::chrono::steady_clock::now();
  const auto log_row = [&](std::int64_t k) {
    const AgentVectors xbar = prefix.average(k, averaged());
    TraceRow row;
    row.k = k;
    row.comm_rounds = state.counters.comm_rounds;
    row.grad_evals = state.counters.grad_evals;
    row.objective = stacked_objective(problems, xbar);
    row.feasibility = feasibility_residual(topo, xbar);
    if (options.record_wall_time) {
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    row.seed = options.seed;
    result.trace.rows.push_back(row);
  };

  log_row(0);
  Vector old_value;
  for (std::int64_t k = 1; k <= iterations; ++k) {
    const Activation act = draw_activation(activation_rng, topo.size());
    old_value = averaged()[static_cast<std::size_t>(act.j)];
    step(state, k, act, streams);
    prefix.record_change(k, act.j, old_value);
    by_theta.record_change(k, act.j, old_value);
    if (options.on_step) options.on_step(k, act, state);
    if (k % options.log_every == 0 || k == iterations) log_row(k);
  }

  result.xbar = prefix.average(iterations, averaged());
  if (iterations == sched.N && sched.N > 0) {
    // The prefix form and the theta recursion must describe the same average.
    const AgentVectors check =
        by_theta.average(sched.N, averaged(), sched.theta[static_cast<std::size_t>(sched.N)], 1.0);
    for (std::size_t i = 0; i < check.size(); ++i) {
      const double scale = 1.0 + result.xbar[i].lpNorm<Eigen::Infinity>();
      if ((check[i] - result.xbar[i]).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
        throw std::logic_error("ergodic average disagrees with the theta-weighted sum");
      }
    }
  }
  return result;
}

}  // namespace detail

}  // namespace decsliding

namespace decsliding::detail {

void check_step_index(const NetworkState& state, const OuterSchedule& sched, std::int64_t k) {
  if (k < 1 || k > sched.N) throw ArgumentError("step: k must lie in [1, N]");
  if (k != state.counters.k + 1) throw ArgumentError("step: k must follow the state's last iteration");
}

}  // namespace decsliding::detail
