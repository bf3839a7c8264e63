#ifndef DECSLIDING_NETWORK_STATE_HPP
#define DECSLIDING_NETWORK_STATE_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "decsliding/graph.hpp"
#include "decsliding/metrics.hpp"
#include "decsliding/objectives.hpp"
#include "decsliding/rng.hpp"
#include "decsliding/schedules.hpp"

namespace decsliding {

/// i_k receives the dual update, j_k the primal update.
struct Activation {
  AgentId i = 0;
  AgentId j = 0;
};

/// Draws i_k and j_k independently and uniformly from [m].
Activation draw_activation(Rng& rng, int m);

struct StepCounters {
  std::int64_t k = 0;
  std::int64_t comm_rounds = 0;
  std::int64_t messages = 0;  // vector transfers, |N_i| + |N_j| per step
  std::int64_t grad_evals = 0;
  std::int64_t prox_solves = 0;
};

/// Solver state after counters.k iterations.
///
/// Only one agent's primal block changes per step, so the lag x^{k-2} needed
/// by the extrapolation is recovered from the value held before the last
/// change and the iteration at which that change happened. x_under and its
/// lag exist only for the sliding method and change together with x.
struct NetworkState {
  AgentVectors x;
  AgentVectors x_before;
  AgentVectors x_under;
  AgentVectors x_under_before;
  std::vector<std::int64_t> changed_at;
  AgentVectors y;
  StepCounters counters;

  /// x^{-1} = x^0 (= x_under^0 when sliding), y^0 = 0.
  static NetworkState initial(const AgentVectors& x0, bool sliding);

  int agents() const noexcept { return static_cast<int>(x.size()); }
  bool sliding() const noexcept { return !x_under.empty(); }

  /// x_i^{k-2} while executing step k = counters.k + 1.
  const Vector& x_lag(AgentId i) const {
    return changed_at[static_cast<std::size_t>(i)] == counters.k ? x_before[static_cast<std::size_t>(i)]
                                                                 : x[static_cast<std::size_t>(i)];
  }
  const Vector& x_under_lag(AgentId i) const {
    return changed_at[static_cast<std::size_t>(i)] == counters.k
               ? x_under_before[static_cast<std::size_t>(i)]
               : x_under[static_cast<std::size_t>(i)];
  }
};

/// Running weighted average sum_j w_j z^j of a per-agent sequence in which
/// one block changes per step. Each block keeps a partial sum and the index
/// since which its current value has been held, so a change costs O(d).
class ErgodicAverager {
 public:
  /// interior(j) is the weight of z^j inside a prefix.
  ErgodicAverager(std::function<double(std::int64_t)> interior, const AgentVectors& start);

  /// Block i takes a new value at step k; old_value was held for j in [since, k).
  void record_change(std::int64_t k, AgentId i, const Vector& old_value);

  /// (sum_{j<n} interior(j) z^j + terminal z^n) / normalizer, where z^n = current.
  AgentVectors average(std::int64_t n, const AgentVectors& current, double terminal,
                       double normalizer) const;

 private:
  double cumulative(std::int64_t k) const;

  std::function<double(std::int64_t)> interior_;
  mutable std::vector<double> cumulative_;  // cumulative_[k] = sum_{j<k} interior(j)
  AgentVectors partial_;
  std::vector<std::int64_t> since_;
};

/// Prefix averager for a weight family: the output after n steps is the
/// average the method returns when run with budget N = n.
class PrefixAverage {
 public:
  PrefixAverage(WeightFamily family, int m, const AgentVectors& start);

  void record_change(std::int64_t k, AgentId i, const Vector& old_value) {
    acc_.record_change(k, i, old_value);
  }
  AgentVectors average(std::int64_t n, const AgentVectors& current) const;

 private:
  WeightFamily family_;
  int m_;
  ErgodicAverager acc_;
};

struct RunOptions {
  /// Trace row every log_every steps, plus k = 0 and the final step.
  std::int64_t log_every = 1;
  std::uint64_t seed = 0;
  /// Off by default so traces stay byte-identical across repeat runs.
  bool record_wall_time = false;
  /// Stop after this many steps instead of the schedule's N (0 allowed).
  std::optional<std::int64_t> iterations;
  /// Called after every step.
  std::function<void(std::int64_t k, const Activation&, const NetworkState&)> on_step;
};

struct RunResult {
  AgentVectors xbar;
  RunTrace trace;
  NetworkState state;
};

namespace detail {

/// Shared outer loop: draws activations, calls step, maintains the averages
/// and the trace. Defined in network_state.cpp.
using StepFn = std::function<void(NetworkState&, std::int64_t k, const Activation&, const RngStreams&)>;

RunResult run_outer_loop(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                         const AgentVectors& x0, const RunOptions& options, bool sliding,
                         const StepFn& step);

void check_run_inputs(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                      const AgentVectors& x0);

void check_step_index(const NetworkState& state, const OuterSchedule& sched, std::int64_t k);

/// Dual half of an outer step, common to both methods: gathers the
/// extrapolated primal over N_i, updates y_i, and returns w_j gathered from
/// the extrapolated duals over N_j. xtilde(l) yields the extrapolated primal
/// of agent l. Counts two rounds and |N_i| + |N_j| messages.
template <typename XTilde>
Vector dual_half_step(NetworkState& state, const Topology& topo, const Activation& act, double tau,
                      XTilde&& xtilde) {
  MessageCounter messages;
  const Vector v = apply_laplacian_row(topo, act.i, xtilde, &messages);
  auto& yi = state.y[static_cast<std::size_t>(act.i)];
  const Vector y_old = yi;
  yi += v / tau;
  const double md = topo.size();
  const Vector yi_tilde = md * (yi - y_old) + y_old;
  const Vector w = apply_laplacian_row(
      topo, act.j,
      [&](AgentId l) -> const Vector& {
        return l == act.i ? yi_tilde : state.y[static_cast<std::size_t>(l)];
      },
      &messages);
  state.counters.comm_rounds += 2;
  state.counters.messages += messages.slots_read;
  return w;
}


}  // namespace detail

}  // namespace decsliding

#endif
