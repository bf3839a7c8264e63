#include "decsliding/adpd.hpp"

namespace decsliding {

void adpd_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
               const OuterSchedule& sched, std::int64_t k, const Activation& act) {
  detail::check_step_index(state, sched, k);
  const auto kk = static_cast<std::size_t>(k);
  const double alpha = sched.alpha[kk];

  const Vector w = detail::dual_half_step(state, topo, act, sched.tau[kk], [&](AgentId l) -> Vector {
    const Vector& cur = state.x[static_cast<std::size_t>(l)];
    return alpha * (cur - state.x_lag(l)) + cur;
  });

  const auto j = static_cast<std::size_t>(act.j);
  auto next = problems[j]->exact_prox(w, state.x[j], sched.eta[kk]);
  if (!next) {
    throw UnsupportedProblemError("agent " + std::to_string(act.j) +
                                  " objective has no exact prox; use the sliding method");
  }
  state.x_before[j] = std::move(state.x[j]);
  state.x[j] = std::move(*next);
  state.changed_at[j] = k;
  state.counters.prox_solves += 1;
  state.counters.k = k;
}

Activation adpd_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
                     const OuterSchedule& sched, std::int64_t k, Rng& rng) {
  const Activation act = draw_activation(rng, topo.size());
  adpd_step(state, topo, problems, sched, k, act);
  return act;
}

RunResult adpd_run(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                   const AgentVectors& x0, const RunOptions& options) {
  if (sched.regime != Regime::adpd) throw ArgumentError("adpd_run: schedule regime must be adpd");
  detail::check_run_inputs(topo, problems, sched, x0);
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (!problems[i]->has_exact_prox()) {
      throw UnsupportedProblemError("agent " + std::to_string(i) +
                                    " objective has no exact prox; use the sliding method");
    }
  }
  return detail::run_outer_loop(
      topo, problems, sched, x0, options, false,
      [&](NetworkState& state, std::int64_t k, const Activation& act, const RngStreams&) {
        adpd_step(state, topo, problems, sched, k, act);
      });
}

}  // namespace decsliding
