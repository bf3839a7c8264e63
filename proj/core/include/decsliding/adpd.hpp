#ifndef DECSLIDING_ADPD_HPP
#define DECSLIDING_ADPD_HPP

#include "decsliding/network_state.hpp"

namespace decsliding {

/// One iteration of the doubly randomized primal-dual method with exact
/// local prox. Extrapolation is evaluated only on N_{i_k}; only y_{i_k} and
/// x_{j_k} change. Throws UnsupportedProblemError if f_{j_k} has no exact prox.
void adpd_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
               const OuterSchedule& sched, std::int64_t k, const Activation& act);

/// Draws the activation from rng, then steps.
Activation adpd_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
                     const OuterSchedule& sched, std::int64_t k, Rng& rng);

/// Runs N iterations (or options.iterations) from x0 and returns the ergodic
/// average (1/(N+m)) (sum_{k<N} x^k + m x^N) for the shipped weights.
RunResult adpd_run(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                   const AgentVectors& x0, const RunOptions& options = {});

}  // namespace decsliding

#endif
