#ifndef DECSLIDING_AASDCS_HPP
#define DECSLIDING_AASDCS_HPP

#include <functional>

#include "decsliding/network_state.hpp"

namespace decsliding {

/// Scratch vectors reused across inner loops, plus the last inner schedule.
struct AcsWorkspace {
  Vector u;
  Vector u_under;
  Vector u_hat;
  Vector G;
  InnerSchedule inner;
  double inner_constant = -1.0;  // C + L the cached schedule was built for
};

/// Sees (t, u_hat^t, u^t, u_under^t) after every inner iteration.
using AcsObserver = std::function<void(int, const Vector&, const Vector&, const Vector&)>;

/// Accelerated communication-sliding inner loop. Approximately solves
///   min_{u in X} <w, u> + phi(u) + eta V(anchor, u)
/// with inner.T stochastic oracle calls, starting from u^0 = u_under^0 = anchor.
/// Writes u^T to x_out and u_under^T to x_under_out. mu is the modulus the
/// invoked regime assumes (0 for the convex one).
void acs_procedure(const AgentObjective& phi, const InnerSchedule& inner, double mu, double eta,
                   const Vector& w, const Vector& anchor, Rng& rng, AcsWorkspace& ws,
                   Vector& x_out, Vector& x_under_out, const AcsObserver* observer = nullptr);

struct AcsOutput {
  Vector x;
  Vector x_under;
};

AcsOutput acs_procedure(const AgentObjective& phi, const InnerSchedule& inner, double mu, double eta,
                        const Vector& w, const Vector& anchor, Rng& rng);

/// One outer iteration of the sliding method. x, x_under of agent j_k come
/// from the inner loop with budget T_k; everything else carries over except
/// y_{i_k}. oracle is the stream for this outer iteration.
void aasdcs_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
                 const OuterSchedule& sched, std::int64_t k, const Activation& act, Rng& oracle,
                 AcsWorkspace& ws);

/// Runs N outer iterations from x0; the returned average is taken over x_under.
RunResult aasdcs_run(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                     const AgentVectors& x0, const RunOptions& options = {});

}  // namespace decsliding

#endif
