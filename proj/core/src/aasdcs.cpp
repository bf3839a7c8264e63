#include "decsliding/aasdcs.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace decsliding {

void acs_procedure(const AgentObjective& phi, const InnerSchedule& inner, double mu, double eta,
                   const Vector& w, const Vector& anchor, Rng& rng, AcsWorkspace& ws,
                   Vector& x_out, Vector& x_under_out, const AcsObserver* observer) {
  if (inner.T < 1) throw ArgumentError("acs_procedure: T must be >= 1");
  if (!(mu >= 0.0) || !(eta >= 0.0)) throw ArgumentError("acs_procedure: mu and eta must be >= 0");
  if (w.size() != phi.dim() || anchor.size() != phi.dim()) {
    throw ArgumentError("acs_procedure: dimension mismatch");
  }
  const Constraint& X = phi.constraint();
  const bool euclidean = dynamic_cast<const EuclideanProx*>(&phi.prox()) != nullptr;
  const double s = mu + eta;

  ws.u = anchor;
  ws.u_under = anchor;
  ws.u_hat.resize(anchor.size());
  ws.G.resize(anchor.size());
  for (int t = 1; t <= inner.T; ++t) {
    const double lam = inner.lambda[static_cast<std::size_t>(t)];
    const double beta = inner.beta[static_cast<std::size_t>(t)];
    const double den = beta + (1.0 - lam * lam) * s;
    const double a = (1.0 - lam) * (s + beta) / den;
    const double b = lam * ((1.0 - lam) * s + beta) / den;
    if (std::abs(a + b - 1.0) > 1e-12) throw std::logic_error("acs_procedure: u_hat is not a convex combination");
    ws.u_hat.noalias() = a * ws.u_under + b * ws.u;

    phi.sample_gradient(ws.u_hat, rng, ws.G);

    const double c = (1.0 - lam) * s + beta;
    if (euclidean) {
      // argmin lam <w + G + eta (u_hat - anchor), u> + (lam s / 2)||u - u_hat||^2 + (c / 2)||u - u^{t-1}||^2
      const double inv = 1.0 / (lam * s + c);
      ws.u = inv * (lam * s * ws.u_hat + c * ws.u - lam * (w + ws.G + eta * (ws.u_hat - anchor)));
      X.project_in_place(ws.u);
    } else {
      const ProxFunction& prox = phi.prox();
      const Vector g = w + ws.G + eta * (prox.gradient(ws.u_hat) - prox.gradient(anchor));
      const Vector u_prev = ws.u;
      std::array<WeightedAnchor, 2> anchors{WeightedAnchor{ws.u_hat, lam * s}, WeightedAnchor{u_prev, c}};
      const std::span<const WeightedAnchor> used =
          lam * s > 0.0 ? std::span<const WeightedAnchor>(anchors) : std::span<const WeightedAnchor>(anchors).subspan(1);
      ws.u = prox.prox_step(g, lam, used, X);
    }
    ws.u_under = (1.0 - lam) * ws.u_under + lam * ws.u;
    if (observer) (*observer)(t, ws.u_hat, ws.u, ws.u_under);
  }
  x_out = ws.u;
  x_under_out = ws.u_under;
}

AcsOutput acs_procedure(const AgentObjective& phi, const InnerSchedule& inner, double mu, double eta,
                        const Vector& w, const Vector& anchor, Rng& rng) {
  AcsWorkspace ws;
  AcsOutput out;
  acs_procedure(phi, inner, mu, eta, w, anchor, rng, ws, out.x, out.x_under);
  return out;
}

void aasdcs_step(NetworkState& state, const Topology& topo, const ProblemSet& problems,
                 const OuterSchedule& sched, std::int64_t k, const Activation& act, Rng& oracle,
                 AcsWorkspace& ws) {
  detail::check_step_index(state, sched, k);
  if (!sched.has_inner_loop()) throw ArgumentError("aasdcs_step: schedule has no inner budgets");
  if (!state.sliding()) throw ArgumentError("aasdcs_step: state carries no sliding sequence");
  const auto kk = static_cast<std::size_t>(k);
  const double alpha = sched.alpha[kk];
  const double md = topo.size();

  const Vector w = detail::dual_half_step(state, topo, act, sched.tau[kk], [&](AgentId l) -> Vector {
    const auto li = static_cast<std::size_t>(l);
    return alpha * (md * state.x_under[li] - (md - 1.0) * state.x_under_lag(l) - state.x_lag(l)) +
           state.x[li];
  });

  const int T = sched.T[kk];
  const double constant = sched.constants.growth_C + sched.constants.lip_L;
  if (ws.inner.T != T || ws.inner_constant != constant) {
    ws.inner = inner_schedule(T, sched.constants);
    ws.inner_constant = constant;
  }

  const auto j = static_cast<std::size_t>(act.j);
  std::swap(state.x_before[j], state.x[j]);
  std::swap(state.x_under_before[j], state.x_under[j]);
  acs_procedure(*problems[j], ws.inner, sched.inner_mu(), sched.eta[kk], w, state.x_before[j], oracle,
                ws, state.x[j], state.x_under[j]);
  state.changed_at[j] = k;
  state.counters.grad_evals += T;
  state.counters.k = k;
}

RunResult aasdcs_run(const Topology& topo, const ProblemSet& problems, const OuterSchedule& sched,
                     const AgentVectors& x0, const RunOptions& options) {
  if (sched.regime == Regime::adpd || !sched.has_inner_loop()) {
    throw ArgumentError("aasdcs_run: schedule regime must be convex or strongly_convex");
  }
  AcsWorkspace ws;
  return detail::run_outer_loop(
      topo, problems, sched, x0, options, true,
      [&](NetworkState& state, std::int64_t k, const Activation& act, const RngStreams& streams) {
        Rng oracle = streams.oracle(k);
        aasdcs_step(state, topo, problems, sched, k, act, oracle, ws);
      });
}

}  // namespace decsliding
