#ifndef DECSLIDING_SCHEDULES_HPP
#define DECSLIDING_SCHEDULES_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decsliding/objectives.hpp"

namespace decsliding {

enum class Regime { adpd, aasdcs_convex, aasdcs_strongly_convex };

Regime parse_regime(const std::string& name);
std::string to_string(Regime regime);

/// Which family the ergodic weights theta_hat belong to. Both families have
/// unnormalized weights a_k that do not depend on N, which lets a run report
/// the average it would have returned had it stopped at any k.
enum class WeightFamily {
  uniform_tail,  // a_0 = m, a_k = 1
  linear_tail    // a_0 = 6 m^2, a_k = 2 (k + 3m)
};

double unnormalized_theta_hat(WeightFamily family, int m, int k);

/// Outer parameters for k = 1..N. Per-iteration arrays have size N + 1 and
/// index 0 is unused (stored as 0). Weight arrays cover k = 0..N.
struct OuterSchedule {
  Regime regime = Regime::adpd;
  WeightFamily family = WeightFamily::uniform_tail;
  int m = 0;
  int d_max = 0;
  int N = 0;
  double D = 0.0;  // AA-SDCS only
  ProblemClassConstants constants;

  std::vector<double> alpha;
  std::vector<double> tau;
  std::vector<double> eta;
  std::vector<int> T;  // empty for ADPD

  std::vector<double> theta_hat;
  std::vector<double> theta;

  bool has_inner_loop() const noexcept { return !T.empty(); }
  /// The strong-convexity modulus handed to the inner loop: the class mu
  /// under the strongly convex regime, 0 otherwise.
  double inner_mu() const noexcept {
    return regime == Regime::aasdcs_strongly_convex ? constants.mu : 0.0;
  }
};

/// theta from theta_hat:
///   theta_0 = th_0 - (m-1) th_1, theta_k = m th_k - (m-1) th_{k+1}, theta_N = m th_N.
std::vector<double> theta_from_theta_hat(const std::vector<double>& theta_hat, int m);

/// alpha = m, eta = tau = 2 m d_max, uniform-tail weights.
OuterSchedule adpd_schedule(int m, int d_max, int N);

/// alpha = 1, eta = 4 m d_max, tau = 2 d_max,
/// T = max(ceil((M^2+sigma^2) N / (d_max D)), ceil(sqrt((C+L)/(m d_max)))), clamped >= 1.
/// D defaults to m^2 d_max. inner_override replaces every T_k.
OuterSchedule aasdcs_convex_schedule(int m, int d_max, int N, const ProblemClassConstants& consts,
                                     std::optional<double> D = std::nullopt,
                                     std::optional<int> inner_override = std::nullopt);

/// alpha_k = (k+3m-1)/(k+3m), tau_k = 32 m d_max^2 / ((k+3m) mu),
/// T_k = max(ceil(64 m (M^2+sigma^2) N / (D mu^2)), ceil(sqrt(4(C+L)/((k+3m-3) mu)))),
/// eta_k = (k+3m-1) mu / 2 - (C+L)/(T_k (T_k+1)). D defaults to m^3. T_k is
/// raised until eta_k >= (k+3m+1) mu / 4.
OuterSchedule aasdcs_strong_schedule(int m, int d_max, int N, const ProblemClassConstants& consts,
                                     std::optional<double> D = std::nullopt,
                                     std::optional<int> inner_override = std::nullopt);

/// Inner (ACS) parameters for t = 1..T; arrays have size T + 1, index 0 unused.
struct InnerSchedule {
  int T = 0;
  std::vector<double> lambda;  // 2 / (t + 1)
  std::vector<double> beta;    // 4 (C + L) / (t (t + 1))
  std::vector<double> Lambda;  // Lambda_1 = 1, Lambda_t = (1 - lambda_t) Lambda_{t-1}
};

InnerSchedule inner_schedule(int T, const ProblemClassConstants& consts);

struct ConditionResult {
  std::string name;
  bool passed = true;
  int first_violation = -1;  // k (or t) of the first violation
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;

  bool ok() const;
  const ConditionResult* find(const std::string& name) const;
  std::string summary() const;
};

/// Checks every parameter condition the schedule's regime relies on, over
/// all k where the indices involved exist. Never throws.
ValidationReport validate_schedule(const OuterSchedule& s, int m, int d_max,
                                   const ProblemClassConstants& consts);

/// Checks lambda_1 = 1, mu + eta + beta_t > (C + L) lambda_t^2 and constancy of
/// beta_t / Lambda_t.
ValidationReport validate_inner(const InnerSchedule& inner, const ProblemClassConstants& consts,
                                double mu, double eta);

/// CSV with header k,alpha,tau,eta,T,theta_hat,theta (k = 0 row carries only weights).
void write_schedule_csv(std::ostream& os, const OuterSchedule& s);

}  // namespace decsliding

#endif
