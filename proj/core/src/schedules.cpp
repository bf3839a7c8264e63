#include "decsliding/schedules.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace decsliding {

Regime parse_regime(const std::string& name) {
  if (name == "adpd") return Regime::adpd;
  if (name == "convex" || name == "aasdcs_convex") return Regime::aasdcs_convex;
  if (name == "strongly_convex" || name == "aasdcs_strongly_convex") {
    return Regime::aasdcs_strongly_convex;
  }
  throw ArgumentError("unknown regime '" + name + "' (expected adpd, convex or strongly_convex)");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::adpd: return "adpd";
    case Regime::aasdcs_convex: return "convex";
    case Regime::aasdcs_strongly_convex: return "strongly_convex";
  }
  return "unknown";
}

double unnormalized_theta_hat(WeightFamily family, int m, int k) {
  const double md = m;
  if (family == WeightFamily::uniform_tail) return k == 0 ? md : 1.0;
  return k == 0 ? 6.0 * md * md : 2.0 * (k + 3.0 * md);
}

std::vector<double> theta_from_theta_hat(const std::vector<double>& theta_hat, int m) {
  if (theta_hat.size() < 2) throw ArgumentError("theta_from_theta_hat: need N >= 1");
  const std::size_t N = theta_hat.size() - 1;
  const double md = m;
  std::vector<double> theta(N + 1);
  theta[0] = theta_hat[0] - (md - 1.0) * theta_hat[1];
  for (std::size_t k = 1; k < N; ++k) theta[k] = md * theta_hat[k] - (md - 1.0) * theta_hat[k + 1];
  theta[N] = md * theta_hat[N];
  return theta;
}

namespace {

void fill_weights(OuterSchedule& s) {
  s.theta_hat.resize(static_cast<std::size_t>(s.N) + 1);
  if (s.family == WeightFamily::uniform_tail) {
    const double denom = s.N + static_cast<double>(s.m);
    s.theta_hat[0] = s.m / denom;
    for (int k = 1; k <= s.N; ++k) s.theta_hat[static_cast<std::size_t>(k)] = 1.0 / denom;
  } else {
    const double md = s.m;
    const double denom = 6.0 * md * md + s.N * (s.N + 6.0 * md + 1.0);
    s.theta_hat[0] = 6.0 * md * md / denom;
    for (int k = 1; k <= s.N; ++k) {
      s.theta_hat[static_cast<std::size_t>(k)] = 2.0 * (k + 3.0 * md) / denom;
    }
  }
  s.theta = theta_from_theta_hat(s.theta_hat, s.m);
}

void require_common(int m, int d_max, int N, const char* who) {
  if (N < 1) throw ArgumentError(std::string(who) + ": N must be >= 1");
  if (m < 1) throw ArgumentError(std::string(who) + ": m must be >= 1");
  if (d_max < 0) throw ArgumentError(std::string(who) + ": d_max must be >= 0");
}

int ceil_to_int(double v, const char* who) {
  const double c = std::ceil(v);
  if (!(c < static_cast<double>(INT_MAX / 2))) {
    throw ScheduleInfeasibleError(std::string(who) +
                                  ": inner budget T_k overflows; increase D or lower N");
  }
  return static_cast<int>(std::max(0.0, c));
}

}  // namespace

OuterSchedule adpd_schedule(int m, int d_max, int N) {
  require_common(m, d_max, N, "adpd_schedule");
  OuterSchedule s;
  s.regime = Regime::adpd;
  s.family = WeightFamily::uniform_tail;
  s.m = m;
  s.d_max = d_max;
  s.N = N;
  const double step = 2.0 * m * d_max;
  s.alpha.assign(static_cast<std::size_t>(N) + 1, static_cast<double>(m));
  s.tau.assign(static_cast<std::size_t>(N) + 1, step);
  s.eta.assign(static_cast<std::size_t>(N) + 1, step);
  s.alpha[0] = s.tau[0] = s.eta[0] = 0.0;
  fill_weights(s);
  return s;
}

OuterSchedule aasdcs_convex_schedule(int m, int d_max, int N, const ProblemClassConstants& consts,
                                     std::optional<double> D, std::optional<int> inner_override) {
  require_common(m, d_max, N, "aasdcs_convex_schedule");
  if (d_max < 1) throw ArgumentError("aasdcs_convex_schedule: d_max must be >= 1");
  consts.validate();
  OuterSchedule s;
  s.regime = Regime::aasdcs_convex;
  s.family = WeightFamily::uniform_tail;
  s.m = m;
  s.d_max = d_max;
  s.N = N;
  s.constants = consts;
  s.D = D.value_or(static_cast<double>(m) * m * d_max);
  if (!(s.D > 0.0)) throw ArgumentError("aasdcs_convex_schedule: D must be > 0");

  const std::size_t n1 = static_cast<std::size_t>(N) + 1;
  s.alpha.assign(n1, 1.0);
  s.eta.assign(n1, 4.0 * m * d_max);
  s.tau.assign(n1, 2.0 * d_max);
  s.alpha[0] = s.eta[0] = s.tau[0] = 0.0;

  int T = 0;
  if (inner_override) {
    if (*inner_override < 1) throw ArgumentError("inner budget override must be >= 1");
    T = *inner_override;
  } else {
    const double noise = consts.lip_M * consts.lip_M + consts.sigma * consts.sigma;
    const int comm_branch = ceil_to_int(noise * N / (d_max * s.D), "aasdcs_convex_schedule");
    const int smooth_branch = ceil_to_int(
        std::sqrt((consts.growth_C + consts.lip_L) / (static_cast<double>(m) * d_max)),
        "aasdcs_convex_schedule");
    T = std::max({comm_branch, smooth_branch, 1});
  }
  s.T.assign(n1, T);
  s.T[0] = 0;
  fill_weights(s);
  return s;
}

OuterSchedule aasdcs_strong_schedule(int m, int d_max, int N, const ProblemClassConstants& consts,
                                     std::optional<double> D, std::optional<int> inner_override) {
  require_common(m, d_max, N, "aasdcs_strong_schedule");
  consts.validate();
  if (!(consts.mu > 0.0)) throw ArgumentError("aasdcs_strong_schedule: mu must be > 0");
  if (d_max < 1) throw ArgumentError("aasdcs_strong_schedule: d_max must be >= 1");
  if (inner_override && *inner_override < 1) throw ArgumentError("inner budget override must be >= 1");
  OuterSchedule s;
  s.regime = Regime::aasdcs_strongly_convex;
  s.family = WeightFamily::linear_tail;
  s.m = m;
  s.d_max = d_max;
  s.N = N;
  s.constants = consts;
  const double md = m;
  s.D = D.value_or(md * md * md);
  if (!(s.D > 0.0)) throw ArgumentError("aasdcs_strong_schedule: D must be > 0");

  const double mu = consts.mu;
  const double CL = consts.growth_C + consts.lip_L;
  const double noise = consts.lip_M * consts.lip_M + consts.sigma * consts.sigma;
  const int comm_branch =
      ceil_to_int(64.0 * md * noise * N / (s.D * mu * mu), "aasdcs_strong_schedule");

  const std::size_t n1 = static_cast<std::size_t>(N) + 1;
  s.alpha.assign(n1, 0.0);
  s.tau.assign(n1, 0.0);
  s.eta.assign(n1, 0.0);
  s.T.assign(n1, 0);
  for (int k = 1; k <= N; ++k) {
    const double kk = k + 3.0 * md;
    int T = 0;
    if (inner_override) {
      T = *inner_override;
    } else {
      const int smooth_branch =
          ceil_to_int(std::sqrt(4.0 * CL / ((kk - 3.0) * mu)), "aasdcs_strong_schedule");
      T = std::max({comm_branch, smooth_branch, 1});
    }
    const double eta_floor = (kk + 1.0) * mu / 4.0;
    auto eta_of = [&](int t) { return (kk - 1.0) * mu / 2.0 - CL / (static_cast<double>(t) * (t + 1.0)); };
    while (eta_of(T) < eta_floor) {
      if (T >= INT_MAX / 4) throw ScheduleInfeasibleError("aasdcs_strong_schedule: eta_k stays below its floor");
      ++T;
    }
    const std::size_t i = static_cast<std::size_t>(k);
    s.alpha[i] = (kk - 1.0) / kk;
    s.tau[i] = 32.0 * md * d_max * d_max / (kk * mu);
    s.T[i] = T;
    s.eta[i] = eta_of(T);
    if (!(s.eta[i] > 0.0)) {
      throw ScheduleInfeasibleError("aasdcs_strong_schedule: eta_" + std::to_string(k) + " <= 0");
    }
  }
  fill_weights(s);
  return s;
}

InnerSchedule inner_schedule(int T, const ProblemClassConstants& consts) {
  if (T < 1) throw ArgumentError("inner_schedule: T must be >= 1");
  InnerSchedule in;
  in.T = T;
  const std::size_t n1 = static_cast<std::size_t>(T) + 1;
  in.lambda.assign(n1, 0.0);
  in.beta.assign(n1, 0.0);
  in.Lambda.assign(n1, 0.0);
  const double CL = consts.growth_C + consts.lip_L;
  for (int t = 1; t <= T; ++t) {
    const std::size_t i = static_cast<std::size_t>(t);
    const double td = t;
    in.lambda[i] = 2.0 / (td + 1.0);
    in.beta[i] = 4.0 * CL / (td * (td + 1.0));
    in.Lambda[i] = t == 1 ? 1.0 : (1.0 - in.lambda[i]) * in.Lambda[i - 1];
  }
  return in;
}

// ---------------------------------------------------------------- validation

bool ValidationReport::ok() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.passed; });
}

const ConditionResult* ValidationReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : conditions) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) os << " (first violation at " << c.first_violation << ")";
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  return os.str();
}

namespace {

constexpr double kRelTol = 1e-12;

bool leq(double lhs, double rhs) {
  return lhs <= rhs + kRelTol * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

bool approx_eq(double lhs, double rhs) { return leq(lhs, rhs) && leq(rhs, lhs); }

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  template <typename Pred>
  void over(const std::string& name, int first, int last, Pred&& holds) {
    ConditionResult r;
    r.name = name;
    for (int k = first; k <= last; ++k) {
      if (!holds(k)) {
        r.passed = false;
        r.first_violation = k;
        break;
      }
    }
    report_.conditions.push_back(std::move(r));
  }

  void single(const std::string& name, bool passed, std::string detail = {}) {
    ConditionResult r;
    r.name = name;
    r.passed = passed;
    r.first_violation = passed ? -1 : 0;
    r.detail = std::move(detail);
    report_.conditions.push_back(std::move(r));
  }

  void merge(const ValidationReport& other, const std::string& prefix) {
    for (auto c : other.conditions) {
      c.name = prefix + c.name;
      report_.conditions.push_back(std::move(c));
    }
  }

 private:
  ValidationReport& report_;
};

}  // namespace

ValidationReport validate_inner(const InnerSchedule& in, const ProblemClassConstants& consts,
                                double mu, double eta) {
  ValidationReport report;
  Checker check(report);
  const double CL = consts.growth_C + consts.lip_L;
  const auto at = [](const std::vector<double>& v, int t) { return v[static_cast<std::size_t>(t)]; };
  check.single("lam_1", in.T >= 1 && at(in.lambda, 1) == 1.0);
  check.over("mu_L", 1, in.T, [&](int t) {
    const double lam = at(in.lambda, t);
    return mu + eta + at(in.beta, t) > CL * lam * lam;
  });
  check.over("beta_Lambda", 2, in.T, [&](int t) {
    return approx_eq(at(in.beta, t) / at(in.Lambda, t), at(in.beta, t - 1) / at(in.Lambda, t - 1));
  });
  return report;
}

ValidationReport validate_schedule(const OuterSchedule& s, int m, int d_max,
                                   const ProblemClassConstants& consts) {
  ValidationReport report;
  Checker check(report);
  const int N = s.N;
  const std::size_t n1 = static_cast<std::size_t>(std::max(N, 0)) + 1;
  const bool shaped = N >= 1 && s.alpha.size() == n1 && s.tau.size() == n1 && s.eta.size() == n1 &&
                      s.theta_hat.size() == n1 && s.theta.size() == n1 &&
                      (s.T.empty() || s.T.size() == n1);
  check.single("shape", shaped && s.m == m && s.d_max == d_max,
               shaped ? "" : "array lengths do not match N");
  if (!shaped) return report;

  const auto A = [&](int k) { return s.alpha[static_cast<std::size_t>(k)]; };
  const auto Tau = [&](int k) { return s.tau[static_cast<std::size_t>(k)]; };
  const auto Eta = [&](int k) { return s.eta[static_cast<std::size_t>(k)]; };
  const auto Th = [&](int k) { return s.theta_hat[static_cast<std::size_t>(k)]; };
  const double md = m;
  const double d2 = static_cast<double>(d_max) * d_max;

  // Weight sequences.
  double sum_hat = 0.0, sum_theta = 0.0;
  for (std::size_t k = 0; k < n1; ++k) {
    sum_hat += s.theta_hat[k];
    sum_theta += s.theta[k];
  }
  check.single("theta_hat_sum", std::abs(sum_hat - 1.0) <= 1e-12);
  check.single("theta_sum", std::abs(sum_theta - 1.0) <= 1e-12);
  check.over("theta_hat_nonnegative", 0, N, [&](int k) { return Th(k) >= 0.0; });
  check.over("theta_nonnegative", 0, N,
             [&](int k) { return s.theta[static_cast<std::size_t>(k)] >= -1e-15; });
  const auto expected_theta = theta_from_theta_hat(s.theta_hat, m);
  check.over("theta_xweight", 0, N, [&](int k) {
    return approx_eq(s.theta[static_cast<std::size_t>(k)], expected_theta[static_cast<std::size_t>(k)]);
  });
  check.over("positive_steps", 1, N, [&](int k) { return Tau(k) > 0.0 && Eta(k) > 0.0; });
  check.over("theta_tau", 2, N, [&](int k) { return approx_eq(Th(k) * Tau(k), Th(k - 1) * Tau(k - 1)); });

  if (s.regime == Regime::adpd) {
    check.single("regime_has_no_inner_loop", s.T.empty());
    check.over("theta_eta", 2, N, [&](int k) { return leq(Th(k) * Eta(k), Th(k - 1) * Eta(k - 1)); });
    // Stated for k up to N + 1; checked where theta_hat_k exists.
    check.over("alpha_theta", 2, N, [&](int k) { return approx_eq(A(k) * Th(k), md * Th(k - 1)); });
    check.over("eta_tau_alpha1", 2, N,
               [&](int k) { return leq(4.0 * md * A(k) * d2, Eta(k - 1) * Tau(k)); });
    check.over("eta_tau_alpha2", 1, N,
               [&](int k) { return leq(4.0 * (md - 1.0) * (md - 1.0) * d2, Eta(k) * Tau(k)); });
    return report;
  }

  check.single("regime_has_inner_loop", s.T.size() == n1);
  if (s.T.size() != n1) return report;
  const auto Tk = [&](int k) { return static_cast<double>(s.T[static_cast<std::size_t>(k)]); };
  const double CL = consts.growth_C + consts.lip_L;
  const auto smooth_term = [&](int k) { return CL / (Tk(k) * (Tk(k) + 1.0)); };

  check.over("inner_budget_positive", 1, N, [&](int k) { return Tk(k) >= 1.0; });
  check.over("alpha_htheta", 2, N, [&](int k) { return approx_eq(A(k) * Th(k), Th(k - 1)); });
  check.over("alpha_d_eta_tau", 2, N,
             [&](int k) { return leq(8.0 * md * A(k) * d2, Eta(k - 1) * Tau(k)); });
  check.over("m_d_eta_tau", 1, N,
             [&](int k) { return leq(8.0 * (md - 1.0) * (md - 1.0) * d2, md * Eta(k) * Tau(k)); });

  double inner_mu = 0.0;
  if (s.regime == Regime::aasdcs_convex) {
    check.over("theta_Tk_eta", 2, N, [&](int k) {
      return leq(Th(k) * (smooth_term(k) + Eta(k)), Th(k - 1) * (smooth_term(k - 1) + Eta(k - 1)));
    });
  } else {
    inner_mu = consts.mu;
    check.single("mu_positive", consts.mu > 0.0);
    check.over("theta_Tk_eta_s", 2, N, [&](int k) {
      return leq(Th(k) * (smooth_term(k) + Eta(k)),
                 Th(k - 1) * (smooth_term(k - 1) + Eta(k - 1) + consts.mu));
    });
    check.over("eta_lower_bound", 1, N,
               [&](int k) { return leq((k + 3.0 * md + 1.0) * consts.mu / 4.0, Eta(k)); });
  }

  // Inner conditions per distinct T_k, at the smallest eta paired with it.
  std::map<int, double> min_eta;
  for (int k = 1; k <= N; ++k) {
    const int T = s.T[static_cast<std::size_t>(k)];
    if (T < 1) continue;
    auto it = min_eta.find(T);
    if (it == min_eta.end()) {
      min_eta.emplace(T, Eta(k));
    } else {
      it->second = std::min(it->second, Eta(k));
    }
  }
  ValidationReport inner_all;
  bool lam = true, muL = true, bl = true;
  int lam_k = -1, muL_k = -1, bl_k = -1;
  for (const auto& [T, eta] : min_eta) {
    const auto r = validate_inner(inner_schedule(T, consts), consts, inner_mu, eta);
    const auto* a = r.find("lam_1");
    const auto* b = r.find("mu_L");
    const auto* c = r.find("beta_Lambda");
    if (lam && !a->passed) { lam = false; lam_k = a->first_violation; }
    if (muL && !b->passed) { muL = false; muL_k = b->first_violation; }
    if (bl && !c->passed) { bl = false; bl_k = c->first_violation; }
  }
  ConditionResult r1{"inner_lam_1", lam, lam_k, {}};
  ConditionResult r2{"inner_mu_L", muL, muL_k, {}};
  ConditionResult r3{"inner_beta_Lambda", bl, bl_k, {}};
  report.conditions.push_back(r1);
  report.conditions.push_back(r2);
  report.conditions.push_back(r3);
  return report;
}

void write_schedule_csv(std::ostream& os, const OuterSchedule& s) {
  os << "k,alpha,tau,eta,T,theta_hat,theta\n";
  os << std::setprecision(17);
  for (int k = 0; k <= s.N; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    os << k << ',';
    if (k == 0) {
      os << ",,,";
    } else {
      os << s.alpha[i] << ',' << s.tau[i] << ',' << s.eta[i] << ',';
    }
    if (k > 0 && !s.T.empty()) os << s.T[i];
    os << ',' << s.theta_hat[i] << ',' << s.theta[i] << '\n';
  }
}

}  // namespace decsliding
