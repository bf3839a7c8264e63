#ifndef DECSLIDING_METRICS_HPP
#define DECSLIDING_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "decsliding/graph.hpp"
#include "decsliding/objectives.hpp"

namespace decsliding {

enum class ReferenceMethod { closed_form, long_run_subgradient };

ReferenceMethod parse_reference_method(const std::string& name);
std::string to_string(ReferenceMethod method);

/// Centralized solution of min_x sum_i f_i(x). For closed_form the
/// certificate is the gradient-mapping norm at x_star; for the long-run
/// solver it is a duality gap (SVM) or the gradient norm (quadratics).
struct ReferenceSolution {
  Vector x_star;
  double F_star = 0.0;
  ReferenceMethod method = ReferenceMethod::closed_form;
  double certificate = 0.0;
  std::int64_t iterations = 0;
};

/// closed_form needs quadratic objectives sharing one constraint.
/// long_run_subgradient runs full-batch subgradient descent (1/sqrt(t) steps,
/// epoch-wise averaging with restarts) until certificate <= tol; throws
/// ReferenceNotConvergedError if budget iterations do not suffice.
ReferenceSolution centralized_reference(const ProblemSet& problems, ReferenceMethod method,
                                        std::int64_t budget = 1'000'000, double tol = 1e-6);

/// Plain text: method, F_star, certificate, iterations, then x_star entries.
void write_reference(std::ostream& os, const ReferenceSolution& ref);
ReferenceSolution read_reference(std::istream& is);

/// sum_i f_i(x_i) - F_star, signed.
double primal_gap(const ProblemSet& problems, const AgentVectors& xs, const ReferenceSolution& ref);

/// Q(z; zbar) = F(x) + <Lx, ybar> - F(xbar) - <L xbar, y>.
double gap_function_Q(const ProblemSet& problems, const Topology& topo, const AgentVectors& xs,
                      const AgentVectors& ys, const AgentVectors& xbars, const AgentVectors& ybars);

/// sup over ||ybar|| <= radius of Q((x, .); (x*, ybar)) - <v, ybar>, which is
/// F(x) - F(x*) + radius ||Lx - v||.
double perturbed_gap(const ProblemSet& problems, const Topology& topo, const AgentVectors& v,
                     const AgentVectors& xs, const Vector& x_star, double radius);

/// Least-squares slope of log(value) against log(N). Needs two or more
/// points with distinct positive N and positive values.
double rate_slope(const std::vector<std::pair<double, double>>& points);

struct TraceRow {
  std::int64_t k = 0;
  std::int64_t comm_rounds = 0;
  std::int64_t grad_evals = 0;
  double objective = 0.0;
  double feasibility = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct RunTrace {
  std::vector<TraceRow> rows;

  static constexpr const char* kHeader = "k,comm_rounds,grad_evals,objective,feasibility,wall_seconds,seed";

  void write_csv(std::ostream& os) const;
  static RunTrace read_csv(std::istream& is);
};

/// Round-trip decimal form used for every CSV double.
std::string format_double(double v);

}  // namespace decsliding

#endif
