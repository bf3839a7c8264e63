#include "decsliding/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace decsliding {

ReferenceMethod parse_reference_method(const std::string& name) {
  if (name == "closed_form") return ReferenceMethod::closed_form;
  if (name == "long_run_subgradient") return ReferenceMethod::long_run_subgradient;
  throw ArgumentError("unknown reference method '" + name + "'");
}

std::string to_string(ReferenceMethod method) {
  return method == ReferenceMethod::closed_form ? "closed_form" : "long_run_subgradient";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double sum_at(const ProblemSet& problems, const Vector& x) {
  double total = 0.0;
  for (const auto& p : problems) total += p->value(x);
  return total;
}

Vector subgradient_sum(const ProblemSet& problems, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (const auto& p : problems) g += p->subgradient(x);
  return g;
}

std::vector<const QuadraticObjective*> as_quadratics(const ProblemSet& problems) {
  std::vector<const QuadraticObjective*> out;
  for (const auto& p : problems) {
    const auto* q = dynamic_cast<const QuadraticObjective*>(p.get());
    if (!q) return {};
    out.push_back(q);
  }
  return out;
}

std::vector<const SvmObjective*> as_svms(const ProblemSet& problems) {
  std::vector<const SvmObjective*> out;
  for (const auto& p : problems) {
    const auto* s = dynamic_cast<const SvmObjective*>(p.get());
    if (!s || s->regularizer() != dynamic_cast<const SvmObjective*>(problems.front().get())->regularizer()) {
      return {};
    }
    out.push_back(s);
  }
  return out;
}

bool same_constraint(const ProblemSet& problems) {
  const double r = problems.front()->constraint().radius();
  return std::all_of(problems.begin(), problems.end(),
                     [r](const auto& p) { return p->constraint().radius() == r; });
}

// ||x - P(x - g / Q)|| Q: zero exactly at the constrained minimizer of a
// Q-strongly convex isotropic quadratic.
double gradient_mapping_norm(const Constraint& c, const Vector& x, const Vector& g, double Q) {
  return Q * (x - c.project(x - g / Q)).norm();
}

// Dual lower bound for the hinge problem from multipliers a_s in [0, 1],
// one vector per agent: D(a) = sum c_s a_s - R*(z), z = sum c_s a_s v_s u_s.
double svm_dual(const std::vector<const SvmObjective*>& svms, std::vector<Vector> a) {
  const Eigen::Index d = svms.front()->dim();
  Vector z = Vector::Zero(d);
  double linear = 0.0;
  double W = 0.0;
  for (std::size_t i = 0; i < svms.size(); ++i) {
    const auto& shard = svms[i]->shard();
    const double c = 1.0 / static_cast<double>(shard.size());
    Vector weighted(a[i].size());
    for (Eigen::Index s = 0; s < a[i].size(); ++s) {
      weighted[s] = c * a[i][s] * shard.labels[static_cast<std::size_t>(s)];
    }
    z += shard.features.transpose() * weighted;
    linear += c * a[i].sum();
    W += svms[i]->reg_weight();
  }
  if (svms.front()->regularizer() == Regularizer::l2) {
    return W > 0.0 ? linear - z.squaredNorm() / (2.0 * W) : -std::numeric_limits<double>::infinity();
  }
  const double zmax = z.lpNorm<Eigen::Infinity>();
  const double scale = zmax > W ? W / zmax : 1.0;
  return scale * linear;
}

std::vector<Vector> active_indicators(const std::vector<const SvmObjective*>& svms, const Vector& x) {
  std::vector<Vector> out;
  for (const auto* s : svms) {
    const Vector margins = s->shard().features * x;
    Vector ind(margins.size());
    for (Eigen::Index k = 0; k < margins.size(); ++k) {
      ind[k] = s->shard().labels[static_cast<std::size_t>(k)] * margins[k] < 1.0 ? 1.0 : 0.0;
    }
    out.push_back(std::move(ind));
  }
  return out;
}

ReferenceSolution closed_form_reference(const ProblemSet& problems) {
  const auto quads = as_quadratics(problems);
  if (quads.empty()) {
    throw UnsupportedProblemError("closed-form reference needs quadratic objectives");
  }
  if (!same_constraint(problems)) {
    throw UnsupportedProblemError("closed-form reference needs one shared constraint");
  }
  Vector weighted = Vector::Zero(quads.front()->dim());
  double Q = 0.0;
  for (const auto* q : quads) {
    weighted += q->weight() * q->center();
    Q += q->weight();
  }
  ReferenceSolution ref;
  ref.method = ReferenceMethod::closed_form;
  ref.x_star = problems.front()->constraint().project(weighted / Q);
  ref.F_star = sum_at(problems, ref.x_star);
  ref.certificate = gradient_mapping_norm(problems.front()->constraint(), ref.x_star,
                                          subgradient_sum(problems, ref.x_star), Q);
  return ref;
}

ReferenceSolution long_run_reference(const ProblemSet& problems, std::int64_t budget, double tol) {
  const auto svms = as_svms(problems);
  const auto quads = as_quadratics(problems);
  if (svms.empty() && quads.empty()) {
    throw UnsupportedProblemError("long-run reference has no certificate for these objectives");
  }
  if (!same_constraint(problems)) {
    throw UnsupportedProblemError("long-run reference needs one shared constraint");
  }
  const Constraint& X = problems.front()->constraint();
  const Eigen::Index d = problems.front()->dim();

  // Step scale from the subgradient norm at the origin.
  const Vector origin = X.project(Vector::Zero(d));
  const double g0 = subgradient_sum(problems, origin).norm();
  const double step0 = g0 > 0.0 ? 1.0 / g0 : 1.0;

  auto certificate = [&](const Vector& xbar, const std::vector<Vector>& abar) {
    if (!svms.empty()) {
      const double primal = sum_at(problems, xbar);
      const double dual = std::max(svm_dual(svms, abar), svm_dual(svms, active_indicators(svms, xbar)));
      return primal - dual;
    }
    double Q = 0.0;
    for (const auto* q : quads) Q += q->weight();
    return gradient_mapping_norm(X, xbar, subgradient_sum(problems, xbar), Q);
  };

  Vector x = origin;
  std::int64_t t = 0;
  std::int64_t epoch_len = 1000;
  double cert = std::numeric_limits<double>::infinity();
  Vector xbar = x;
  while (t < budget) {
    const std::int64_t len = std::min(epoch_len, budget - t);
    Vector xsum = Vector::Zero(d);
    std::vector<Vector> asum;
    if (!svms.empty()) {
      for (const auto* s : svms) asum.push_back(Vector::Zero(static_cast<Eigen::Index>(s->shard().size())));
    }
    for (std::int64_t n = 0; n < len; ++n) {
      ++t;
      const Vector g = subgradient_sum(problems, x);
      x -= (step0 / std::sqrt(static_cast<double>(t))) * g;
      X.project_in_place(x);
      xsum += x;
      if (!svms.empty()) {
        const auto ind = active_indicators(svms, x);
        for (std::size_t i = 0; i < ind.size(); ++i) asum[i] += ind[i];
      }
    }
    xbar = xsum / static_cast<double>(len);
    for (auto& a : asum) a /= static_cast<double>(len);
    cert = certificate(xbar, asum);
    if (cert <= tol) break;
    x = xbar;
    epoch_len *= 2;
  }
  if (!(cert <= tol)) {
    throw ReferenceNotConvergedError("centralized reference: certificate " + format_double(cert) +
                                     " > tol " + format_double(tol) + " after " +
                                     std::to_string(t) + " iterations");
  }
  ReferenceSolution ref;
  ref.method = ReferenceMethod::long_run_subgradient;
  ref.x_star = xbar;
  ref.F_star = sum_at(problems, xbar);
  ref.certificate = cert;
  ref.iterations = t;
  return ref;
}

}  // namespace

ReferenceSolution centralized_reference(const ProblemSet& problems, ReferenceMethod method,
                                        std::int64_t budget, double tol) {
  if (problems.empty()) throw ArgumentError("centralized_reference: empty problem set");
  if (budget < 1) throw ArgumentError("centralized_reference: budget must be >= 1");
  if (!(tol > 0.0)) throw ArgumentError("centralized_reference: tol must be > 0");
  for (const auto& p : problems) {
    if (p->dim() != problems.front()->dim()) {
      throw ArgumentError("centralized_reference: objectives differ in dimension");
    }
  }
  if (method == ReferenceMethod::closed_form) return closed_form_reference(problems);
  return long_run_reference(problems, budget, tol);
}

void write_reference(std::ostream& os, const ReferenceSolution& ref) {
  os << "method " << to_string(ref.method) << '\n'
     << "F_star " << format_double(ref.F_star) << '\n'
     << "certificate " << format_double(ref.certificate) << '\n'
     << "iterations " << ref.iterations << '\n'
     << "dim " << ref.x_star.size() << '\n';
  for (Eigen::Index j = 0; j < ref.x_star.size(); ++j) os << format_double(ref.x_star[j]) << '\n';
}

ReferenceSolution read_reference(std::istream& is) {
  ReferenceSolution ref;
  std::string key, method;
  Eigen::Index dim = 0;
  if (!(is >> key >> method) || key != "method") throw ParseError("reference: expected method", 1);
  ref.method = parse_reference_method(method);
  if (!(is >> key >> ref.F_star) || key != "F_star") throw ParseError("reference: expected F_star", 2);
  if (!(is >> key >> ref.certificate) || key != "certificate") {
    throw ParseError("reference: expected certificate", 3);
  }
  if (!(is >> key >> ref.iterations) || key != "iterations") {
    throw ParseError("reference: expected iterations", 4);
  }
  if (!(is >> key >> dim) || key != "dim" || dim < 0) throw ParseError("reference: expected dim", 5);
  ref.x_star.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (!(is >> ref.x_star[j])) throw ParseError("reference: truncated x_star", static_cast<std::size_t>(6 + j));
  }
  return ref;
}

double primal_gap(const ProblemSet& problems, const AgentVectors& xs, const ReferenceSolution& ref) {
  return stacked_objective(problems, xs) - ref.F_star;
}

namespace {

double stacked_dot(const AgentVectors& a, const AgentVectors& b) {
  if (a.size() != b.size()) throw ArgumentError("stacked inner product: agent count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) throw ArgumentError("stacked inner product: dimension mismatch");
    total += a[i].dot(b[i]);
  }
  return total;
}

}  // namespace

double gap_function_Q(const ProblemSet& problems, const Topology& topo, const AgentVectors& xs,
                      const AgentVectors& ys, const AgentVectors& xbars, const AgentVectors& ybars) {
  return stacked_objective(problems, xs) + stacked_dot(apply_laplacian(topo, xs), ybars) -
         stacked_objective(problems, xbars) - stacked_dot(apply_laplacian(topo, xbars), ys);
}

double perturbed_gap(const ProblemSet& problems, const Topology& topo, const AgentVectors& v,
                     const AgentVectors& xs, const Vector& x_star, double radius) {
  if (!(radius >= 0.0)) throw ArgumentError("perturbed_gap: radius must be >= 0");
  const AgentVectors lx = apply_laplacian(topo, xs);
  if (v.size() != lx.size()) throw ArgumentError("perturbed_gap: v has wrong agent count");
  double sq = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (v[i].size() != lx[i].size()) throw ArgumentError("perturbed_gap: dimension mismatch");
    sq += (lx[i] - v[i]).squaredNorm();
  }
  return stacked_objective(problems, xs) - sum_at(problems, x_star) + radius * std::sqrt(sq);
}

double rate_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ArgumentError("rate_slope: need at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
      throw ArgumentError("rate_slope: N and values must be positive and finite");
    }
    sx += std::log(n);
    sy += std::log(v);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw ArgumentError("rate_slope: N values must not all coincide");
  return sxy / sxx;
}

void RunTrace::write_csv(std::ostream& os) const {
  os << kHeader << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << r.comm_rounds << ',' << r.grad_evals << ',' << format_double(r.objective)
       << ',' << format_double(r.feasibility) << ',' << format_double(r.wall_seconds) << ','
       << r.seed << '\n';
  }
}

RunTrace RunTrace::read_csv(std::istream& is) {
  RunTrace trace;
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw ParseError("trace: bad header", 1);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ParseError("trace: expected 7 columns", lineno);
    try {
      TraceRow r;
      r.k = std::stoll(cells[0]);
      r.comm_rounds = std::stoll(cells[1]);
      r.grad_evals = std::stoll(cells[2]);
      r.objective = std::stod(cells[3]);
      r.feasibility = std::stod(cells[4]);
      r.wall_seconds = std::stod(cells[5]);
      r.seed = std::stoull(cells[6]);
      trace.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("trace: malformed number", lineno);
    }
  }
  return trace;
}

}  // namespace decsliding
