#include "decsliding/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "decsliding/graph.hpp"

namespace decsliding {

void ProblemClassConstants::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ArgumentError(std::string("problem constant ") + name + " must be finite and >= 0");
    }
  };
  check(mu, "mu");
  check(lip_L, "L");
  check(lip_M, "M");
  check(sigma, "sigma");
  check(growth_C, "C");
  if (growth_C < 1.0) throw ArgumentError("prox growth constant C must be >= 1");
}

AgentObjective::AgentObjective(Eigen::Index dim, ProblemClassConstants constants,
                               Constraint constraint, std::shared_ptr<const ProxFunction> prox)
    : dim_(dim), constants_(constants), constraint_(constraint), prox_(std::move(prox)) {
  if (dim_ < 1) throw ArgumentError("objective dimension must be >= 1");
  if (!prox_) throw ArgumentError("objective needs a prox function");
  constants_.growth_C = prox_->growth_constant();
  constants_.validate();
}

std::optional<Vector> AgentObjective::exact_prox(const Vector&, const Vector&, double) const {
  return std::nullopt;
}

ProblemClassConstants aggregate_constants(const ProblemSet& problems) {
  if (problems.empty()) throw ArgumentError("aggregate_constants: empty problem set");
  ProblemClassConstants out = problems.front()->constants();
  for (const auto& p : problems) {
    const auto& c = p->constants();
    out.mu = std::min(out.mu, c.mu);
    out.lip_L = std::max(out.lip_L, c.lip_L);
    out.lip_M = std::max(out.lip_M, c.lip_M);
    out.sigma = std::max(out.sigma, c.sigma);
    out.growth_C = std::max(out.growth_C, c.growth_C);
  }
  return out;
}

double stacked_objective(const ProblemSet& problems, const AgentVectors& xs) {
  if (problems.size() != xs.size()) {
    throw ArgumentError("stacked_objective: expected one vector per agent");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += problems[i]->value(xs[i]);
  return total;
}

// ---------------------------------------------------------------- quadratic

QuadraticObjective::QuadraticObjective(Vector center, double weight, double noise_sigma,
                                       Constraint constraint)
    : AgentObjective(center.size(),
                     ProblemClassConstants{weight, weight, 0.0, noise_sigma, 1.0}, constraint,
                     euclidean_prox()),
      center_(std::move(center)),
      weight_(weight),
      coord_std_(noise_sigma / std::sqrt(static_cast<double>(center_.size()))) {
  if (!(weight > 0.0)) throw ArgumentError("quadratic weight q must be > 0");
}

double QuadraticObjective::value(const Vector& x) const {
  return 0.5 * weight_ * (x - center_).squaredNorm();
}

Vector QuadraticObjective::subgradient(const Vector& x) const { return weight_ * (x - center_); }

void QuadraticObjective::sample_gradient(const Vector& x, Rng& rng, Vector& out) const {
  out.resize(x.size());
  if (coord_std_ > 0.0) {
    std::normal_distribution<double> noise(0.0, coord_std_);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      out[j] = weight_ * (x[j] - center_[j]) + noise(rng);
    }
  } else {
    out.noalias() = weight_ * (x - center_);
  }
}

bool QuadraticObjective::has_exact_prox() const {
  return dynamic_cast<const EuclideanProx*>(&prox()) != nullptr;
}

std::optional<Vector> QuadraticObjective::exact_prox(const Vector& w, const Vector& anchor,
                                                     double eta) const {
  if (!has_exact_prox()) return std::nullopt;
  if (!(eta >= 0.0) || weight_ + eta <= 0.0) throw ArgumentError("exact_prox: eta must be >= 0");
  // argmin <w,x> + (q/2)||x-c||^2 + (eta/2)||x-a||^2 is isotropic, so the
  // constrained minimizer is the projection of the unconstrained one.
  Vector x = (weight_ * center_ - w + eta * anchor) / (weight_ + eta);
  constraint().project_in_place(x);
  return x;
}

ProblemSet make_quadratic_problem(const AgentVectors& centers, double weight,
                                  const QuadraticOptions& options) {
  if (!(weight > 0.0)) throw ArgumentError("make_quadratic_problem: q must be > 0");
  if (centers.empty()) throw ArgumentError("make_quadratic_problem: no centers");
  require_dimension(centers, centers.front().size(), "make_quadratic_problem");
  if (!(options.noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  ProblemSet out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    out.push_back(std::make_shared<QuadraticObjective>(c, weight, options.noise_sigma,
                                                       options.constraint));
  }
  return out;
}

// ---------------------------------------------------------------- hinge

double hinge_value(const Vector& x, double label, const Vector& features) {
  if (x.size() != features.size()) throw ArgumentError("hinge_value: dimension mismatch");
  return std::max(0.0, 1.0 - label * x.dot(features));
}

Vector hinge_subgradient(const Vector& x, double label, const Vector& features) {
  if (x.size() != features.size()) throw ArgumentError("hinge_subgradient: dimension mismatch");
  if (label * x.dot(features) < 1.0) return -label * features;
  return Vector::Zero(x.size());
}

Regularizer parse_regularizer(const std::string& name) {
  if (name == "l1") return Regularizer::l1;
  if (name == "l2") return Regularizer::l2;
  throw ArgumentError("unknown regularizer '" + name + "' (expected l1 or l2)");
}

std::string to_string(Regularizer reg) { return reg == Regularizer::l1 ? "l1" : "l2"; }

SvmObjective::SvmObjective(Dataset shard, Regularizer reg, double reg_weight,
                           ProblemClassConstants constants)
    : AgentObjective(shard.dim(), constants, Constraint::unconstrained(), euclidean_prox()),
      shard_(std::move(shard)),
      reg_(reg),
      reg_weight_(reg_weight) {
  if (shard_.size() == 0) throw ArgumentError("SvmObjective: empty shard");
  if (!(reg_weight_ >= 0.0)) throw ArgumentError("SvmObjective: regularizer weight must be >= 0");
}

double SvmObjective::loss(const Vector& x) const {
  const Vector margins = shard_.features * x;
  double total = 0.0;
  for (Eigen::Index s = 0; s < margins.size(); ++s) {
    total += std::max(0.0, 1.0 - shard_.labels[static_cast<std::size_t>(s)] * margins[s]);
  }
  return total / static_cast<double>(shard_.size());
}

double SvmObjective::regularization(const Vector& x) const {
  return reg_ == Regularizer::l1 ? reg_weight_ * x.lpNorm<1>()
                                 : 0.5 * reg_weight_ * x.squaredNorm();
}

Vector SvmObjective::regularizer_subgradient(const Vector& x) const {
  if (reg_ == Regularizer::l2) return reg_weight_ * x;
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    g[j] = x[j] > 0.0 ? reg_weight_ : (x[j] < 0.0 ? -reg_weight_ : 0.0);
  }
  return g;
}

double SvmObjective::value(const Vector& x) const { return loss(x) + regularization(x); }

Vector SvmObjective::subgradient(const Vector& x) const {
  const Vector margins = shard_.features * x;
  Vector coeff(margins.size());
  for (Eigen::Index s = 0; s < margins.size(); ++s) {
    const double v = shard_.labels[static_cast<std::size_t>(s)];
    coeff[s] = v * margins[s] < 1.0 ? -v : 0.0;
  }
  Vector g = shard_.features.transpose() * coeff;
  g /= static_cast<double>(shard_.size());
  g += regularizer_subgradient(x);
  return g;
}

void SvmObjective::sample_gradient(const Vector& x, Rng& rng, Vector& out) const {
  std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(shard_.size()) - 1);
  const Eigen::Index s = pick(rng);
  const double v = shard_.labels[static_cast<std::size_t>(s)];
  double margin = 0.0;
  for (SparseRows::InnerIterator it(shard_.features, s); it; ++it) margin += it.value() * x[it.col()];
  if (reg_ == Regularizer::l2) {
    out.noalias() = reg_weight_ * x;
  } else {
    out.resize(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      out[j] = x[j] > 0.0 ? reg_weight_ : (x[j] < 0.0 ? -reg_weight_ : 0.0);
    }
  }
  if (v * margin < 1.0) {
    for (SparseRows::InnerIterator it(shard_.features, s); it; ++it) out[it.col()] -= v * it.value();
  }
}

ProblemSet make_svm_problem(const Dataset& data, const Topology& topo, Regularizer reg,
                            const SvmOptions& options) {
  const int m = topo.size();
  if (data.size() < static_cast<std::size_t>(m)) {
    throw ArgumentError("make_svm_problem: " + std::to_string(data.size()) +
                        " samples cannot give every one of " + std::to_string(m) +
                        " agents a non-empty shard");
  }
  if (options.sigma_samples < 1) throw ArgumentError("make_svm_problem: sigma_samples must be >= 1");
  const Partition part = partition_evenly(data.size(), m);
  const double sqrt_d = std::sqrt(static_cast<double>(data.dim()));
  ProblemSet out;
  out.reserve(static_cast<std::size_t>(m));
  Rng rng(options.sigma_seed);
  for (int i = 0; i < m; ++i) {
    Dataset shard = data.slice(part.begin(i), part.end(i));
    const double n = static_cast<double>(shard.size());
    const double w = options.reg_weight.value_or(1.0 / n);

    double max_row_norm = 0.0;
    for (Eigen::Index r = 0; r < shard.features.rows(); ++r) {
      max_row_norm = std::max(max_row_norm, shard.features.row(r).norm());
    }
    ProblemClassConstants c;
    if (reg == Regularizer::l2) {
      c.mu = w;
      c.lip_L = w;
      c.lip_M = max_row_norm;
    } else {
      c.lip_M = max_row_norm + std::max(1.0, 2.0 * w * sqrt_d);
    }

    // sigma: empirical RMS deviation of the oracle from the full subgradient at 0.
    auto provisional = std::make_shared<SvmObjective>(shard, reg, w, c);
    const Vector zero = Vector::Zero(data.dim());
    const Vector full = provisional->subgradient(zero);
    Vector g(data.dim());
    double second_moment = 0.0;
    for (int s = 0; s < options.sigma_samples; ++s) {
      provisional->sample_gradient(zero, rng, g);
      second_moment += (g - full).squaredNorm();
    }
    c.sigma = std::sqrt(second_moment / options.sigma_samples);
    out.push_back(std::make_shared<SvmObjective>(std::move(shard), reg, w, c));
  }
  return out;
}

}  // namespace decsliding
