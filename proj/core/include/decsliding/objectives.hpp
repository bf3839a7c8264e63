#ifndef DECSLIDING_OBJECTIVES_HPP
#define DECSLIDING_OBJECTIVES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decsliding/dataset.hpp"
#include "decsliding/prox.hpp"
#include "decsliding/rng.hpp"
#include "decsliding/types.hpp"

namespace decsliding {

class Topology;

/// Regularity constants of the objective class
///   (mu/2)||x-y||^2 <= f(x) - f(y) - <f'(y), x-y> <= (L/2)||x-y||^2 + M||x-y||
/// plus the oracle noise bound sigma and the prox growth constant C.
struct ProblemClassConstants {
  double mu = 0.0;
  double lip_L = 0.0;
  double lip_M = 0.0;
  double sigma = 0.0;
  double growth_C = 1.0;

  /// Throws ArgumentError if any constant is negative/non-finite or C < 1.
  void validate() const;
};

/// Private objective f_i of one agent: value, a deterministic subgradient
/// selector, a stochastic first-order oracle, and its constraint set.
///
/// Implementations hold no mutable state; sampling draws only from the
/// caller's engine.
class AgentObjective {
 public:
  AgentObjective(Eigen::Index dim, ProblemClassConstants constants, Constraint constraint,
                 std::shared_ptr<const ProxFunction> prox);
  virtual ~AgentObjective() = default;

  Eigen::Index dim() const noexcept { return dim_; }
  const ProblemClassConstants& constants() const noexcept { return constants_; }
  const Constraint& constraint() const noexcept { return constraint_; }
  const ProxFunction& prox() const noexcept { return *prox_; }

  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;

  /// G(x, xi): writes one unbiased stochastic subgradient into out.
  virtual void sample_gradient(const Vector& x, Rng& rng, Vector& out) const = 0;
  Vector sample_gradient(const Vector& x, Rng& rng) const {
    Vector out(dim_);
    sample_gradient(x, rng, out);
    return out;
  }

  /// argmin_{x in X} <w, x> + f(x) + eta V(anchor, x) when it has a closed
  /// form; nullopt otherwise.
  virtual std::optional<Vector> exact_prox(const Vector& w, const Vector& anchor,
                                           double eta) const;
  virtual bool has_exact_prox() const { return false; }

 private:
  Eigen::Index dim_;
  ProblemClassConstants constants_;
  Constraint constraint_;
  std::shared_ptr<const ProxFunction> prox_;
};

using ProblemSet = std::vector<std::shared_ptr<const AgentObjective>>;

/// Network-wide constants for parameter schedules: mu is the smallest
/// strong-convexity modulus, L/M/sigma the largest, C the largest growth
/// constant.
ProblemClassConstants aggregate_constants(const ProblemSet& problems);

/// F(x) = sum_i f_i(x_i).
double stacked_objective(const ProblemSet& problems, const AgentVectors& xs);

/// f(x) = (q/2)||x - c||^2, with optional additive isotropic Gaussian oracle
/// noise of total standard deviation sigma (sigma / sqrt(d) per coordinate).
class QuadraticObjective final : public AgentObjective {
 public:
  QuadraticObjective(Vector center, double weight, double noise_sigma,
                     Constraint constraint = Constraint::unconstrained());

  const Vector& center() const noexcept { return center_; }
  double weight() const noexcept { return weight_; }

  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  using AgentObjective::sample_gradient;
  void sample_gradient(const Vector& x, Rng& rng, Vector& out) const override;
  std::optional<Vector> exact_prox(const Vector& w, const Vector& anchor,
                                   double eta) const override;
  bool has_exact_prox() const override;

 private:
  Vector center_;
  double weight_;
  double coord_std_;
};

struct QuadraticOptions {
  double noise_sigma = 0.0;
  Constraint constraint = Constraint::unconstrained();
};

/// One QuadraticObjective per center. Throws ArgumentError for q <= 0 or
/// centers of unequal dimension.
ProblemSet make_quadratic_problem(const AgentVectors& centers, double weight,
                                  const QuadraticOptions& options = {});

double hinge_value(const Vector& x, double label, const Vector& features);
/// -v u when v<x,u> < 1, zero otherwise (the kink takes the flat side).
Vector hinge_subgradient(const Vector& x, double label, const Vector& features);

enum class Regularizer { l1, l2 };

Regularizer parse_regularizer(const std::string& name);
std::string to_string(Regularizer reg);

/// f(x) = (1/|S|) sum_s hinge(x; v_s, u_s) + r(x) with r = w ||x||_1 (l1) or
/// (w/2) ||x||^2 (l2). The oracle draws one sample index uniformly and
/// returns its hinge subgradient plus the exact regularizer subgradient.
class SvmObjective final : public AgentObjective {
 public:
  SvmObjective(Dataset shard, Regularizer reg, double reg_weight, ProblemClassConstants constants);

  const Dataset& shard() const noexcept { return shard_; }
  Regularizer regularizer() const noexcept { return reg_; }
  double reg_weight() const noexcept { return reg_weight_; }

  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  using AgentObjective::sample_gradient;
  void sample_gradient(const Vector& x, Rng& rng, Vector& out) const override;

  double loss(const Vector& x) const;
  double regularization(const Vector& x) const;
  Vector regularizer_subgradient(const Vector& x) const;

 private:
  Dataset shard_;
  Regularizer reg_;
  double reg_weight_;
};

struct SvmOptions {
  /// Regularizer weight for every agent; defaults to 1/|S_i| (l1) and
  /// 1/|S_i| on (1/2)||x||^2 (l2).
  std::optional<double> reg_weight;
  /// Samples used to estimate the oracle standard deviation at x = 0.
  int sigma_samples = 1000;
  std::uint64_t sigma_seed = 0x5eed;
};

/// Splits data evenly over the topology's agents and builds one hinge-loss
/// objective per shard. Constants are estimated from the data:
/// M = max ||u_s|| + r (r = max(1, 2 w sqrt(d)) for l1, 0 for l2),
/// sigma = largest empirical oracle std at 0, mu = min w (l2) or 0,
/// L = max w (l2) or 0.
ProblemSet make_svm_problem(const Dataset& data, const Topology& topo, Regularizer reg,
                            const SvmOptions& options = {});

}  // namespace decsliding

#endif
