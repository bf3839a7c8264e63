#ifndef DECSLIDING_PROX_HPP
#define DECSLIDING_PROX_HPP

#include <memory>
#include <span>

#include "decsliding/types.hpp"

namespace decsliding {

/// Closed convex set X_i. Either all of R^d or a Euclidean ball centered at
/// the origin.
class Constraint {
 public:
  static Constraint unconstrained() { return Constraint(); }
  static Constraint ball(double radius);

  bool is_unconstrained() const noexcept { return radius_ < 0.0; }
  double radius() const noexcept { return radius_; }

  void project_in_place(Vector& x) const;
  Vector project(Vector x) const {
    project_in_place(x);
    return x;
  }
  bool contains(const Vector& x, double tol = 1e-12) const;

 private:
  double radius_ = -1.0;
};

/// A point with a positive weight, used as one term w * V(point, .) of a
/// composite prox objective.
struct WeightedAnchor {
  const Vector& point;
  double weight;
};

/// Distance generating function omega and the induced Bregman divergence
/// V(x, u) = omega(u) - omega(x) - <grad omega(x), u - x>.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  virtual double omega(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  /// Quadratic growth constant C with V(x, u) <= (C / 2) ||x - u||^2.
  virtual double growth_constant() const = 0;

  virtual double divergence(const Vector& x, const Vector& u) const {
    return omega(u) - omega(x) - gradient(x).dot(u - x);
  }

  /// argmin_{u in X} lin_weight * <g, u> + sum_a weight_a * V(point_a, u).
  /// Every anchor weight must be positive.
  virtual Vector prox_step(const Vector& g, double lin_weight,
                           std::span<const WeightedAnchor> anchors,
                           const Constraint& x_set) const = 0;
};

/// omega(x) = ||x||^2 / 2, so V(x, u) = ||x - u||^2 / 2 and C = 1.
class EuclideanProx final : public ProxFunction {
 public:
  double omega(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector gradient(const Vector& x) const override { return x; }
  double growth_constant() const override { return 1.0; }
  double divergence(const Vector& x, const Vector& u) const override {
    return 0.5 * (x - u).squaredNorm();
  }
  Vector prox_step(const Vector& g, double lin_weight, std::span<const WeightedAnchor> anchors,
                   const Constraint& x_set) const override;
};

std::shared_ptr<const ProxFunction> euclidean_prox();

/// Single-anchor convenience: argmin_{u in X} a_lin <g, u> + a_anchor V(anchor, u).
/// For Euclidean omega this is the projection of anchor - (a_lin / a_anchor) g.
Vector bregman_prox_step(const ProxFunction& prox, const Vector& g, const Vector& anchor,
                         double a_lin, double a_anchor, const Constraint& x_set);

}  // namespace decsliding

#endif
