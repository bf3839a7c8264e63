#include "decsliding/prox.hpp"

#include <cmath>
#include <string>

namespace decsliding {

Constraint Constraint::ball(double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("ball constraint needs a finite radius >= 0");
  }
  Constraint c;
  c.radius_ = radius;
  return c;
}

void Constraint::project_in_place(Vector& x) const {
  if (radius_ < 0.0) return;
  const double n = x.norm();
  if (n > radius_) x *= radius_ / n;
}

bool Constraint::contains(const Vector& x, double tol) const {
  return radius_ < 0.0 || x.norm() <= radius_ + tol;
}

Vector EuclideanProx::prox_step(const Vector& g, double lin_weight,
                                std::span<const WeightedAnchor> anchors,
                                const Constraint& x_set) const {
  if (anchors.empty()) throw ArgumentError("prox_step: at least one anchor is required");
  double total = 0.0;
  Vector acc = -lin_weight * g;
  for (const auto& a : anchors) {
    if (!(a.weight > 0.0)) {
      throw ArgumentError("prox_step: anchor weight must be positive, got " +
                          std::to_string(a.weight));
    }
    if (a.point.size() != g.size()) throw ArgumentError("prox_step: dimension mismatch");
    acc.noalias() += a.weight * a.point;
    total += a.weight;
  }
  acc /= total;
  x_set.project_in_place(acc);
  return acc;
}

std::shared_ptr<const ProxFunction> euclidean_prox() {
  static const auto instance = std::make_shared<const EuclideanProx>();
  return instance;
}

Vector bregman_prox_step(const ProxFunction& prox, const Vector& g, const Vector& anchor,
                         double a_lin, double a_anchor, const Constraint& x_set) {
  const WeightedAnchor anchors[] = {{anchor, a_anchor}};
  return prox.prox_step(g, a_lin, anchors, x_set);
}

}  // namespace decsliding
