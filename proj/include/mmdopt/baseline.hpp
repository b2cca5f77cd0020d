#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mmdopt/collision.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// Scenario-reduction comparison method: keep the samples whose constraint
// value sits nearest the collision boundary for a fixed initial-guess ego
// trajectory, with uniform weights, and plan against them with a
// deterministic hinge cost.
struct BaselineConfig {
  enum class Aggregation { kMaxOverSteps, kSumOverSteps };

  Eigen::Index m = 10;
  Aggregation aggregation = Aggregation::kMaxOverSteps;
};

// Per-sample boundary score against the guess trajectory.
inline double boundary_score(const Trajectory& guess,
                             const Eigen::Ref<const Eigen::VectorXd>& obs_x,
                             const Eigen::Ref<const Eigen::VectorXd>& obs_y,
                             const CollisionGeometry& geom,
                             BaselineConfig::Aggregation aggregation) {
  double score = aggregation == BaselineConfig::Aggregation::kMaxOverSteps
                     ? -std::numeric_limits<double>::infinity()
                     : 0.0;
  for (Eigen::Index k = 0; k < guess.horizon(); ++k) {
    const double f = f_max_over_circles(guess.x(k), guess.y(k), obs_x(k), obs_y(k), geom);
    if (aggregation == BaselineConfig::Aggregation::kMaxOverSteps)
      score = std::max(score, f);
    else
      score += f;
  }
  return score;
}

// Selects the m samples with |score| minimal (nearest the feasible-set
// boundary from either side), uniform weights 1/m, ties toward lower index.
inline ReducedSet select_boundary_set(const ObstacleSampleSet& o, const Trajectory& guess,
                                      const CollisionGeometry& geom,
                                      const BaselineConfig& cfg) {
  validate(geom);
  const Eigen::Index n = o.size();
  if (cfg.m < 1 || cfg.m > n)
    throw std::invalid_argument("select_boundary_set: need 1 <= m <= n");
  if (guess.horizon() != o.horizon() || guess.dt != o.dt())
    throw std::invalid_argument("select_boundary_set: horizon/dt mismatch");

  Eigen::VectorXd score(n);
  const Eigen::Index h = o.horizon();
  for (Eigen::Index j = 0; j < n; ++j)
    score(j) = boundary_score(guess, o.stacked().row(j).head(h),
                              o.stacked().row(j).tail(h), geom, cfg.aggregation);

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double sa = std::abs(score(a));
    const double sb = std::abs(score(b));
    if (sa != sb) return sa < sb;
    return a < b;
  });

  ReducedSet rs;
  rs.indices.assign(order.begin(), order.begin() + cfg.m);
  rs.weights = Eigen::VectorXd::Constant(cfg.m, 1.0 / static_cast<double>(cfg.m));
  rs.parent_n = n;
  return rs;
}

// Hinge-sum collision cost over the reduced samples; zero exactly when the
// ego avoids every sample at every step.
inline double deterministic_collision_cost(const Trajectory& ego,
                                           const ObstacleForecast& rset,
                                           const CollisionGeometry& geom) {
  validate(geom);
  if (rset.xs.cols() != ego.horizon() || rset.dt != ego.dt)
    throw std::invalid_argument("deterministic_collision_cost: horizon/dt mismatch");
  double cost = 0.0;
  for (Eigen::Index k = 0; k < ego.horizon(); ++k)
    for (Eigen::Index j = 0; j < rset.xs.rows(); ++j)
      for (double off : geom.circle_offsets)
        cost += f_bar(f_constraint(ego.x(k), ego.y(k), rset.xs(j, k) + off,
                                   rset.ys(j, k), geom));
  return cost;
}

}  // namespace mmdopt
