#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmdopt/kernel.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// Combined ego/obstacle footprint: an axis-aligned ellipse, optionally
// replicated at longitudinal offsets so a long footprint is covered by
// several circles.
struct CollisionGeometry {
  double a = 4.0;
  double b_axis = 2.0;
  std::vector<double> circle_offsets = {0.0};

  // Three-circle cover of a length x width rectangle, dilated by the same
  // circle again for the other vehicle.
  static CollisionGeometry from_footprint(double length, double width) {
    if (!(length > 0.0) || !(width > 0.0))
      throw std::invalid_argument("footprint dimensions must be positive");
    const double r = std::hypot(length / 6.0, width / 2.0);
    CollisionGeometry geom;
    geom.a = 2.0 * r;
    geom.b_axis = 2.0 * r;
    geom.circle_offsets = {-length / 4.0, 0.0, length / 4.0};
    return geom;
  }
};

inline void validate(const CollisionGeometry& geom) {
  if (!(geom.a > 0.0) || !(geom.b_axis > 0.0))
    throw std::invalid_argument("collision geometry: semi-axes must be positive");
  if (geom.circle_offsets.empty())
    throw std::invalid_argument("collision geometry: need at least one circle");
  for (double off : geom.circle_offsets)
    if (!std::isfinite(off))
      throw std::invalid_argument("collision geometry: non-finite offset");
}

struct SurrogateConfig {
  double w = 1e5;       // weight of the embedding-distance term
  double v_des = 15.0;  // tracked forward speed (m/s)
  KernelSpec bandwidth; // kernel over scalar hinge values
};

// Signed overlap with one ellipse: positive inside (collision), zero on the
// boundary, negative outside.
inline double f_constraint(double ego_x, double ego_y, double obs_x, double obs_y,
                           const CollisionGeometry& geom) {
  const double dx = (ego_x - obs_x) / geom.a;
  const double dy = (ego_y - obs_y) / geom.b_axis;
  return 1.0 - dx * dx - dy * dy;
}

inline double f_constraint(const Eigen::Vector2d& ego_xy, const Eigen::Vector2d& obs_xy,
                           const CollisionGeometry& geom) {
  return f_constraint(ego_xy.x(), ego_xy.y(), obs_xy.x(), obs_xy.y(), geom);
}

inline double f_bar(double f) { return std::max(0.0, f); }

// Worst overlap across the circle decomposition of one obstacle position.
inline double f_max_over_circles(double ego_x, double ego_y, double obs_x,
                                 double obs_y, const CollisionGeometry& geom) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double off : geom.circle_offsets)
    worst = std::max(worst, f_constraint(ego_x, ego_y, obs_x + off, obs_y, geom));
  return worst;
}

// Reduced-set samples of one obstacle laid out for fast per-step access.
struct ObstacleForecast {
  Eigen::MatrixXd xs;       // m x H
  Eigen::MatrixXd ys;       // m x H
  Eigen::VectorXd weights;  // refined weights, length m
  double dt = 0.0;
};

inline ObstacleForecast materialize(const ObstacleSampleSet& o, const ReducedSet& rs) {
  validate(rs);
  if (rs.parent_n != o.size())
    throw std::invalid_argument("materialize: reduced set belongs to another sample set");
  const Eigen::Index h = o.horizon();
  const Eigen::Index m = static_cast<Eigen::Index>(rs.indices.size());
  ObstacleForecast fc;
  fc.xs.resize(m, h);
  fc.ys.resize(m, h);
  fc.weights = rs.weights;
  fc.dt = o.dt();
  for (Eigen::Index j = 0; j < m; ++j) {
    fc.xs.row(j) = o.stacked().row(rs.indices[static_cast<size_t>(j)]).head(h);
    fc.ys.row(j) = o.stacked().row(rs.indices[static_cast<size_t>(j)]).tail(h);
  }
  return fc;
}

// Squared RKHS distance between the weighted embedding of one step's hinge
// values and the matching stack of Dirac deltas at zero (unit weights),
//
//   E = w' Kvv w - 2 M sum_i w_i k(v_i, 0) + M^2.
inline double step_embedding_distance(const Eigen::Ref<const Eigen::VectorXd>& values,
                                      const Eigen::Ref<const Eigen::VectorXd>& weights,
                                      const KernelSpec& spec) {
  validate(spec);
  if (values.size() != weights.size())
    throw std::invalid_argument("step_embedding_distance: size mismatch");
  const Eigen::Index m = values.size();
  const double inv2h2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  double quad = 0.0, cross = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    quad += weights(i) * weights(i);
    cross += weights(i) * std::exp(-values(i) * values(i) * inv2h2);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = values(i) - values(j);
      quad += 2.0 * weights(i) * weights(j) * std::exp(-d * d * inv2h2);
    }
  }
  const double count = static_cast<double>(m);
  return std::max(0.0, quad - 2.0 * count * cross + count * count);
}

// Collision-probability surrogate: per step, hinge values of every
// (obstacle sample, circle) pair are stacked into one scalar set and compared
// against the ideal all-zeros embedding; steps are summed. Strictly positive
// even far from all obstacles (the floor (sum w - M)^2 per step), which is
// constant in the ego trajectory and so does not move the argmin.
inline double l_dist(const Trajectory& ego, std::span<const ObstacleForecast> obstacles,
                     const CollisionGeometry& geom, const KernelSpec& spec) {
  validate(geom);
  validate(spec);
  const Eigen::Index h = ego.horizon();
  Eigen::Index total = 0;
  for (const ObstacleForecast& fc : obstacles) {
    if (fc.xs.cols() != h || fc.dt != ego.dt)
      throw std::invalid_argument("l_dist: horizon/dt mismatch");
    total += fc.xs.rows();
  }
  const Eigen::Index circles = static_cast<Eigen::Index>(geom.circle_offsets.size());
  const Eigen::Index m = total * circles;
  if (m == 0) return 0.0;

  Eigen::VectorXd weights(m), values(m);
  {
    Eigen::Index at = 0;
    for (const ObstacleForecast& fc : obstacles)
      for (Eigen::Index c = 0; c < circles; ++c)
        for (Eigen::Index j = 0; j < fc.xs.rows(); ++j) weights(at++) = fc.weights(j);
  }
  const double floor_term = std::pow(weights.sum() - static_cast<double>(m), 2.0);

  const double inv2h2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  const double count = static_cast<double>(m);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < h; ++k) {
    Eigen::Index at = 0;
    double vmax = 0.0;
    for (const ObstacleForecast& fc : obstacles) {
      for (Eigen::Index c = 0; c < circles; ++c) {
        const double off = geom.circle_offsets[static_cast<size_t>(c)];
        for (Eigen::Index j = 0; j < fc.xs.rows(); ++j) {
          const double v = f_bar(f_constraint(ego.x(k), ego.y(k), fc.xs(j, k) + off,
                                              fc.ys(j, k), geom));
          values(at++) = v;
          vmax = std::max(vmax, v);
        }
      }
    }
    if (vmax == 0.0) {
      sum += floor_term;
      continue;
    }
    double quad = 0.0, cross = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      quad += weights(i) * weights(i);
      cross += weights(i) * std::exp(-values(i) * values(i) * inv2h2);
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double d = values(i) - values(j);
        quad += 2.0 * weights(i) * weights(j) * std::exp(-d * d * inv2h2);
      }
    }
    sum += std::max(0.0, quad - 2.0 * count * cross + count * count);
  }
  return sum;
}

inline double l_dist(const Trajectory& ego, const ObstacleForecast& obstacle,
                     const CollisionGeometry& geom, const KernelSpec& spec) {
  return l_dist(ego, std::span<const ObstacleForecast>(&obstacle, 1), geom, spec);
}

// Smoothness plus velocity-tracking part of the augmented cost.
inline double smoothness_velocity_cost(const Trajectory& ego, double v_des) {
  const Eigen::VectorXd ax = second_derivative(ego.x, ego.dt);
  const Eigen::VectorXd ay = second_derivative(ego.y, ego.dt);
  const Eigen::VectorXd vx = first_derivative(ego.x, ego.dt);
  return ax.squaredNorm() + ay.squaredNorm() + (vx.array() - v_des).square().sum();
}

inline double c_aug(const Trajectory& ego, std::span<const ObstacleForecast> obstacles,
                    const CollisionGeometry& geom, const SurrogateConfig& cfg) {
  if (!(cfg.w >= 0.0)) throw std::invalid_argument("c_aug: weight must be >= 0");
  double cost = smoothness_velocity_cost(ego, cfg.v_des);
  if (cfg.w > 0.0) cost += cfg.w * l_dist(ego, obstacles, geom, cfg.bandwidth);
  return cost;
}

inline double c_aug(const Trajectory& ego, const ObstacleForecast& obstacle,
                    const CollisionGeometry& geom, const SurrogateConfig& cfg) {
  return c_aug(ego, std::span<const ObstacleForecast>(&obstacle, 1), geom, cfg);
}

}  // namespace mmdopt
