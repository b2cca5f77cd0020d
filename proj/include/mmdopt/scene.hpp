#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdopt/collision.hpp"
#include "mmdopt/frenet.hpp"
#include "mmdopt/projection.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/rng.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// One lateral set-point hypothesis with its probability.
struct IntentOffset {
  double offset = 0.0;
  double probability = 0.0;
};

// Gaussian law over the obstacle's desired forward speed.
struct VelocityLaw {
  double mean = 10.0;
  double stddev = 1.5;
};

// Full description of one benchmark scene: ego start and bounds, collision
// geometry, and the obstacle's multi-modal behavioral law. The default is a
// two-lane merge scene: the ego cruises in its lane while a slower obstacle
// ahead in the adjacent lane merges with low probability.
struct SceneConfig {
  std::string id = "scene";

  double ego_x = 0.0, ego_y = 0.0;
  double ego_vx = 15.0, ego_vy = 0.0;
  double ego_ax = 0.0, ego_ay = 0.0;
  double v_des = 15.0;
  ConstraintSpec bounds;
  CollisionGeometry geometry = CollisionGeometry::from_footprint(4.0, 2.0);
  Eigen::Index horizon = 50;
  double dt = 0.1;

  double obs_x = 25.0, obs_y = 3.5;
  double obs_vx = 10.0, obs_vy = 0.0;
  double obs_ax = 0.0, obs_ay = 0.0;
  std::vector<IntentOffset> intents = {{3.5, 0.95}, {0.0, 0.05}};
  VelocityLaw velocity_law;

  FrenetGains ego_gains{1.0, 2.0};
  FrenetGains obstacle_gains{4.0, 4.0};

  int n_draw = 100;
  int n_validation = 1000;
  uint64_t seed = 0;

  // Chance-constraint confidence level; carried as metadata only, the MMD
  // surrogate never consumes it.
  double confidence_eta = 0.95;
};

inline void validate(const SceneConfig& s) {
  validate(s.bounds);
  validate(s.geometry);
  validate(s.ego_gains);
  validate(s.obstacle_gains);
  if (s.horizon < 5) throw std::invalid_argument("scene: horizon must be at least 5");
  if (!(s.dt > 0.0)) throw std::invalid_argument("scene: dt must be positive");
  if (s.n_draw < 1 || s.n_validation < 1)
    throw std::invalid_argument("scene: n_draw and n_validation must be >= 1");
  if (s.intents.empty()) throw std::invalid_argument("scene: at least one intent");
  double total = 0.0;
  for (const IntentOffset& intent : s.intents) {
    if (intent.probability < 0.0)
      throw std::invalid_argument("scene: negative intent probability");
    total += intent.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("scene: intent probabilities must sum to 1");
  if (!(s.velocity_law.stddev >= 0.0))
    throw std::invalid_argument("scene: velocity stddev must be >= 0");
}

inline BoundaryConditions ego_boundary(const SceneConfig& s) {
  return BoundaryConditions::initial_state(s.ego_x, s.ego_y, s.ego_vx, s.ego_vy,
                                           s.ego_ax, s.ego_ay);
}

inline BoundaryConditions obstacle_boundary(const SceneConfig& s) {
  return BoundaryConditions::initial_state(s.obs_x, s.obs_y, s.obs_vx, s.obs_vy,
                                           s.obs_ax, s.obs_ay);
}

// Disjoint RNG streams for the planning draws and the held-out validation
// draws of one scene.
inline uint64_t draw_stream_seed(const SceneConfig& s) { return derive_seed(s.seed, 0x0d); }
inline uint64_t validation_stream_seed(const SceneConfig& s) {
  return derive_seed(s.seed, 0x7a);
}

// Draws (intent, speed) pairs from the categorical x Gaussian law and maps
// each through the Frenet planner under the obstacle's boundary conditions.
inline ObstacleSampleSet generate_obstacle_samples(const SceneConfig& s, int count,
                                                   uint64_t seed) {
  validate(s);
  if (count < 1) throw std::invalid_argument("generate_obstacle_samples: count must be >= 1");
  FrenetPlanner planner(obstacle_boundary(s), s.obstacle_gains, s.horizon, s.dt);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<BehavioralInput> ds;
  ds.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = uniform(rng);
    double cdf = 0.0;
    double offset = s.intents.back().offset;
    for (const IntentOffset& intent : s.intents) {
      cdf += intent.probability;
      if (u < cdf) {
        offset = intent.offset;
        break;
      }
    }
    const double v = s.velocity_law.mean + s.velocity_law.stddev * normal(rng);
    ds.push_back({offset, v});
  }
  return ObstacleSampleSet::from_trajectories(planner.plan_batch(ds));
}

namespace detail {
inline constexpr double kIntentProbabilityGrid[] = {0.05, 0.15, 0.25, 0.35, 0.45,
                                                    0.55, 0.65, 0.75, 0.85, 0.95};
}

// Scene suite: the base scene followed by count-1 perturbations cycling a
// fixed grid of intent probabilities (assigned to the non-primary intents)
// and jittering the obstacle's initial position and speed. Every scene gets
// its own derived seed.
inline std::vector<SceneConfig> make_scene_suite(const SceneConfig& base, int count,
                                                 uint64_t seed) {
  validate(base);
  if (count < 1) throw std::invalid_argument("make_scene_suite: count must be >= 1");
  std::vector<SceneConfig> suite;
  suite.reserve(static_cast<size_t>(count));
  suite.push_back(base);
  const size_t grid_size = std::size(detail::kIntentProbabilityGrid);
  for (int i = 1; i < count; ++i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(i)));
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    SceneConfig s = base;
    s.id = base.id + "-" + std::to_string(i);
    s.seed = derive_seed(base.seed, static_cast<uint64_t>(i));
    const double p =
        detail::kIntentProbabilityGrid[static_cast<size_t>(i - 1) % grid_size];
    if (s.intents.size() > 1) {
      s.intents[0].probability = 1.0 - p;
      const double share = p / static_cast<double>(s.intents.size() - 1);
      for (size_t j = 1; j < s.intents.size(); ++j) s.intents[j].probability = share;
    }
    s.obs_x = base.obs_x + 5.0 * uniform(rng);
    s.obs_vx = std::max(0.5, base.obs_vx + 2.0 * uniform(rng));
    suite.push_back(s);
  }
  return suite;
}

}  // namespace mmdopt
