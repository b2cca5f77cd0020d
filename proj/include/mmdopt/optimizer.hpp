#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmdopt/frenet.hpp"
#include "mmdopt/projection.hpp"
#include "mmdopt/rng.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

struct OptimizerConfig {
  int batch = 1000;             // behavioral samples per iteration
  int constraint_elites = 150;  // kept after ranking by residual norm
  int elites = 50;              // kept after ranking by cost
  double gamma = 0.9;           // temperature
  double eta = 0.6;             // learning rate
  int iterations = 10;
  uint64_t seed = 0;
  int projection_iters = TrajectoryProjector::kDefaultIters;
  bool add_residual_to_cost = true;  // include residual norm in the ranked cost
  Eigen::Vector2d init_mean{0.0, 15.0};
  Eigen::Matrix2d init_covariance{{2.0, 0.0}, {0.0, 4.0}};
  double covariance_floor = 1e-6;
};

inline void validate(const OptimizerConfig& cfg) {
  if (cfg.elites < 1 || cfg.elites > cfg.constraint_elites ||
      cfg.constraint_elites > cfg.batch)
    throw std::invalid_argument("optimizer: need 1 <= elites <= constraint_elites <= batch");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("optimizer: gamma must be positive");
  if (!(cfg.eta > 0.0) || cfg.eta > 1.0)
    throw std::invalid_argument("optimizer: eta must lie in (0, 1]");
  if (cfg.iterations < 1) throw std::invalid_argument("optimizer: iterations must be >= 1");
  if (!(cfg.covariance_floor > 0.0))
    throw std::invalid_argument("optimizer: covariance floor must be positive");
}

struct CemState {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  int iteration = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  BehavioralInput best_input;
  Trajectory best_trajectory;
};

struct IterationTraceRow {
  int iteration = 0;
  double best_cost = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d covariance_diagonal = Eigen::Vector2d::Zero();
};

struct OptimizeResult {
  Trajectory trajectory;
  BehavioralInput input;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<IterationTraceRow> trace;
};

using CostFn = std::function<double(const BehavioralInput&, const Trajectory&)>;

namespace detail {

inline Eigen::Matrix2d floor_covariance(const Eigen::Matrix2d& sigma, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
  const Eigen::Vector2d evals = es.eigenvalues().cwiseMax(floor);
  const Eigen::Matrix2d floored =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (floored + floored.transpose());
}

}  // namespace detail

// Exponentially cost-weighted mean/covariance update. Costs are shifted by
// the elite minimum before exponentiation, which leaves the normalized
// weights unchanged but avoids underflow at large absolute costs.
inline CemState distribution_update(
    const CemState& state,
    const std::vector<std::pair<Eigen::Vector2d, double>>& elites,
    const OptimizerConfig& cfg) {
  validate(cfg);
  if (elites.empty()) throw std::invalid_argument("distribution_update: no elites");

  double shift = std::numeric_limits<double>::infinity();
  for (const auto& [d, cost] : elites) shift = std::min(shift, cost);

  double total = 0.0;
  Eigen::Vector2d weighted_sum = Eigen::Vector2d::Zero();
  for (const auto& [d, cost] : elites) {
    const double s = std::exp(-(cost - shift) / cfg.gamma);
    total += s;
    weighted_sum += s * d;
  }

  CemState next = state;
  next.mean = (1.0 - cfg.eta) * state.mean + cfg.eta * (weighted_sum / total);
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& [d, cost] : elites) {
    const double s = std::exp(-(cost - shift) / cfg.gamma);
    const Eigen::Vector2d diff = d - next.mean;
    scatter += s * diff * diff.transpose();
  }
  next.covariance = detail::floor_covariance(
      (1.0 - cfg.eta) * state.covariance + cfg.eta * (scatter / total),
      cfg.covariance_floor);
  next.iteration = state.iteration + 1;
  return next;
}

// Sampling-based trajectory optimizer: draw behavioral inputs, map each
// through the Frenet planner, project to the constrained set, keep the
// lowest-residual batch slice, rank those by cost, update the sampling
// distribution on the elites, and return the best projected trajectory seen.
// The cost callback is pluggable so different collision surrogates share this
// machinery unchanged.
inline OptimizeResult optimize(const FrenetPlanner& planner,
                               const TrajectoryProjector& projector,
                               const OptimizerConfig& cfg, const CostFn& cost_fn) {
  validate(cfg);
  if (planner.horizon() != projector.horizon() || planner.dt() != projector.dt())
    throw std::invalid_argument("optimize: planner/projector horizon mismatch");

  CemState state;
  state.mean = cfg.init_mean;
  state.covariance = detail::floor_covariance(cfg.init_covariance, cfg.covariance_floor);

  OptimizeResult result;
  result.trace.reserve(static_cast<size_t>(cfg.iterations));

  std::vector<Eigen::Index> order(static_cast<size_t>(cfg.batch));
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const std::vector<BehavioralInput> ds =
        sample_behaviors(state.mean, state.covariance, cfg.batch,
                         derive_seed(cfg.seed, static_cast<uint64_t>(iter)));
    const std::vector<Trajectory> raw = planner.plan_batch(ds);

    std::vector<Trajectory> projected;
    projected.reserve(raw.size());
    Eigen::VectorXd residual_norm(cfg.batch);
    for (int r = 0; r < cfg.batch; ++r) {
      auto [traj, res] = projector.project(raw[static_cast<size_t>(r)], cfg.projection_iters);
      projected.push_back(std::move(traj));
      residual_norm(r) = res.norm;
    }

    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::nth_element(order.begin(), order.begin() + cfg.constraint_elites - 1, order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       if (residual_norm(a) != residual_norm(b))
                         return residual_norm(a) < residual_norm(b);
                       return a < b;
                     });

    std::vector<std::pair<Eigen::Vector2d, double>> scored;
    scored.reserve(static_cast<size_t>(cfg.constraint_elites));
    std::vector<Eigen::Index> scored_index;
    scored_index.reserve(static_cast<size_t>(cfg.constraint_elites));
    for (int e = 0; e < cfg.constraint_elites; ++e) {
      const Eigen::Index r = order[static_cast<size_t>(e)];
      const BehavioralInput& d = ds[static_cast<size_t>(r)];
      double cost = cost_fn(d, projected[static_cast<size_t>(r)]);
      if (cfg.add_residual_to_cost) cost += residual_norm(r);
      scored.emplace_back(Eigen::Vector2d(d.lateral_offset, d.desired_speed), cost);
      scored_index.push_back(r);
    }

    std::vector<size_t> rank(scored.size());
    std::iota(rank.begin(), rank.end(), size_t{0});
    std::sort(rank.begin(), rank.end(), [&](size_t a, size_t b) {
      if (scored[a].second != scored[b].second) return scored[a].second < scored[b].second;
      return scored_index[a] < scored_index[b];
    });

    std::vector<std::pair<Eigen::Vector2d, double>> elites;
    elites.reserve(static_cast<size_t>(cfg.elites));
    for (int e = 0; e < cfg.elites; ++e) elites.push_back(scored[rank[static_cast<size_t>(e)]]);

    const size_t best_rank = rank.front();
    if (elites.front().second < state.best_cost) {
      state.best_cost = elites.front().second;
      state.best_input = ds[static_cast<size_t>(scored_index[best_rank])];
      state.best_trajectory = projected[static_cast<size_t>(scored_index[best_rank])];
    }

    state = distribution_update(state, elites, cfg);
    result.trace.push_back({state.iteration, state.best_cost, state.mean,
                            state.covariance.diagonal()});
  }

  result.trajectory = state.best_trajectory;
  result.input = state.best_input;
  result.cost = state.best_cost;
  return result;
}

}  // namespace mmdopt
