#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmdopt/errors.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// Behavioral decision variable: a lateral setpoint and a cruise speed.
struct BehavioralInput {
  double lateral_offset = 0.0;
  double desired_speed = 0.0;
};

// Feedback gains of the lateral / velocity tracking costs. kappa_v defaults
// to 2*sqrt(kappa_p), the critically damped pairing.
struct FrenetGains {
  double kappa_p = 1.0;
  double kappa_v = 2.0;
};

inline void validate(const FrenetGains& g) {
  if (!(g.kappa_p > 0.0) || !(g.kappa_v > 0.0))
    throw std::invalid_argument("frenet gains must be positive");
}

// Equality-constrained quadratic planner over discrete waypoints.
//
// Per axis the objective stacks a smoothness term and a tracking term,
//
//   x:  sum_k xdd[k]^2 + (xdd[k] - kp (xd[k] - v_d))^2
//   y:  sum_k ydd[k]^2 + (ydd[k] - kp (y[k] - y_d) - kv yd[k])^2
//
// with derivatives taken by finite differences, subject to the pinned
// boundary rows. The two axes decouple, so each gets its own KKT system;
// the factorization depends only on (horizon, dt, gains, boundary pattern)
// and is reused across behavioral inputs, which enter through the
// right-hand side alone.
class FrenetPlanner {
 public:
  FrenetPlanner(const BoundaryConditions& bounds, const FrenetGains& gains,
                Eigen::Index horizon, double dt)
      : horizon_(horizon), dt_(dt) {
    validate(bounds);
    validate(gains);
    if (horizon < 5) throw std::invalid_argument("frenet: horizon must be at least 5");
    if (!(dt > 0.0)) throw std::invalid_argument("frenet: dt must be positive");

    const Eigen::MatrixXd d1 = first_difference_matrix(horizon, dt);
    const Eigen::MatrixXd d2 = second_difference_matrix(horizon, dt);
    const Eigen::MatrixXd ones = Eigen::VectorXd::Ones(horizon);

    // x axis: tracking operator A_v = D2 - kp D1, offset -kp v_d.
    {
      const Eigen::MatrixXd a = d2 - gains.kappa_p * d1;
      auto [rows, vals] = boundary_rows(bounds.x, horizon, dt);
      x_ = make_axis(d2, a, -2.0 * gains.kappa_p * (a.transpose() * ones), rows, vals);
    }
    // y axis: A_l = D2 - kp I - kv D1, offset -kp y_d.
    {
      const Eigen::MatrixXd a =
          d2 - gains.kappa_p * Eigen::MatrixXd::Identity(horizon, horizon) -
          gains.kappa_v * d1;
      auto [rows, vals] = boundary_rows(bounds.y, horizon, dt);
      y_ = make_axis(d2, a, -2.0 * gains.kappa_p * (a.transpose() * ones), rows, vals);
    }
  }

  Eigen::Index horizon() const { return horizon_; }
  double dt() const { return dt_; }

  Trajectory plan(const BehavioralInput& d) const {
    Eigen::VectorXd xs = solve_axis(x_, d.desired_speed);
    Eigen::VectorXd ys = solve_axis(y_, d.lateral_offset);
    return Trajectory(std::move(xs), std::move(ys), dt_);
  }

  // One pair of multi-column backsolves for a whole batch of inputs.
  std::vector<Trajectory> plan_batch(const std::vector<BehavioralInput>& ds) const {
    const Eigen::Index count = static_cast<Eigen::Index>(ds.size());
    Eigen::MatrixXd rhs_x(x_.dim, count), rhs_y(y_.dim, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      rhs_x.col(i) = axis_rhs(x_, ds[static_cast<size_t>(i)].desired_speed);
      rhs_y.col(i) = axis_rhs(y_, ds[static_cast<size_t>(i)].lateral_offset);
    }
    const Eigen::MatrixXd sol_x = x_.kkt.solve(rhs_x);
    const Eigen::MatrixXd sol_y = y_.kkt.solve(rhs_y);
    std::vector<Trajectory> out;
    out.reserve(ds.size());
    for (Eigen::Index i = 0; i < count; ++i)
      out.emplace_back(sol_x.col(i).head(horizon_), sol_y.col(i).head(horizon_), dt_);
    return out;
  }

 private:
  struct Axis {
    Eigen::PartialPivLU<Eigen::MatrixXd> kkt;
    Eigen::VectorXd rhs_dir;   // linear term per unit setpoint
    Eigen::VectorXd eq_vals;
    Eigen::Index dim = 0;      // horizon + number of equality rows
    Eigen::Index n_eq = 0;
  };

  Axis make_axis(const Eigen::MatrixXd& d2, const Eigen::MatrixXd& a,
                 Eigen::VectorXd rhs_dir, const Eigen::MatrixXd& rows,
                 const Eigen::VectorXd& vals) const {
    const Eigen::Index h = horizon_;
    const Eigen::Index m = rows.rows();
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(h + m, h + m);
    kkt.topLeftCorner(h, h) = 2.0 * (d2.transpose() * d2 + a.transpose() * a);
    kkt.topRightCorner(h, m) = rows.transpose();
    kkt.bottomLeftCorner(m, h) = rows;

    Axis axis;
    axis.kkt.compute(kkt);
    axis.rhs_dir = std::move(rhs_dir);
    axis.eq_vals = vals;
    axis.dim = h + m;
    axis.n_eq = m;

    // Probe solve; a singular system (degenerate boundary rows, horizon too
    // short for the stencils) shows up as a large residual.
    Eigen::VectorXd probe = axis_rhs(axis, 1.0);
    Eigen::VectorXd sol = axis.kkt.solve(probe);
    const double scale = std::max(1.0, probe.lpNorm<Eigen::Infinity>());
    if (!sol.allFinite() ||
        (kkt * sol - probe).lpNorm<Eigen::Infinity>() > 1e-6 * scale)
      throw NumericalError("frenet: singular KKT system");
    return axis;
  }

  Eigen::VectorXd axis_rhs(const Axis& axis, double setpoint) const {
    Eigen::VectorXd rhs(axis.dim);
    rhs.head(horizon_) = setpoint * axis.rhs_dir;
    rhs.tail(axis.n_eq) = axis.eq_vals;
    return rhs;
  }

  Eigen::VectorXd solve_axis(const Axis& axis, double setpoint) const {
    return axis.kkt.solve(axis_rhs(axis, setpoint)).head(horizon_);
  }

  Eigen::Index horizon_;
  double dt_;
  Axis x_;
  Axis y_;
};

inline Trajectory frenet_plan(const BehavioralInput& d,
                              const BoundaryConditions& bounds,
                              const FrenetGains& gains, Eigen::Index horizon,
                              double dt) {
  return FrenetPlanner(bounds, gains, horizon, dt).plan(d);
}

// Draws behavioral inputs from N(mean, cov). The covariance may be singular
// (zero exploration along a direction); a negative eigenvalue is rejected.
inline std::vector<BehavioralInput> sample_behaviors(const Eigen::Vector2d& mean,
                                                     const Eigen::Matrix2d& cov,
                                                     int count, uint64_t seed) {
  if (count < 0) throw std::invalid_argument("sample_behaviors: negative count");
  if ((cov - cov.transpose()).lpNorm<Eigen::Infinity>() >
      1e-9 * std::max(1.0, cov.lpNorm<Eigen::Infinity>()))
    throw std::invalid_argument("sample_behaviors: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d evals = es.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, std::abs(evals(1)));
  if (evals(0) < -tol)
    throw std::invalid_argument("sample_behaviors: covariance not PSD");
  const Eigen::Matrix2d transform =
      es.eigenvectors() * evals.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<BehavioralInput> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z0 = normal(rng);
    const double z1 = normal(rng);
    const Eigen::Vector2d d = mean + transform * Eigen::Vector2d(z0, z1);
    out.push_back({d(0), d(1)});
  }
  return out;
}

}  // namespace mmdopt
