#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmdopt/errors.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// Lane, velocity and acceleration bounds. Velocity bounds act on the forward
// (x) speed; the acceleration bound applies to both axes; lane bounds to y.
struct ConstraintSpec {
  double y_min = -1.75;
  double y_max = 5.25;
  double v_min = 0.0;
  double v_max = 25.0;
  double a_max = 8.0;
};

inline void validate(const ConstraintSpec& g) {
  if (!(g.y_min < g.y_max)) throw std::invalid_argument("bounds: y_min < y_max required");
  if (!(0.0 <= g.v_min) || !(g.v_min < g.v_max))
    throw std::invalid_argument("bounds: 0 <= v_min < v_max required");
  if (!(g.a_max > 0.0)) throw std::invalid_argument("bounds: a_max must be positive");
}

// Per-constraint violation magnitudes. `equality` holds |E xi - e| entries
// (x-axis rows then y-axis rows); `inequality` holds hinged bound violations
// in blocks of six per step: lane over/under, forward speed over/under,
// |ax|, |ay| excess.
struct ResidualVector {
  Eigen::VectorXd equality;
  Eigen::VectorXd inequality;
  double norm = 0.0;
};

// Maps a trajectory to the nearest one satisfying the boundary equalities
// exactly and the bound inequalities, alternating an exact equality KKT
// projection with cyclic clamps of the derived lane/velocity/acceleration
// values. Each clamp carries a Dykstra correction term so the rounds
// converge to the distance-minimising projection rather than an arbitrary
// feasible point. A feasible input is a fixed point and is returned
// unchanged.
class TrajectoryProjector {
 public:
  static constexpr int kDefaultIters = 10;

  TrajectoryProjector(const BoundaryConditions& bounds, const ConstraintSpec& g,
                      Eigen::Index horizon, double dt)
      : g_(g), horizon_(horizon), dt_(dt) {
    validate(bounds);
    validate(g);
    if (horizon < 5) throw std::invalid_argument("projection: horizon must be at least 5");
    if (!(dt > 0.0)) throw std::invalid_argument("projection: dt must be positive");
    std::tie(ex_, evx_) = boundary_rows(bounds.x, horizon, dt);
    std::tie(ey_, evy_) = boundary_rows(bounds.y, horizon, dt);
    lltx_.compute(ex_ * ex_.transpose());
    llty_.compute(ey_ * ey_.transpose());
    if (lltx_.info() != Eigen::Success || llty_.info() != Eigen::Success)
      throw NumericalError("projection: singular equality system");
    build_slabs();
  }

  Eigen::Index horizon() const { return horizon_; }
  double dt() const { return dt_; }

  std::pair<Trajectory, ResidualVector> project(const Trajectory& traj,
                                                int iters = kDefaultIters) const {
    if (traj.horizon() != horizon_ || traj.dt != dt_)
      throw std::invalid_argument("projection: horizon/dt mismatch");
    if (iters < 1) throw std::invalid_argument("projection: iters must be >= 1");
    Trajectory out = traj;
    const auto nx = static_cast<Eigen::Index>(slabs_x_.size());
    const auto ny = static_cast<Eigen::Index>(slabs_y_.size());
    Eigen::VectorXd mu_x_up = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd mu_x_dn = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd mu_y_up = Eigen::VectorXd::Zero(ny);
    Eigen::VectorXd mu_y_dn = Eigen::VectorXd::Zero(ny);
    Eigen::VectorXd box_up = Eigen::VectorXd::Zero(horizon_);
    Eigen::VectorXd box_dn = Eigen::VectorXd::Zero(horizon_);
    for (int it = 0; it < iters; ++it) {
      const Eigen::VectorXd px = out.x;
      const Eigen::VectorXd py = out.y;
      apply_equality(out);
      sweep_slabs<false>(out.x, slabs_x_, mu_x_up);
      sweep_slabs<true>(out.x, slabs_x_, mu_x_dn);
      sweep_slabs<false>(out.y, slabs_y_, mu_y_up);
      clamp_box(out.y, box_up);
      sweep_slabs<true>(out.y, slabs_y_, mu_y_dn);
      clamp_box(out.y, box_dn);
      const double moved = (out.x - px).cwiseAbs().maxCoeff() +
                           (out.y - py).cwiseAbs().maxCoeff();
      if (moved == 0.0) break;
    }
    apply_equality(out);
    return {out, residuals(out)};
  }

  ResidualVector residuals(const Trajectory& traj) const {
    if (traj.horizon() != horizon_ || traj.dt != dt_)
      throw std::invalid_argument("projection: horizon/dt mismatch");
    ResidualVector r;
    r.equality.resize(ex_.rows() + ey_.rows());
    r.equality << (ex_ * traj.x - evx_).cwiseAbs(), (ey_ * traj.y - evy_).cwiseAbs();

    const Eigen::VectorXd vx = first_derivative(traj.x, dt_);
    const Eigen::VectorXd ax = second_derivative(traj.x, dt_);
    const Eigen::VectorXd ay = second_derivative(traj.y, dt_);
    r.inequality.resize(6 * horizon_);
    for (Eigen::Index k = 0; k < horizon_; ++k) {
      r.inequality(6 * k + 0) = std::max(0.0, traj.y(k) - g_.y_max);
      r.inequality(6 * k + 1) = std::max(0.0, g_.y_min - traj.y(k));
      r.inequality(6 * k + 2) = std::max(0.0, vx(k) - g_.v_max);
      r.inequality(6 * k + 3) = std::max(0.0, g_.v_min - vx(k));
      r.inequality(6 * k + 4) = std::max(0.0, std::abs(ax(k)) - g_.a_max);
      r.inequality(6 * k + 5) = std::max(0.0, std::abs(ay(k)) - g_.a_max);
    }
    r.norm = std::sqrt(r.equality.squaredNorm() + r.inequality.squaredNorm());
    return r;
  }

 private:
  // One banded constraint row lo <= a^T xi <= hi with at most three nonzero
  // coefficients starting at index i0.
  struct Slab {
    Eigen::Index i0;
    double c[3];
    int n;
    double lo;
    double hi;
    double inv_norm2;
  };

  // Minimum-norm correction onto E xi = e; exact zero correction for
  // already-feasible input.
  void apply_equality(Trajectory& t) const {
    t.x -= ex_.transpose() * lltx_.solve(ex_ * t.x - evx_);
    t.y -= ey_.transpose() * llty_.solve(ey_ * t.y - evy_);
  }

  static void add_slab(std::vector<Slab>& dst, Eigen::Index i0,
                       std::initializer_list<double> coef, double lo, double hi) {
    Slab s{};
    s.i0 = i0;
    s.n = 0;
    double norm2 = 0.0;
    for (double c : coef) {
      s.c[s.n++] = c;
      norm2 += c * c;
    }
    s.lo = lo;
    s.hi = hi;
    s.inv_norm2 = 1.0 / norm2;
    dst.push_back(s);
  }

  // Same stencils the residuals are measured with: central rows inside, the
  // one-sided / adjacent rows at the ends (the duplicated end rows of the
  // second difference are skipped).
  void build_slabs() {
    const Eigen::Index h = horizon_;
    const double inv1 = 1.0 / dt_;
    const double inv2 = 0.5 / dt_;
    const double invq = 1.0 / (dt_ * dt_);
    for (Eigen::Index k = 1; k + 1 < h; ++k)
      add_slab(slabs_x_, k - 1, {invq, -2.0 * invq, invq}, -g_.a_max, g_.a_max);
    add_slab(slabs_x_, 0, {-inv1, inv1}, g_.v_min, g_.v_max);
    for (Eigen::Index k = 1; k + 1 < h; ++k)
      add_slab(slabs_x_, k - 1, {-inv2, 0.0, inv2}, g_.v_min, g_.v_max);
    add_slab(slabs_x_, h - 2, {-inv1, inv1}, g_.v_min, g_.v_max);
    for (Eigen::Index k = 1; k + 1 < h; ++k)
      add_slab(slabs_y_, k - 1, {invq, -2.0 * invq, invq}, -g_.a_max, g_.a_max);
  }

  static void hit_slab(Eigen::VectorXd& xi, const Slab& s, double& mu) {
    double t = 0.0;
    for (int j = 0; j < s.n; ++j) t += s.c[j] * xi(s.i0 + j);
    const double q = t + mu;
    const double c = std::clamp(q, s.lo, s.hi);
    const double shift = (c - t) * s.inv_norm2;
    for (int j = 0; j < s.n; ++j) xi(s.i0 + j) += shift * s.c[j];
    mu = q - c;
  }

  template <bool Reverse>
  static void sweep_slabs(Eigen::VectorXd& xi, const std::vector<Slab>& slabs,
                          Eigen::VectorXd& mu) {
    const auto n = static_cast<Eigen::Index>(slabs.size());
    if constexpr (Reverse) {
      for (Eigen::Index i = n; i-- > 0;) hit_slab(xi, slabs[static_cast<std::size_t>(i)], mu(i));
    } else {
      for (Eigen::Index i = 0; i < n; ++i) hit_slab(xi, slabs[static_cast<std::size_t>(i)], mu(i));
    }
  }

  void clamp_box(Eigen::VectorXd& y, Eigen::VectorXd& mem) const {
    for (Eigen::Index k = 0; k < horizon_; ++k) {
      const double q = y(k) + mem(k);
      const double c = std::clamp(q, g_.y_min, g_.y_max);
      mem(k) = q - c;
      y(k) = c;
    }
  }

  ConstraintSpec g_;
  Eigen::Index horizon_;
  double dt_;
  Eigen::MatrixXd ex_, ey_;
  Eigen::VectorXd evx_, evy_;
  Eigen::LLT<Eigen::MatrixXd> lltx_, llty_;
  std::vector<Slab> slabs_x_;
  std::vector<Slab> slabs_y_;
};

inline std::pair<Trajectory, ResidualVector> project(
    const Trajectory& traj, const BoundaryConditions& bounds, const ConstraintSpec& g,
    int iters = TrajectoryProjector::kDefaultIters) {
  return TrajectoryProjector(bounds, g, traj.horizon(), traj.dt).project(traj, iters);
}

inline ResidualVector residuals(const Trajectory& traj, const BoundaryConditions& bounds,
                                const ConstraintSpec& g) {
  return TrajectoryProjector(bounds, g, traj.horizon(), traj.dt).residuals(traj);
}

}  // namespace mmdopt
