#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace mmdopt {

// Discrete planar trajectory sampled at a fixed step. Velocities and
// accelerations are always derived by finite differences, never stored.
struct Trajectory {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double dt = 0.0;

  Trajectory() = default;
  Trajectory(Eigen::VectorXd x_in, Eigen::VectorXd y_in, double dt_in)
      : x(std::move(x_in)), y(std::move(y_in)), dt(dt_in) {
    if (x.size() != y.size())
      throw std::invalid_argument("trajectory: x/y lengths differ");
    if (x.size() < 5)
      throw std::invalid_argument("trajectory: horizon must be at least 5");
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("trajectory: dt must be positive");
    if (!x.allFinite() || !y.allFinite())
      throw std::invalid_argument("trajectory: non-finite waypoint");
  }

  Eigen::Index horizon() const { return x.size(); }
};

// Central first difference with one-sided rows at both ends.
inline Eigen::VectorXd first_derivative(const Eigen::Ref<const Eigen::VectorXd>& v,
                                        double dt) {
  const Eigen::Index h = v.size();
  Eigen::VectorXd d(h);
  d(0) = (v(1) - v(0)) / dt;
  for (Eigen::Index k = 1; k + 1 < h; ++k) d(k) = (v(k + 1) - v(k - 1)) / (2.0 * dt);
  d(h - 1) = (v(h - 1) - v(h - 2)) / dt;
  return d;
}

// Three-point second difference; the end rows reuse the adjacent stencil.
inline Eigen::VectorXd second_derivative(const Eigen::Ref<const Eigen::VectorXd>& v,
                                         double dt) {
  const Eigen::Index h = v.size();
  const double inv = 1.0 / (dt * dt);
  Eigen::VectorXd d(h);
  d(0) = (v(2) - 2.0 * v(1) + v(0)) * inv;
  for (Eigen::Index k = 1; k + 1 < h; ++k)
    d(k) = (v(k + 1) - 2.0 * v(k) + v(k - 1)) * inv;
  d(h - 1) = (v(h - 1) - 2.0 * v(h - 2) + v(h - 3)) * inv;
  return d;
}

// Dense operator forms of the same stencils, used to assemble quadratic
// objectives. Applying them matches the direct versions up to rounding.
inline Eigen::MatrixXd first_difference_matrix(Eigen::Index h, double dt) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h, h);
  m(0, 0) = -1.0 / dt;
  m(0, 1) = 1.0 / dt;
  for (Eigen::Index k = 1; k + 1 < h; ++k) {
    m(k, k - 1) = -1.0 / (2.0 * dt);
    m(k, k + 1) = 1.0 / (2.0 * dt);
  }
  m(h - 1, h - 2) = -1.0 / dt;
  m(h - 1, h - 1) = 1.0 / dt;
  return m;
}

inline Eigen::MatrixXd second_difference_matrix(Eigen::Index h, double dt) {
  const double inv = 1.0 / (dt * dt);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h, h);
  m(0, 0) = inv;
  m(0, 1) = -2.0 * inv;
  m(0, 2) = inv;
  for (Eigen::Index k = 1; k + 1 < h; ++k) {
    m(k, k - 1) = inv;
    m(k, k) = -2.0 * inv;
    m(k, k + 1) = inv;
  }
  m(h - 1, h - 3) = inv;
  m(h - 1, h - 2) = -2.0 * inv;
  m(h - 1, h - 1) = inv;
  return m;
}

// Optional pinned values for one end of one axis.
struct BoundaryValue {
  std::optional<double> position;
  std::optional<double> velocity;
  std::optional<double> acceleration;
};

struct AxisBoundary {
  BoundaryValue start;
  BoundaryValue end;
};

// Equality data for a planning problem. The start of each axis must pin
// position, velocity and acceleration; terminal entries are optional so
// generated traffic can leave its endpoint free.
struct BoundaryConditions {
  AxisBoundary x;
  AxisBoundary y;

  static BoundaryConditions initial_state(double x0, double y0, double vx0,
                                          double vy0, double ax0, double ay0) {
    BoundaryConditions b;
    b.x.start = {x0, vx0, ax0};
    b.y.start = {y0, vy0, ay0};
    return b;
  }
};

inline void validate(const BoundaryConditions& b) {
  for (const AxisBoundary* axis : {&b.x, &b.y}) {
    if (!axis->start.position || !axis->start.velocity || !axis->start.acceleration)
      throw std::invalid_argument(
          "boundary conditions: start position/velocity/acceleration required");
  }
}

// Rows of the linear operator that reads the pinned values off a length-h
// waypoint vector, paired with the pinned values themselves.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> boundary_rows(
    const AxisBoundary& axis, Eigen::Index h, double dt) {
  const double invdt = 1.0 / dt;
  const double invdt2 = invdt * invdt;
  Eigen::MatrixXd rows(6, h);
  Eigen::VectorXd vals(6);
  Eigen::Index n = 0;
  auto push = [&](std::initializer_list<std::pair<Eigen::Index, double>> stencil,
                  double value) {
    rows.row(n).setZero();
    for (auto [col, coeff] : stencil) rows(n, col) = coeff;
    vals(n) = value;
    ++n;
  };
  if (axis.start.position) push({{0, 1.0}}, *axis.start.position);
  if (axis.start.velocity) push({{0, -invdt}, {1, invdt}}, *axis.start.velocity);
  if (axis.start.acceleration)
    push({{0, invdt2}, {1, -2.0 * invdt2}, {2, invdt2}}, *axis.start.acceleration);
  if (axis.end.position) push({{h - 1, 1.0}}, *axis.end.position);
  if (axis.end.velocity)
    push({{h - 2, -invdt}, {h - 1, invdt}}, *axis.end.velocity);
  if (axis.end.acceleration)
    push({{h - 3, invdt2}, {h - 2, -2.0 * invdt2}, {h - 1, invdt2}},
         *axis.end.acceleration);
  return {rows.topRows(n), vals.head(n)};
}

}  // namespace mmdopt
