#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmdopt/errors.hpp"
#include "mmdopt/kernel.hpp"
#include "mmdopt/trajectory.hpp"

namespace mmdopt {

// n sampled obstacle trajectories, each stored as one stacked row (x ‖ y) of
// length 2H. The Gram matrix over rows is built lazily and shared across
// copies, so downstream weight optimizations reuse one factorization-ready
// matrix per bandwidth.
class ObstacleSampleSet {
 public:
  ObstacleSampleSet(Eigen::MatrixXd stacked, Eigen::Index horizon, double dt)
      : stacked_(std::move(stacked)),
        horizon_(horizon),
        dt_(dt),
        cache_(std::make_shared<GramCache>()) {
    if (stacked_.rows() < 1)
      throw std::invalid_argument("sample set: at least one sample required");
    if (horizon_ < 5) throw std::invalid_argument("sample set: horizon must be at least 5");
    if (stacked_.cols() != 2 * horizon_)
      throw std::invalid_argument("sample set: stacked width must be 2*horizon");
    if (!(dt_ > 0.0)) throw std::invalid_argument("sample set: dt must be positive");
    if (!stacked_.allFinite())
      throw std::invalid_argument("sample set: non-finite sample entry");
  }

  static ObstacleSampleSet from_trajectories(const std::vector<Trajectory>& trajs) {
    if (trajs.empty())
      throw std::invalid_argument("sample set: at least one sample required");
    const Eigen::Index h = trajs.front().horizon();
    const double dt = trajs.front().dt;
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(trajs.size()), 2 * h);
    for (size_t j = 0; j < trajs.size(); ++j) {
      if (trajs[j].horizon() != h || trajs[j].dt != dt)
        throw std::invalid_argument("sample set: trajectories disagree on horizon/dt");
      stacked.row(static_cast<Eigen::Index>(j)).head(h) = trajs[j].x;
      stacked.row(static_cast<Eigen::Index>(j)).tail(h) = trajs[j].y;
    }
    return ObstacleSampleSet(std::move(stacked), h, dt);
  }

  Eigen::Index size() const { return stacked_.rows(); }
  Eigen::Index horizon() const { return horizon_; }
  double dt() const { return dt_; }
  const Eigen::MatrixXd& stacked() const { return stacked_; }

  Trajectory trajectory(Eigen::Index j) const {
    if (j < 0 || j >= size()) throw std::invalid_argument("sample set: index out of range");
    return Trajectory(stacked_.row(j).head(horizon_).transpose(),
                      stacked_.row(j).tail(horizon_).transpose(), dt_);
  }

  // The cache retains ownership, so the reference stays valid while any copy
  // of this set is alive.
  const GramMatrix& gram(const KernelSpec& spec) const {
    return *cache_->get(stacked_, spec);
  }

 private:
  Eigen::MatrixXd stacked_;
  Eigen::Index horizon_;
  double dt_;
  std::shared_ptr<GramCache> cache_;
};

// m selected samples with their (possibly refined) weights.
struct ReducedSet {
  std::vector<Eigen::Index> indices;
  Eigen::VectorXd weights;
  Eigen::Index parent_n = 0;
};

inline void validate(const ReducedSet& rs) {
  const Eigen::Index m = static_cast<Eigen::Index>(rs.indices.size());
  if (m < 1 || m > rs.parent_n)
    throw std::invalid_argument("reduced set: need 1 <= m <= n");
  if (rs.weights.size() != m)
    throw std::invalid_argument("reduced set: weight/index count mismatch");
  if (!rs.weights.allFinite())
    throw std::invalid_argument("reduced set: non-finite weight");
  std::vector<Eigen::Index> sorted = rs.indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("reduced set: duplicate index");
  if (sorted.front() < 0 || sorted.back() >= rs.parent_n)
    throw std::invalid_argument("reduced set: index out of range");
}

struct ReducedSetOptConfig {
  std::optional<double> beta;  // empty: 0.01 x mean MMD of the first batch
  int cem_batch = 500;
  int cem_elites = 50;
  int cem_iters = 50;
  uint64_t seed = 0;
  KernelSpec bandwidth;
  double init_sigma = 0.0;  // <=0: defaults to 1/m
  double variance_floor = 1e-6;
};

// Denominator guard for the magnitude-ratio term.
inline constexpr double kRatioFloor = 1e-8;

namespace detail {

// Indices ordered by decreasing |alpha|, ties broken toward the lower index
// (which therefore lands in the "top" block).
inline std::vector<Eigen::Index> magnitude_order(const Eigen::VectorXd& alpha) {
  std::vector<Eigen::Index> order(static_cast<size_t>(alpha.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    const double ai = std::abs(alpha(i));
    const double aj = std::abs(alpha(j));
    if (ai != aj) return ai > aj;
    return i < j;
  });
  return order;
}

inline double magnitude_ratio(const Eigen::VectorXd& alpha, Eigen::Index m) {
  const auto order = magnitude_order(alpha);
  double top = 0.0, bottom = 0.0;
  for (Eigen::Index r = 0; r < alpha.size(); ++r) {
    const double mag = std::abs(alpha(order[static_cast<size_t>(r)]));
    (r < m ? top : bottom) += mag;
  }
  return top / std::max(bottom, kRatioFloor);
}

}  // namespace detail

// Selection objective: MMD between the uniform embedding and the candidate
// re-weighting, minus beta times the top-m / bottom-(n-m) magnitude ratio.
// Minimizing drives mass onto m dominant samples while the mixture stays
// close to the full set.
inline double reduced_set_objective(const WeightVector& alpha, const GramMatrix& k,
                                    Eigen::Index m, double beta) {
  const Eigen::Index n = k.size();
  if (alpha.size() != n)
    throw std::invalid_argument("reduced_set_objective: weight length mismatch");
  if (m < 1 || m > n) throw std::invalid_argument("reduced_set_objective: need 1 <= m <= n");
  if (!(beta >= 0.0)) throw std::invalid_argument("reduced_set_objective: beta must be >= 0");
  const WeightVector uniform = WeightVector::Constant(n, 1.0 / static_cast<double>(n));
  return mmd_weighted(k, uniform, alpha) - beta * detail::magnitude_ratio(alpha, m);
}

// CEM minimization of reduced_set_objective over alpha. Returns the top-m
// indices of the best alpha found together with the raw alpha values at those
// indices; callers normally follow up with refine_weights.
inline ReducedSet select_reduced_set(const ObstacleSampleSet& o, Eigen::Index m,
                                     const ReducedSetOptConfig& cfg) {
  const Eigen::Index n = o.size();
  if (m < 1 || m > n) throw std::invalid_argument("select_reduced_set: need 1 <= m <= n");
  if (cfg.cem_batch < 1 || cfg.cem_elites < 1 || cfg.cem_elites > cfg.cem_batch ||
      cfg.cem_iters < 1)
    throw std::invalid_argument("select_reduced_set: bad CEM configuration");

  const GramMatrix& k = o.gram(cfg.bandwidth);
  const double uniform = 1.0 / static_cast<double>(n);
  const double sigma0 = cfg.init_sigma > 0.0 ? cfg.init_sigma
                                             : 1.0 / static_cast<double>(m);

  Eigen::VectorXd mean = Eigen::VectorXd::Constant(n, uniform);
  Eigen::VectorXd var = Eigen::VectorXd::Constant(n, sigma0 * sigma0);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double beta = cfg.beta.value_or(-1.0);
  if (cfg.beta && !(*cfg.beta >= 0.0))
    throw std::invalid_argument("select_reduced_set: beta must be >= 0");

  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_alpha = mean;

  const Eigen::Index batch = cfg.cem_batch;
  Eigen::MatrixXd cand(batch, n);
  std::vector<Eigen::Index> order(static_cast<size_t>(batch));

  for (int iter = 0; iter < cfg.cem_iters; ++iter) {
    const Eigen::VectorXd sigma = var.cwiseSqrt();
    for (Eigen::Index r = 0; r < batch; ++r)
      for (Eigen::Index j = 0; j < n; ++j)
        cand(r, j) = mean(j) + sigma(j) * normal(rng);

    const Eigen::MatrixXd centered =
        (-cand).rowwise() + Eigen::RowVectorXd::Constant(n, uniform);
    const Eigen::VectorXd mmd = ((centered * k.entries).array() * centered.array())
                                    .rowwise()
                                    .sum()
                                    .max(0.0)
                                    .matrix();
    if (beta < 0.0) beta = 0.01 * mmd.mean();

    Eigen::VectorXd obj(batch);
    for (Eigen::Index r = 0; r < batch; ++r)
      obj(r) = mmd(r) - beta * detail::magnitude_ratio(cand.row(r).transpose(), m);

    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::nth_element(order.begin(), order.begin() + cfg.cem_elites - 1, order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       if (obj(a) != obj(b)) return obj(a) < obj(b);
                       return a < b;
                     });

    mean.setZero();
    var.setZero();
    for (int e = 0; e < cfg.cem_elites; ++e) {
      const Eigen::Index r = order[static_cast<size_t>(e)];
      mean += cand.row(r).transpose();
      if (obj(r) < best_obj) {
        best_obj = obj(r);
        best_alpha = cand.row(r).transpose();
      }
    }
    mean /= static_cast<double>(cfg.cem_elites);
    for (int e = 0; e < cfg.cem_elites; ++e) {
      const Eigen::Index r = order[static_cast<size_t>(e)];
      var += (cand.row(r).transpose() - mean).cwiseAbs2();
    }
    var = (var / static_cast<double>(cfg.cem_elites)).cwiseMax(cfg.variance_floor);
  }

  const auto magnitude = detail::magnitude_order(best_alpha);
  ReducedSet rs;
  rs.indices.assign(magnitude.begin(), magnitude.begin() + m);
  rs.weights.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) rs.weights(j) = best_alpha(rs.indices[static_cast<size_t>(j)]);
  rs.parent_n = n;
  return rs;
}

// Closed-form weight refinement: minimize the embedding gap to the full set
// over weights on fixed indices,
//
//   (Kbar + ridge I) w = (1/n) Kcross 1.
inline ReducedSet refine_weights(const ObstacleSampleSet& o,
                                 const std::vector<Eigen::Index>& indices,
                                 const KernelSpec& spec, double ridge = 1e-8) {
  const Eigen::Index n = o.size();
  const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
  ReducedSet probe{indices, Eigen::VectorXd::Zero(m), n};
  validate(probe);

  const GramMatrix& k = o.gram(spec);
  Eigen::MatrixXd kbar(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      kbar(i, j) = k.entries(indices[static_cast<size_t>(i)], indices[static_cast<size_t>(j)]);
  const Eigen::VectorXd row_sums = k.entries.rowwise().sum();
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i)
    rhs(i) = row_sums(indices[static_cast<size_t>(i)]) / static_cast<double>(n);

  const double tol = 1e-6 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd w;
  for (double r : {ridge, ridge * 1e4}) {
    Eigen::MatrixXd sys = kbar;
    sys.diagonal().array() += r;
    w = Eigen::LDLT<Eigen::MatrixXd>(sys).solve(rhs);
    if (w.allFinite() && (sys * w - rhs).lpNorm<Eigen::Infinity>() <= tol)
      return ReducedSet{indices, std::move(w), n};
  }
  throw NumericalError("refine_weights: singular system beyond ridge rescue");
}

// MMD between the uniform embedding of the full set and the weighted
// embedding of a reduced set drawn from it.
inline double reduced_set_mmd(const ObstacleSampleSet& o, const ReducedSet& rs,
                              const KernelSpec& spec) {
  validate(rs);
  if (rs.parent_n != o.size())
    throw std::invalid_argument("reduced_set_mmd: parent size mismatch");
  const GramMatrix& k = o.gram(spec);
  const Eigen::Index n = o.size();
  const WeightVector uniform = WeightVector::Constant(n, 1.0 / static_cast<double>(n));
  WeightVector expanded = WeightVector::Zero(n);
  for (size_t j = 0; j < rs.indices.size(); ++j)
    expanded(rs.indices[j]) += rs.weights(static_cast<Eigen::Index>(j));
  return mmd_weighted(k, uniform, expanded);
}

}  // namespace mmdopt
