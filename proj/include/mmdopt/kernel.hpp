#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mmdopt {

// Gaussian kernel k(z, z') = exp(-||z - z'||^2 / (2 h^2)).
struct KernelSpec {
  double bandwidth = 30.0;
};

inline void validate(const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth))
    throw std::invalid_argument("kernel bandwidth must be positive and finite");
}

using WeightVector = Eigen::VectorXd;

// Symmetric kernel matrix over one sample set; source_dim records the
// dimension of the vectors the entries were computed from.
struct GramMatrix {
  Eigen::MatrixXd entries;
  Eigen::Index source_dim = 0;

  Eigen::Index size() const { return entries.rows(); }
};

inline double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& z,
                          const Eigen::Ref<const Eigen::VectorXd>& z_prime,
                          const KernelSpec& spec) {
  validate(spec);
  if (z.size() != z_prime.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  const double d2 = (z - z_prime).squaredNorm();
  return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
}

// Scalar convenience overload used by the per-timestep constraint embedding.
inline double kernel_eval(double v, double v_prime, const KernelSpec& spec) {
  const double d = v - v_prime;
  return std::exp(-d * d / (2.0 * spec.bandwidth * spec.bandwidth));
}

// Kernel matrix of one set: rows of `samples` are the vectors. Built from the
// lower triangle so symmetry and a unit diagonal hold exactly.
inline GramMatrix gram(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const KernelSpec& spec) {
  validate(spec);
  const Eigen::Index n = samples.rows();
  const double inv2h2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  GramMatrix g;
  g.source_dim = samples.cols();
  g.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.entries(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d2 = (samples.row(i) - samples.row(j)).squaredNorm();
      const double k = std::exp(-d2 * inv2h2);
      g.entries(i, j) = k;
      g.entries(j, i) = k;
    }
  }
  return g;
}

// Rectangular kernel block between two sets (rows are vectors).
inline Eigen::MatrixXd gram_cross(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b,
                                  const KernelSpec& spec) {
  validate(spec);
  if (a.cols() != b.cols())
    throw std::invalid_argument("gram_cross: dimension mismatch");
  const double inv2h2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv2h2);
  return k;
}

// Squared MMD between two weighted empirical sample sets evaluated through
// kernel blocks:
//
//   || sum_i wa_i phi(a_i) - sum_j wb_j phi(b_j) ||^2
//     = wa' Kaa wa - 2 wa' Kab wb + wb' Kbb wb
//
// clamped at zero against roundoff.
inline double mmd_weighted(const GramMatrix& k_aa,
                           const Eigen::Ref<const Eigen::MatrixXd>& k_ab,
                           const GramMatrix& k_bb, const WeightVector& w_a,
                           const WeightVector& w_b) {
  if (k_aa.size() != w_a.size() || k_bb.size() != w_b.size() ||
      k_ab.rows() != w_a.size() || k_ab.cols() != w_b.size())
    throw std::invalid_argument("mmd_weighted: block shapes disagree");
  const double val = w_a.dot(k_aa.entries * w_a) - 2.0 * w_a.dot(k_ab * w_b) +
                     w_b.dot(k_bb.entries * w_b);
  return std::max(0.0, val);
}

// Same-set form: both embeddings weight the rows of one Gram matrix.
inline double mmd_weighted(const GramMatrix& k, const WeightVector& w_a,
                           const WeightVector& w_b) {
  if (k.size() != w_a.size() || k.size() != w_b.size())
    throw std::invalid_argument("mmd_weighted: weight sizes disagree");
  const WeightVector d = w_a - w_b;
  return std::max(0.0, d.dot(k.entries * d));
}

// Per-bandwidth Gram cache. Sample sets hand out references into this so the
// n x n matrix is built once per bandwidth and reused.
class GramCache {
 public:
  std::shared_ptr<const GramMatrix> get(
      const Eigen::Ref<const Eigen::MatrixXd>& samples,
      const KernelSpec& spec) {
    validate(spec);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = by_bandwidth_.find(spec.bandwidth);
    if (it != by_bandwidth_.end()) return it->second;
    auto g = std::make_shared<GramMatrix>(gram(samples, spec));
    by_bandwidth_.emplace(spec.bandwidth, g);
    return g;
  }

 private:
  std::mutex mutex_;
  std::map<double, std::shared_ptr<const GramMatrix>> by_bandwidth_;
};

}  // namespace mmdopt
