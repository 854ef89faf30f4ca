#include "gpcausal/kernels.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gpcausal {

namespace {

void check_kernel_inputs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                         const KernelParams& params) {
  if (!(params.length_scale > 0.0) || !(params.amplitude > 0.0)) {
    throw DataError("se_kernel: kernel parameters must be strictly positive (length_scale=" +
                    std::to_string(params.length_scale) +
                    ", amplitude=" + std::to_string(params.amplitude) + ")");
  }
  if (x.cols() != x_star.cols()) {
    throw DataError("se_kernel: covariate dimension mismatch (" + std::to_string(x.cols()) +
                    " vs " + std::to_string(x_star.cols()) + " columns)");
  }
  if (!x.allFinite() || !x_star.allFinite()) {
    throw DataError("se_kernel: non-finite covariate value");
  }
}

inline double se_entry(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star, Eigen::Index i,
                       Eigen::Index j, double inv_l, double amp2) {
  double d2 = 0.0;
  for (Eigen::Index p = 0; p < x.cols(); ++p) {
    const double d = (x(i, p) - x_star(j, p)) * inv_l;
    d2 += d * d;
  }
  return amp2 * std::exp(-0.5 * d2);
}

}  // namespace

Eigen::MatrixXd se_kernel_serial(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                                 const KernelParams& params) {
  check_kernel_inputs(x, x_star, params);
  const double inv_l = 1.0 / params.length_scale;
  const double amp2 = params.amplitude * params.amplitude;
  Eigen::MatrixXd k(x.rows(), x_star.rows());
  for (Eigen::Index j = 0; j < x_star.rows(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) k(i, j) = se_entry(x, x_star, i, j, inv_l, amp2);
  return k;
}

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                          const KernelParams& params) {
  check_kernel_inputs(x, x_star, params);
  const double inv_l = 1.0 / params.length_scale;
  const double amp2 = params.amplitude * params.amplitude;
  Eigen::MatrixXd k(x.rows(), x_star.rows());
  const Eigen::Index n = x.rows(), m = x_star.rows();
#ifdef _OPENMP
  // Fork/join overhead beats the gain below ~500x500; chain- and
  // replication-level parallelism covers the small-matrix regime.
  const bool parallel = n * m >= 250000 && !omp_in_parallel();
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) k(i, j) = se_entry(x, x_star, i, j, inv_l, amp2);
  return k;
}

double PDMatrix::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

Eigen::MatrixXd PDMatrix::reconstruct() const {
  return lower_ * lower_.transpose();
}

PDMatrix chol_factor(const Eigen::MatrixXd& m, const JitterPolicy& policy) {
  if (m.rows() != m.cols()) {
    throw DataError("chol_factor: matrix is not square");
  }
  const Eigen::Index n = m.rows();
  double diag_scale = m.diagonal().mean();
  if (!(diag_scale > 0.0)) diag_scale = 1.0;

  double jitter = 0.0;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    Eigen::MatrixXd shifted = m;
    if (jitter > 0.0) shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all()) {
      PDMatrix out;
      out.lower_ = llt.matrixL();
      out.jitter_ = jitter;
      return out;
    }
    jitter = (attempt == 0) ? policy.rel_start * diag_scale : jitter * policy.growth;
  }
  throw NotPositiveDefiniteError(
      "chol_factor: matrix not positive definite after max jitter " + std::to_string(jitter / policy.growth),
      jitter / policy.growth);
}

}  // namespace gpcausal
