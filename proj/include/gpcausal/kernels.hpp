#pragma once

#include <Eigen/Dense>

#include "gpcausal/errors.hpp"

namespace gpcausal {

// Squared-exponential kernel parameters. One shared length scale across all
// covariate columns; amplitude is the output-scale standard deviation, so the
// kernel diagonal equals amplitude^2.
struct KernelParams {
  double length_scale = 1.0;
  double amplitude = 1.0;
};

// entry(i,j) = amplitude^2 * exp(-0.5 * sum_p ((x(i,p) - x_star(j,p)) / length_scale)^2)
// The parallel version partitions output columns across OpenMP threads; the
// per-entry arithmetic is identical, so results are bit-equal to the serial
// reference below.
Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                          const KernelParams& params);

// Serial reference implementation, kept for testing and benchmarking.
Eigen::MatrixXd se_kernel_serial(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_star,
                                 const KernelParams& params);

// Retry schedule for repairing numerically indefinite matrices: first attempt
// adds nothing, retry k adds rel_start * mean(diag) * growth^k.
struct JitterPolicy {
  double rel_start = 1e-10;
  double growth = 10.0;
  int max_retries = 6;
};

// A positive-definite matrix held through its lower Cholesky factor together
// with the jitter that was actually added. All solves and log-determinants go
// through the factor; no inverse is ever formed.
class PDMatrix {
 public:
  PDMatrix() = default;

  const Eigen::MatrixXd& lower() const { return lower_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return lower_.rows(); }

  // Solves (M + jitter*I) X = B by two triangular solves.
  template <typename Derived>
  typename Derived::PlainObject solve(const Eigen::MatrixBase<Derived>& b) const {
    if (b.rows() != lower_.rows()) {
      throw DataError("pd_solve: dimension mismatch");
    }
    typename Derived::PlainObject y = lower_.triangularView<Eigen::Lower>().solve(b.derived());
    lower_.triangularView<Eigen::Lower>().transpose().solveInPlace(y);
    return y;
  }

  // log det(M + jitter*I) = 2 * sum(log(diag(L)))
  double log_det() const;

  // L * L^T, i.e. M + jitter*I.
  Eigen::MatrixXd reconstruct() const;

 private:
  friend PDMatrix chol_factor(const Eigen::MatrixXd&, const JitterPolicy&);
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

// Factors a symmetric matrix, escalating jitter per the policy. Throws
// NotPositiveDefiniteError (carrying the last attempted jitter) if every
// retry fails.
PDMatrix chol_factor(const Eigen::MatrixXd& m, const JitterPolicy& policy = {});

inline Eigen::MatrixXd pd_solve(const PDMatrix& f, const Eigen::MatrixXd& b) { return f.solve(b); }
inline double pd_logdet(const PDMatrix& f) { return f.log_det(); }

}  // namespace gpcausal
