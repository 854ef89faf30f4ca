#pragma once

#include <Eigen/Dense>

#include "gpcausal/kernels.hpp"

namespace gpcausal {

// Standard normal CDF / quantile machinery. The quantile is Wichura's AS241
// (double-precision branch); the log survival function switches to an
// asymptotic expansion in the deep tail where erfc underflows, so both stay
// usable for arguments on the order of hundreds of standard deviations.
double norm_cdf(double x);
double norm_quantile(double p);
double log_norm_sf(double x);                 // log(1 - Phi(x))
double log_norm_cdf(double x);                // log Phi(x)
double norm_quantile_from_log_sf(double ls);  // x such that log(1 - Phi(x)) = ls

// Quantile of a normal(mean, sd) truncated to (lower, upper); u in (0,1).
// Works through log survival differences so it stays finite when the mean is
// many sd outside the interval. Bounds may be +-infinity.
double truncnorm_quantile(double u, double mean, double sd, double lower, double upper);

// log(Phi(b) - Phi(a)) for standardized bounds a < b, computed without
// catastrophic cancellation in either tail.
double std_normal_log_mass(double a, double b);

// Log densities. Out-of-domain arguments return -infinity by contract.
double normal_logpdf(double x, double mean, double sd);
double gamma_logpdf(double x, double shape, double rate);
double invgamma_logpdf(double x, double shape, double scale);
double truncnorm_logpdf(double x, double mean, double sd, double lower, double upper);
double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const PDMatrix& cov);

}  // namespace gpcausal
