#include "gpcausal/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gpcausal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
constexpr double kInvSqrt2 = 0.70710678118654752440;

// One-sided asymptotic expansion of log(1 - Phi(x)) for large positive x:
// log S(x) = -x^2/2 - log(x sqrt(2 pi)) + log(1 - 1/x^2 + 3/x^4 - ...).
double log_sf_asymptotic(double x) {
  const double x2 = x * x;
  double term = 1.0, series = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    series += term;
  }
  return -0.5 * x2 - 0.5 * kLogTwoPi - std::log(x) + std::log(series);
}

}  // namespace

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double log_norm_sf(double x) {
  if (x < 30.0) return std::log(0.5 * std::erfc(x * kInvSqrt2));
  return log_sf_asymptotic(x);
}

double log_norm_cdf(double x) {
  return log_norm_sf(-x);
}

// Wichura (1988), algorithm AS241, PPND16.
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double norm_quantile_from_log_sf(double ls) {
  if (ls >= std::log(0.5)) return norm_quantile(-std::expm1(ls));
  if (ls > -700.0) return -norm_quantile(std::exp(ls));
  // exp(ls) underflows; invert the asymptotic expansion by Newton iteration.
  double x = std::sqrt(-2.0 * (ls + 0.5 * kLogTwoPi));
  for (int it = 0; it < 8; ++it) {
    const double f = log_sf_asymptotic(x) - ls;
    const double deriv = -(x + 1.0 / x);  // d/dx log S(x) = -phi(x)/S(x) ~ -(x + 1/x)
    const double step = f / deriv;
    x -= step;
    if (std::fabs(step) < 1e-14 * x) break;
  }
  return x;
}

double std_normal_log_mass(double a, double b) {
  if (!(a < b)) throw DataError("std_normal_log_mass: requires a < b");
  if (a >= 0.0) {
    // Both bounds in the upper tail: S(a) - S(b), everything in log space.
    const double lsa = log_norm_sf(a);
    const double lsb = (b == kInf) ? -kInf : log_norm_sf(b);
    return lsa + std::log1p(-std::exp(lsb - lsa));
  }
  if (b <= 0.0) return std_normal_log_mass(-b, -a);
  // Interval straddles zero; both CDF values are O(1).
  const double mass = 1.0 - (0.5 * std::erfc(b * kInvSqrt2)) - (0.5 * std::erfc(-a * kInvSqrt2));
  return std::log(mass);
}

double truncnorm_quantile(double u, double mean, double sd, double lower, double upper) {
  if (!(sd > 0.0)) throw DataError("truncnorm_quantile: sd must be positive");
  if (!(lower < upper)) throw DataError("truncnorm_quantile: requires lower < upper");
  if (!(u > 0.0 && u < 1.0)) throw DataError("truncnorm_quantile: u must lie in (0,1)");
  const double a = (lower == -kInf) ? -kInf : (lower - mean) / sd;
  const double b = (upper == kInf) ? kInf : (upper - mean) / sd;

  double z;
  if (a >= 0.0) {
    // S(z) interpolates between S(a) and S(b) on the log scale.
    const double lsa = log_norm_sf(a);
    const double ratio = (b == kInf) ? 0.0 : std::exp(log_norm_sf(b) - lsa);
    z = norm_quantile_from_log_sf(lsa + std::log1p(-u * (1.0 - ratio)));
  } else if (b <= 0.0) {
    const double lsb = log_norm_sf(-b);
    const double ratio = (a == -kInf) ? 0.0 : std::exp(log_norm_sf(-a) - lsb);
    z = -norm_quantile_from_log_sf(lsb + std::log1p(-(1.0 - u) * (1.0 - ratio)));
  } else {
    const double pa = (a == -kInf) ? 0.0 : norm_cdf(a);
    const double pb = (b == kInf) ? 1.0 : norm_cdf(b);
    z = norm_quantile(pa + u * (pb - pa));
  }

  double x = mean + sd * z;
  // Rounding can pin x to a bound; the contract is strictly inside.
  if (x <= lower) x = std::nextafter(lower, kInf);
  if (x >= upper) x = std::nextafter(upper, -kInf);
  return x;
}

double normal_logpdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) return -kInf;
  const double z = (x - mean) / sd;
  return -0.5 * (kLogTwoPi + z * z) - std::log(sd);
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(shape > 0.0 && rate > 0.0)) throw DataError("gamma_logpdf: invalid parameters");
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double invgamma_logpdf(double x, double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw DataError("invgamma_logpdf: invalid parameters");
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double truncnorm_logpdf(double x, double mean, double sd, double lower, double upper) {
  if (!(sd > 0.0)) throw DataError("truncnorm_logpdf: sd must be positive");
  if (!(lower < upper)) throw DataError("truncnorm_logpdf: requires lower < upper");
  if (x <= lower || x >= upper) {
    // Allow closed infinite bounds: an untruncated side never excludes x.
    const bool below = (lower != -kInf) && x <= lower;
    const bool above = (upper != kInf) && x >= upper;
    if (below || above) return -kInf;
  }
  const double a = (lower == -kInf) ? -kInf : (lower - mean) / sd;
  const double b = (upper == kInf) ? kInf : (upper - mean) / sd;
  double log_mass = 0.0;
  if (a != -kInf || b != kInf) {
    if (a == -kInf) log_mass = log_norm_cdf(b);
    else if (b == kInf) log_mass = log_norm_sf(a);
    else log_mass = std_normal_log_mass(a, b);
  }
  return normal_logpdf(x, mean, sd) - log_mass;
}

double mvn_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const PDMatrix& cov) {
  if (x.size() != mean.size() || x.size() != cov.size()) {
    throw DataError("mvn_logpdf: dimension mismatch");
  }
  const Eigen::VectorXd r = x - mean;
  const double quad = r.dot(cov.solve(r));
  return -0.5 * (static_cast<double>(x.size()) * kLogTwoPi + cov.log_det() + quad);
}

}  // namespace gpcausal
