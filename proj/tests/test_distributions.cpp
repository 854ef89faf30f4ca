#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "gpcausal/distributions.hpp"

using namespace gpcausal;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Adaptive Simpson quadrature, used as the independent normalization oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
               double fm, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
         simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(b), f(m), 1e-10, 28);
}

}  // namespace

TEST_SUITE_BEGIN("distributions");

TEST_CASE("gamma logpdf at the unit exponential point") {
  CHECK(gamma_logpdf(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(gamma_logpdf(0.0, 2.0, 1.0) == -kInf);
  CHECK(gamma_logpdf(-3.0, 2.0, 1.0) == -kInf);
}

TEST_CASE("untruncated truncnorm equals the plain normal") {
  for (double x : {-3.0, -0.5, 0.0, 1.7}) {
    CHECK(truncnorm_logpdf(x, 0.4, 1.3, -kInf, kInf) ==
          doctest::Approx(normal_logpdf(x, 0.4, 1.3)).epsilon(1e-12));
  }
}

TEST_CASE("inverse gamma logpdf at its mode matches the high-precision reference") {
  CHECK(invgamma_logpdf(1.0 / 3.0, 2.0, 1.0) ==
        doctest::Approx(0.2958368660043290741857).epsilon(1e-13));
  CHECK(invgamma_logpdf(0.5, 3.5, 2.25) ==
        doctest::Approx(0.2564444669298303414076).epsilon(1e-13));
  CHECK(invgamma_logpdf(0.0, 2.0, 1.0) == -kInf);
}

TEST_CASE("out-of-domain truncnorm arguments return -inf") {
  CHECK(truncnorm_logpdf(-0.1, 1.0, 1.0, 0.0, kInf) == -kInf);
  CHECK(truncnorm_logpdf(0.0, 1.0, 1.0, 0.0, kInf) == -kInf);
  CHECK(truncnorm_logpdf(2.5, 1.0, 1.0, 0.0, 2.0) == -kInf);
}

TEST_CASE("every log density integrates to one") {
  struct Case {
    std::function<double(double)> logpdf;
    double lo, hi;
  };
  const Case cases[] = {
      {[](double x) { return normal_logpdf(x, 0.0, 1.0); }, -10.0, 10.0},
      {[](double x) { return normal_logpdf(x, -2.0, 0.3); }, -6.0, 2.0},
      {[](double x) { return gamma_logpdf(x, 2.0, 1.0); }, 1e-12, 60.0},
      {[](double x) { return gamma_logpdf(x, 0.7, 2.0); }, 1e-12, 40.0},
      {[](double x) { return gamma_logpdf(x, 4.0, 4.0); }, 1e-12, 30.0},
      {[](double x) { return invgamma_logpdf(x, 2.0, 1.0); }, 1e-6, 4000.0},
      {[](double x) { return invgamma_logpdf(x, 4.0, 1.5); }, 1e-6, 600.0},
      {[](double x) { return truncnorm_logpdf(x, 0.0, 1.0, 0.0, kInf); }, 0.0, 12.0},
      {[](double x) { return truncnorm_logpdf(x, -3.0, 0.7, 0.0, kInf); }, 0.0, 6.0},
      {[](double x) { return truncnorm_logpdf(x, 2.0, 1.5, -1.0, 4.0); }, -1.0, 4.0},
      {[](double x) { return truncnorm_logpdf(x, 40.0, 2.0, -kInf, 0.0); }, -30.0, 0.0},
  };
  for (const auto& c : cases) {
    const double mass =
        integrate([&](double x) { return std::exp(c.logpdf(x)); }, c.lo, c.hi);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("norm_quantile inverts norm_cdf") {
  for (double p : {1e-12, 1e-6, 0.025, 0.5, 0.8, 0.999999}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
}

TEST_CASE("log survival matches references across the erfc/asymptotic switch") {
  CHECK(log_norm_sf(8.0) == doctest::Approx(-35.0134371599145498955).epsilon(1e-12));
  CHECK(log_norm_sf(12.0) == doctest::Approx(-75.41067300156879593884).epsilon(1e-12));
  CHECK(log_norm_sf(30.0) == doctest::Approx(-454.3212439563431971074).epsilon(1e-12));
  CHECK(log_norm_sf(40.0) == doctest::Approx(-804.6084420137537881666).epsilon(1e-12));
  // Quantile must invert including the underflow regime.
  for (double ls : {-0.2, -5.0, -100.0, -500.0, -2000.0, -50000.0}) {
    CHECK(log_norm_sf(norm_quantile_from_log_sf(ls)) == doctest::Approx(ls).epsilon(1e-10));
  }
}

TEST_CASE("deep-tail truncated quantiles match the high-precision oracle") {
  CHECK(truncnorm_quantile(0.1, -40.0, 1.0, 0.0, kInf) ==
        doctest::Approx(0.002632283207007428871452).epsilon(1e-9));
  CHECK(truncnorm_quantile(0.5, -40.0, 1.0, 0.0, kInf) ==
        doctest::Approx(0.01731412676465110613599).epsilon(1e-9));
  CHECK(truncnorm_quantile(0.9, -40.0, 1.0, 0.0, kInf) ==
        doctest::Approx(0.05748745803602165890599).epsilon(1e-9));
}

TEST_SUITE_END();
