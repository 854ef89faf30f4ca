#include <doctest.h>

#include <cmath>

#include "gpcausal/kernels.hpp"
#include "gpcausal/rng.hpp"

using namespace gpcausal;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("se_kernel zero distance gives amplitude squared") {
  Eigen::MatrixXd x(1, 2);
  x << 0.3, -1.2;
  const Eigen::MatrixXd k = se_kernel(x, x, {1.5, 2.0});
  CHECK(k.rows() == 1);
  CHECK(k(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("se_kernel unit distance matches scalar evaluation") {
  Eigen::MatrixXd x(1, 1), xs(1, 1);
  x << 0.0;
  xs << 1.0;
  const Eigen::MatrixXd k = se_kernel(x, xs, {1.0, 1.0});
  CHECK(k(0, 0) == doctest::Approx(0.6065306597126334).epsilon(1e-14));
}

TEST_CASE("se_kernel decays monotonically and vanishes in the limit") {
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  double prev = 2.0;
  for (double d : {0.5, 1.0, 2.0, 4.0, 8.0, 40.0}) {
    Eigen::MatrixXd xs(1, 1);
    xs << d;
    const double v = se_kernel(x, xs, {1.0, 1.0})(0, 0);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  Eigen::MatrixXd far(1, 1);
  far << 60.0;
  CHECK(se_kernel(x, far, {1.0, 1.0})(0, 0) < 1e-300);
}

TEST_CASE("se_kernel symmetry and constant diagonal") {
  RngStream rng(5, 0);
  Eigen::MatrixXd x(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  const Eigen::MatrixXd k = se_kernel(x, x, {0.8, 1.3});
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 6; ++i) CHECK(k(i, i) == doctest::Approx(1.69).epsilon(1e-14));
}

TEST_CASE("se_kernel strictly decreases when one coordinate moves away") {
  Eigen::MatrixXd x(1, 3), xs(1, 3);
  x << 0.2, -0.4, 1.0;
  xs = x;
  double prev = 2.0;
  for (double shift : {0.1, 0.4, 0.9, 1.7}) {
    xs(0, 1) = x(0, 1) + shift;
    const double v = se_kernel(x, xs, {1.1, 1.0})(0, 0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("se_kernel input validation") {
  Eigen::MatrixXd a(2, 2), b(2, 3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(se_kernel(a, b, {1.0, 1.0}), DataError);
  Eigen::MatrixXd c = a;
  c(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(se_kernel(c, c, {1.0, 1.0}), DataError);
  CHECK_THROWS_AS(se_kernel(a, a, {-1.0, 1.0}), DataError);
  CHECK_THROWS_AS(se_kernel(a, a, {1.0, 0.0}), DataError);
}

TEST_CASE("parallel kernel is bit-identical to the serial reference") {
  RngStream rng(17, 0);
  Eigen::MatrixXd x(120, 2), xs(80, 2);
  for (int i = 0; i < 120; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
  for (int i = 0; i < 80; ++i)
    for (int j = 0; j < 2; ++j) xs(i, j) = rng.normal();
  const KernelParams p{0.7, 1.9};
  CHECK(se_kernel(x, xs, p) == se_kernel_serial(x, xs, p));
}

TEST_CASE("chol_factor of the identity needs no jitter") {
  const PDMatrix f = chol_factor(Eigen::MatrixXd::Identity(3, 3));
  CHECK(f.jitter() == 0.0);
  CHECK((f.lower() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("chol_factor repairs a rank-deficient matrix with jitter") {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  const PDMatrix f = chol_factor(ones);
  CHECK(f.jitter() > 0.0);
  Eigen::MatrixXd target = ones;
  target.diagonal().array() += f.jitter();
  CHECK((f.reconstruct() - target).cwiseAbs().maxCoeff() < 1e-12);

  // Solves are consistent with the jittered matrix, not the original.
  const Eigen::VectorXd b = Eigen::Vector2d(1.0, -1.0);
  const Eigen::VectorXd sol = f.solve(b);
  CHECK((target * sol - b).cwiseAbs().maxCoeff() < 1e-9 * sol.cwiseAbs().maxCoeff());
}

TEST_CASE("chol_factor gives up on a genuinely indefinite matrix") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(2, 2) = -50.0;
  CHECK_THROWS_AS(chol_factor(m), NotPositiveDefiniteError);
  try {
    chol_factor(m);
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.attempted_jitter > 0.0);
  }
}

TEST_CASE("solve and logdet on a scaled identity") {
  const PDMatrix f = chol_factor(2.0 * Eigen::MatrixXd::Identity(4, 4));
  const Eigen::MatrixXd inv = f.solve(Eigen::MatrixXd::Identity(4, 4));
  CHECK((inv - 0.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(f.log_det() == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(f.solve(wrong), DataError);
}

TEST_CASE("random SPD solves satisfy tight residuals") {
  RngStream rng(23, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 7);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const Eigen::MatrixXd m = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    const PDMatrix f = chol_factor(m);
    Eigen::MatrixXd b(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) b(i, j) = rng.normal();
    const Eigen::MatrixXd sol = f.solve(b);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    CHECK((m * sol - b).cwiseAbs().maxCoeff() < 1e-9 * scale);
  }
}

TEST_CASE("logdet of a diagonal matrix equals the sum of element logs") {
  Eigen::VectorXd d(5);
  d << 0.3, 1.0, 2.5, 7.0, 0.04;
  const PDMatrix f = chol_factor(Eigen::MatrixXd(d.asDiagonal()));
  CHECK(f.log_det() == doctest::Approx(d.array().log().sum()).epsilon(1e-12));
}

TEST_SUITE_END();
