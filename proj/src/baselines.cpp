#include "gpcausal/baselines.hpp"

#include <cmath>

#include "gpcausal/distributions.hpp"
#include "gpcausal/errors.hpp"

namespace gpcausal {

namespace {

constexpr double kZ975 = 1.959963984540054;

// [1 | X | A] with the treatment column last.
Eigen::MatrixXd main_effects_design(const Dataset& data) {
  Eigen::MatrixXd d(data.n(), data.p() + 2);
  d.col(0).setOnes();
  d.middleCols(1, data.p()) = data.x;
  d.col(data.p() + 1) = data.a;
  return d;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014327;
}

}  // namespace

BaselineFit fit_linear_baseline(const Dataset& data) {
  const Eigen::MatrixXd d = main_effects_design(data);
  const Eigen::Index n = d.rows(), k = d.cols();
  const Eigen::MatrixXd xtx = d.transpose() * d;
  const PDMatrix f = chol_factor(xtx);
  const Eigen::VectorXd coef = f.solve(Eigen::VectorXd(d.transpose() * data.y));
  const double rss = (data.y - d * coef).squaredNorm();
  const double sigma2 = rss / static_cast<double>(n - k);
  const Eigen::MatrixXd cov = sigma2 * f.solve(Eigen::MatrixXd::Identity(k, k));

  BaselineFit out;
  out.estimate = coef(k - 1);
  out.sd = std::sqrt(cov(k - 1, k - 1));
  out.ci_lo = out.estimate - kZ975 * out.sd;
  out.ci_hi = out.estimate + kZ975 * out.sd;
  return out;
}

BaselineFit fit_probit_baseline(const Dataset& data) {
  const Eigen::MatrixXd d = main_effects_design(data);
  const Eigen::Index n = d.rows(), k = d.cols();
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);

  // Fisher scoring; linear predictors are clamped so fitted probabilities
  // stay away from 0/1 under separation.
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd eta = d * coef;
    Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::min(8.0, std::max(-8.0, eta(i)));
      const double p = norm_cdf(e);
      const double phi = normal_pdf(e);
      const double w = phi * phi / (p * (1.0 - p));
      score += d.row(i).transpose() * (phi * (data.y(i) - p) / (p * (1.0 - p)));
      info += w * d.row(i).transpose() * d.row(i);
    }
    const Eigen::VectorXd step = chol_factor(info).solve(score);
    coef += step;
    if (step.cwiseAbs().maxCoeff() < 1e-10) {
      converged = true;
      break;
    }
  }

  // Average marginal risk difference and its delta-method gradient.
  Eigen::MatrixXd d1 = d, d0 = d;
  d1.col(k - 1).setOnes();
  d0.col(k - 1).setZero();
  double rd = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e1 = d1.row(i).dot(coef);
    const double e0 = d0.row(i).dot(coef);
    rd += norm_cdf(e1) - norm_cdf(e0);
    grad += normal_pdf(e1) * d1.row(i).transpose() - normal_pdf(e0) * d0.row(i).transpose();
  }
  rd /= static_cast<double>(n);
  grad /= static_cast<double>(n);

  Eigen::VectorXd eta = d * coef;
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = std::min(8.0, std::max(-8.0, eta(i)));
    const double p = norm_cdf(e);
    const double phi = normal_pdf(e);
    info += (phi * phi / (p * (1.0 - p))) * d.row(i).transpose() * d.row(i);
  }

  BaselineFit out;
  out.converged = converged;
  out.estimate = rd;
  out.sd = std::sqrt(grad.dot(chol_factor(info).solve(grad)));
  out.ci_lo = rd - kZ975 * out.sd;
  out.ci_hi = rd + kZ975 * out.sd;
  return out;
}

}  // namespace gpcausal
