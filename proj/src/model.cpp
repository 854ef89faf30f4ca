#include "gpcausal/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gpcausal/distributions.hpp"

namespace gpcausal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

// Response and residual variance the Gaussian layer sees: the latent z with
// unit variance in binary mode, y with sigma2 otherwise.
const Eigen::VectorXd& gaussian_response(const ParamState& state, const Dataset& data,
                                         OutcomeType mode) {
  if (mode == OutcomeType::binary) {
    if (!state.z) throw DataError("binary mode requires a latent z vector in the state");
    return *state.z;
  }
  return data.y;
}

double residual_variance(const ParamState& state, OutcomeType mode) {
  return mode == OutcomeType::binary ? 1.0 : state.sigma2;
}

// Shared precision-to-covariance step: covariance = precision^{-1}, returned
// through its own Cholesky factor so a draw is mean + L z.
ConditionalMVN from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& rhs) {
  PDMatrix prec = chol_factor(precision);
  Eigen::MatrixXd cov =
      prec.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
  ConditionalMVN out;
  out.mean = prec.solve(rhs);
  out.cov_factor = chol_factor(0.5 * (cov + cov.transpose()));
  return out;
}

}  // namespace

Dataset Dataset::make(Eigen::VectorXd y, Eigen::VectorXd a, Eigen::MatrixXd x) {
  Dataset d;
  d.y = std::move(y);
  d.a = std::move(a);
  d.x = std::move(x);
  d.design.resize(d.x.rows(), d.x.cols() + 1);
  d.design.col(0).setOnes();
  d.design.rightCols(d.x.cols()) = d.x;
  return d;
}

void Dataset::validate(OutcomeType mode) const {
  const Eigen::Index nn = y.size();
  if (nn < 2) throw DataError("dataset: need at least 2 observations, got " + std::to_string(nn));
  if (a.size() != nn || x.rows() != nn) throw DataError("dataset: row count mismatch");
  if (!y.allFinite() || !a.allFinite() || !x.allFinite()) {
    throw DataError("dataset: non-finite entry");
  }
  double treated = 0.0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (a(i) != 0.0 && a(i) != 1.0) {
      throw DataError("dataset: treatment indicator must be 0 or 1 (row " + std::to_string(i) +
                      " has " + std::to_string(a(i)) + ")");
    }
    treated += a(i);
  }
  if (treated == 0.0 || treated == static_cast<double>(nn)) {
    throw DataError("dataset: both treatment arms must be present");
  }
  if (mode == OutcomeType::binary) {
    for (Eigen::Index i = 0; i < nn; ++i) {
      if (y(i) != 0.0 && y(i) != 1.0) {
        throw DataError("dataset: binary outcome must be 0 or 1 (row " + std::to_string(i) + ")");
      }
    }
  }
}

void HyperPriorConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw DataError(std::string("hyperprior: ") + name + " must be positive");
  };
  positive(sigma2_beta, "sigma2_beta");
  for (const auto* g : {&l_mu, &eta_mu, &l_delta, &eta_delta}) {
    positive(g->shape, "gamma shape");
    positive(g->rate, "gamma rate");
  }
  positive(sigma2.shape, "sigma2 shape");
  positive(sigma2.scale, "sigma2 scale");
  for (double t : {tau.l_mu, tau.eta_mu, tau.l_delta, tau.eta_delta, tau.sigma2}) {
    positive(t, "proposal scale");
  }
}

PDMatrix factor_k_mu(const ParamState& state, const Dataset& data) {
  return chol_factor(se_kernel(data.x, data.x, {state.l_mu, state.eta_mu}));
}

PDMatrix factor_k_delta(const ParamState& state, const Dataset& data) {
  return chol_factor(se_kernel(data.x, data.x, {state.l_delta, state.eta_delta}));
}

JointTerms log_joint_terms(const ParamState& state, const Dataset& data,
                           const HyperPriorConfig& hp, OutcomeType mode, const PDMatrix& k_mu,
                           const PDMatrix& k_delta) {
  JointTerms t;
  const Eigen::Index n = data.n();
  const double s2 = residual_variance(state, mode);
  if (!(s2 > 0.0)) {
    t.prior_sigma2 = -kInf;
    return t;
  }

  const Eigen::VectorXd& resp = gaussian_response(state, data, mode);
  if (mode == OutcomeType::binary) {
    // The augmented likelihood constrains z-signs to match y.
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool ok = data.y(i) == 1.0 ? resp(i) > 0.0 : resp(i) <= 0.0;
      if (!ok) {
        t.likelihood = -kInf;
        return t;
      }
    }
  }

  const Eigen::VectorXd resid = resp - state.mu - state.delta.cwiseProduct(data.a);
  t.likelihood =
      -0.5 * (n * (kLogTwoPi + std::log(s2)) + resid.squaredNorm() / s2);

  t.gp_mu = mvn_logpdf(state.mu, data.design * state.beta, k_mu);
  t.gp_delta = mvn_logpdf(state.delta, Eigen::VectorXd::Zero(n), k_delta);

  t.prior_beta = -0.5 * (state.beta.size() * (kLogTwoPi + std::log(hp.sigma2_beta)) +
                         state.beta.squaredNorm() / hp.sigma2_beta);
  t.prior_l_mu = gamma_logpdf(state.l_mu, hp.l_mu.shape, hp.l_mu.rate);
  t.prior_eta_mu = gamma_logpdf(state.eta_mu, hp.eta_mu.shape, hp.eta_mu.rate);
  t.prior_l_delta = gamma_logpdf(state.l_delta, hp.l_delta.shape, hp.l_delta.rate);
  t.prior_eta_delta = gamma_logpdf(state.eta_delta, hp.eta_delta.shape, hp.eta_delta.rate);
  t.prior_sigma2 = mode == OutcomeType::binary
                       ? 0.0
                       : invgamma_logpdf(state.sigma2, hp.sigma2.shape, hp.sigma2.scale);
  return t;
}

JointTerms log_joint_terms(const ParamState& state, const Dataset& data,
                           const HyperPriorConfig& hp, OutcomeType mode) {
  if (!(state.l_mu > 0.0 && state.eta_mu > 0.0 && state.l_delta > 0.0 &&
        state.eta_delta > 0.0)) {
    JointTerms t;
    t.gp_mu = -kInf;
    return t;
  }
  if (mode == OutcomeType::continuous && !(state.sigma2 > 0.0)) {
    JointTerms t;
    t.prior_sigma2 = -kInf;
    return t;
  }
  return log_joint_terms(state, data, hp, mode, factor_k_mu(state, data),
                         factor_k_delta(state, data));
}

double log_joint(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                 OutcomeType mode) {
  return log_joint_terms(state, data, hp, mode).total();
}

ConditionalMVN cond_beta(const ParamState& state, const Dataset& data,
                         const HyperPriorConfig& hp, const PDMatrix& k_mu) {
  const Eigen::MatrixXd& xd = data.design;
  const Eigen::MatrixXd kinv_x = k_mu.solve(xd);
  Eigen::MatrixXd precision = xd.transpose() * kinv_x;
  precision.diagonal().array() += 1.0 / hp.sigma2_beta;
  const Eigen::VectorXd rhs = kinv_x.transpose() * state.mu;
  return from_precision(precision, rhs);
}

ConditionalMVN cond_beta(const ParamState& state, const Dataset& data,
                         const HyperPriorConfig& hp) {
  return cond_beta(state, data, hp, factor_k_mu(state, data));
}

ConditionalMVN cond_mu(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                       OutcomeType mode, const PDMatrix& k_mu) {
  (void)hp;
  const Eigen::Index n = data.n();
  const double s2 = residual_variance(state, mode);
  const Eigen::VectorXd& resp = gaussian_response(state, data, mode);

  Eigen::MatrixXd precision =
      k_mu.solve(Eigen::MatrixXd::Identity(n, n));
  precision.diagonal().array() += 1.0 / s2;
  const Eigen::VectorXd rhs = (resp - state.delta.cwiseProduct(data.a)) / s2 +
                              k_mu.solve(Eigen::VectorXd(data.design * state.beta));
  return from_precision(precision, rhs);
}

ConditionalMVN cond_mu(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                       OutcomeType mode) {
  return cond_mu(state, data, hp, mode, factor_k_mu(state, data));
}

ConditionalMVN cond_delta(const ParamState& state, const Dataset& data,
                          const HyperPriorConfig& hp, OutcomeType mode,
                          const PDMatrix& k_delta) {
  (void)hp;
  const Eigen::Index n = data.n();
  const double s2 = residual_variance(state, mode);
  const Eigen::VectorXd& resp = gaussian_response(state, data, mode);

  // a^T (.) a element-wise algebra reduces to the diagonal indicator matrix:
  // only treated rows contribute residual precision.
  Eigen::MatrixXd precision = k_delta.solve(Eigen::MatrixXd::Identity(n, n));
  precision.diagonal() += data.a / s2;
  const Eigen::VectorXd rhs = data.a.cwiseProduct(resp - state.mu) / s2;
  return from_precision(precision, rhs);
}

ConditionalMVN cond_delta(const ParamState& state, const Dataset& data,
                          const HyperPriorConfig& hp, OutcomeType mode) {
  return cond_delta(state, data, hp, mode, factor_k_delta(state, data));
}

}  // namespace gpcausal
