#include "gpcausal/geweke.hpp"

#include <cmath>

#include "gpcausal/distributions.hpp"

namespace gpcausal {

namespace {

struct ScalarDraws {
  std::vector<double> values[kNumScalarParams];
};

void record(ScalarDraws& d, const ParamState& s) {
  d.values[0].push_back(s.l_mu);
  d.values[1].push_back(s.eta_mu);
  d.values[2].push_back(s.l_delta);
  d.values[3].push_back(s.eta_delta);
  d.values[4].push_back(s.sigma2);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_iid(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()));
}

double se_batch_means(const std::vector<double>& v, int batches) {
  const std::size_t b = static_cast<std::size_t>(batches);
  const std::size_t len = v.size() / b;
  std::vector<double> bm(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    double s = 0.0;
    for (std::size_t i = k * len; i < (k + 1) * len; ++i) s += v[i];
    bm[k] = s / static_cast<double>(len);
  }
  return se_iid(bm);
}

// Draws the five scalars from their priors.
void draw_prior_scalars(ParamState& s, const HyperPriorConfig& hp, RngStream& rng) {
  s.l_mu = gamma_draw(hp.l_mu.shape, hp.l_mu.rate, rng);
  s.eta_mu = gamma_draw(hp.eta_mu.shape, hp.eta_mu.rate, rng);
  s.l_delta = gamma_draw(hp.l_delta.shape, hp.l_delta.rate, rng);
  s.eta_delta = gamma_draw(hp.eta_delta.shape, hp.eta_delta.rate, rng);
  s.sigma2 = invgamma_draw(hp.sigma2.shape, hp.sigma2.scale, rng);
}

}  // namespace

HyperPriorConfig GewekeConfig::geweke_default_priors() {
  HyperPriorConfig hp;
  hp.sigma2_beta = 1.0;
  hp.l_mu = GammaPrior{4.0, 4.0};
  hp.eta_mu = GammaPrior{1.2, 2.0};
  hp.l_delta = GammaPrior{4.0, 4.0};
  hp.eta_delta = GammaPrior{1.2, 2.0};
  hp.sigma2 = InvGammaPrior{4.0, 1.5};
  return hp;
}

double GewekeReport::max_abs_z() const {
  double m = 0.0;
  for (const auto& p : params) m = std::max(m, std::fabs(p.z));
  return m;
}

bool GewekeReport::pass(double z_bound) const {
  for (const auto& p : params) {
    if (!(std::fabs(p.z) < z_bound)) return false;
  }
  return true;
}

GewekeReport geweke_joint_test(const GewekeConfig& config) {
  if (config.sweeps <= 0 || config.marginal_draws <= 0) {
    throw DataError("geweke: insufficient draws");
  }
  if (config.n < 4) throw DataError("geweke: need n >= 4");
  config.hp.validate();

  RngStream rng(config.seed, 0);

  // Fixed covariates and a balanced treatment vector shared by both sides.
  Eigen::MatrixXd x(config.n, config.n_covariates);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
  Eigen::VectorXd a(config.n);
  for (Eigen::Index i = 0; i < config.n; ++i) a(i) = (i % 2 == 0) ? 1.0 : 0.0;
  Dataset data = Dataset::make(Eigen::VectorXd::Zero(config.n), a, x);

  // Marginal-conditional side: the scalars' marginal is exactly the prior.
  ScalarDraws mc;
  {
    RngStream prior_rng(config.seed, 1);
    ParamState s;
    for (long i = 0; i < config.marginal_draws; ++i) {
      draw_prior_scalars(s, config.hp, prior_rng);
      record(mc, s);
    }
  }

  // Successive-conditional side: alternate one full sweep with re-drawing
  // the outcome from the likelihood at the current state.
  ScalarDraws sc;
  {
    RngStream chain_rng(config.seed, 2);
    ParamState s;
    s.beta = Eigen::VectorXd(config.n_covariates + 1);
    draw_prior_scalars(s, config.hp, chain_rng);
    for (Eigen::Index i = 0; i < s.beta.size(); ++i)
      s.beta(i) = chain_rng.normal(0.0, std::sqrt(config.hp.sigma2_beta));
    s.mu = sample_mvn(data.design * s.beta, factor_k_mu(s, data), chain_rng);
    s.delta = sample_mvn(Eigen::VectorXd::Zero(config.n),
                         factor_k_delta(s, data), chain_rng);

    SweepOptions opts;
    opts.tau = config.tau;
    opts.q_correction = !config.drop_q_correction;

    // The first tenth is discarded as warm-up so the recorded stretch is
    // free of the initial transient.
    const long warmup = config.sweeps / 10;
    for (long t = 0; t < config.sweeps; ++t) {
      for (Eigen::Index i = 0; i < config.n; ++i) {
        data.y(i) = chain_rng.normal(s.mu(i) + s.delta(i) * a(i), std::sqrt(s.sigma2));
      }
      SweepCache cache = make_sweep_cache(s, data, config.hp, OutcomeType::continuous);
      sweep_once(s, cache, data, config.hp, OutcomeType::continuous, opts, chain_rng);
      if (t >= warmup) record(sc, s);
    }
  }

  GewekeReport report;
  for (int p = 0; p < kNumScalarParams; ++p) {
    GewekeReport::ParamZ pz;
    pz.name = scalar_param_name(static_cast<ScalarParam>(p));
    pz.mean_marginal = mean_of(mc.values[p]);
    pz.mean_successive = mean_of(sc.values[p]);
    pz.se_marginal = se_iid(mc.values[p]);
    pz.se_successive = se_batch_means(sc.values[p], config.batches);
    pz.z = (pz.mean_successive - pz.mean_marginal) /
           std::sqrt(pz.se_marginal * pz.se_marginal + pz.se_successive * pz.se_successive);
    report.params.push_back(pz);
  }
  return report;
}

}  // namespace gpcausal
