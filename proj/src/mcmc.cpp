#include "gpcausal/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpcausal/distributions.hpp"

namespace gpcausal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTauMin = 1e-4;
constexpr double kTauMax = 10.0;

double& scalar_ref(ParamState& s, ScalarParam which) {
  switch (which) {
    case ScalarParam::l_mu: return s.l_mu;
    case ScalarParam::eta_mu: return s.eta_mu;
    case ScalarParam::l_delta: return s.l_delta;
    case ScalarParam::eta_delta: return s.eta_delta;
    case ScalarParam::sigma2: return s.sigma2;
  }
  throw std::logic_error("unreachable");
}

double scalar_value(const ParamState& s, ScalarParam which) {
  return scalar_ref(const_cast<ParamState&>(s), which);
}

double& tau_ref(ProposalScales& t, ScalarParam which) {
  switch (which) {
    case ScalarParam::l_mu: return t.l_mu;
    case ScalarParam::eta_mu: return t.eta_mu;
    case ScalarParam::l_delta: return t.l_delta;
    case ScalarParam::eta_delta: return t.eta_delta;
    case ScalarParam::sigma2: return t.sigma2;
  }
  throw std::logic_error("unreachable");
}

double tau_value(const ProposalScales& t, ScalarParam which) {
  return tau_ref(const_cast<ProposalScales&>(t), which);
}

// Candidate evaluation for a scalar proposal: the new kernel factor (for
// kernel parameters) plus the full term set with the affected entries
// replaced. Unchanged entries are copied bitwise, so totals difference
// equals the fresh log_joint difference exactly.
struct Candidate {
  bool ok = false;
  bool has_factor = false;
  PDMatrix factor;
  JointTerms terms;
};

double likelihood_term(const ParamState& state, const Dataset& data, OutcomeType mode,
                       double sigma2_override) {
  constexpr double kLogTwoPi = 1.8378770664093454836;
  const double s2 = mode == OutcomeType::binary ? 1.0 : sigma2_override;
  const Eigen::VectorXd& resp = mode == OutcomeType::binary ? *state.z : data.y;
  if (mode == OutcomeType::binary) {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const bool ok = data.y(i) == 1.0 ? resp(i) > 0.0 : resp(i) <= 0.0;
      if (!ok) return -kInf;
    }
  }
  const Eigen::VectorXd resid = resp - state.mu - state.delta.cwiseProduct(data.a);
  return -0.5 * (data.n() * (kLogTwoPi + std::log(s2)) + resid.squaredNorm() / s2);
}

Candidate evaluate_candidate(ScalarParam which, double proposal, const ParamState& state,
                             const SweepCache& cache, const Dataset& data,
                             const HyperPriorConfig& hp, OutcomeType mode) {
  Candidate cand;
  cand.terms = cache.terms;
  switch (which) {
    case ScalarParam::l_mu:
    case ScalarParam::eta_mu: {
      KernelParams kp{which == ScalarParam::l_mu ? proposal : state.l_mu,
                      which == ScalarParam::eta_mu ? proposal : state.eta_mu};
      try {
        cand.factor = chol_factor(se_kernel(data.x, data.x, kp));
      } catch (const NotPositiveDefiniteError&) {
        return cand;  // auto-reject
      }
      cand.has_factor = true;
      cand.terms.gp_mu = mvn_logpdf(state.mu, data.design * state.beta, cand.factor);
      if (which == ScalarParam::l_mu)
        cand.terms.prior_l_mu = gamma_logpdf(proposal, hp.l_mu.shape, hp.l_mu.rate);
      else
        cand.terms.prior_eta_mu = gamma_logpdf(proposal, hp.eta_mu.shape, hp.eta_mu.rate);
      break;
    }
    case ScalarParam::l_delta:
    case ScalarParam::eta_delta: {
      KernelParams kp{which == ScalarParam::l_delta ? proposal : state.l_delta,
                      which == ScalarParam::eta_delta ? proposal : state.eta_delta};
      try {
        cand.factor = chol_factor(se_kernel(data.x, data.x, kp));
      } catch (const NotPositiveDefiniteError&) {
        return cand;
      }
      cand.has_factor = true;
      cand.terms.gp_delta =
          mvn_logpdf(state.delta, Eigen::VectorXd::Zero(data.n()), cand.factor);
      if (which == ScalarParam::l_delta)
        cand.terms.prior_l_delta = gamma_logpdf(proposal, hp.l_delta.shape, hp.l_delta.rate);
      else
        cand.terms.prior_eta_delta =
            gamma_logpdf(proposal, hp.eta_delta.shape, hp.eta_delta.rate);
      break;
    }
    case ScalarParam::sigma2: {
      cand.terms.likelihood = likelihood_term(state, data, mode, proposal);
      cand.terms.prior_sigma2 = invgamma_logpdf(proposal, hp.sigma2.shape, hp.sigma2.scale);
      break;
    }
  }
  cand.ok = true;
  return cand;
}

// log q(x; center, tau) for the zero-lower-truncated normal proposal.
double proposal_logq(double x, double center, double tau) {
  return normal_logpdf(x, center, tau) - log_norm_cdf(center / tau);
}

void refresh_gp_mu(SweepCache& cache, const ParamState& state, const Dataset& data) {
  cache.terms.gp_mu = mvn_logpdf(state.mu, data.design * state.beta, cache.k_mu);
}

void refresh_gp_delta(SweepCache& cache, const ParamState& state, const Dataset& data) {
  cache.terms.gp_delta =
      mvn_logpdf(state.delta, Eigen::VectorXd::Zero(data.n()), cache.k_delta);
}

void count_jitter(SweepCache& cache, const PDMatrix& f) {
  if (f.jitter() > 0.0) ++cache.jitter_events;
}

}  // namespace

const char* scalar_param_name(ScalarParam p) {
  switch (p) {
    case ScalarParam::l_mu: return "l_mu";
    case ScalarParam::eta_mu: return "eta_mu";
    case ScalarParam::l_delta: return "l_delta";
    case ScalarParam::eta_delta: return "eta_delta";
    case ScalarParam::sigma2: return "sigma2";
  }
  return "?";
}

void McmcConfig::validate() const {
  if (n_burnin < 0) throw DataError("mcmc: burn-in must be nonnegative");
  if (n_kept_iterations <= 0) throw DataError("mcmc: kept iterations must be positive");
  if (thin < 1) throw DataError("mcmc: thin must be >= 1");
  if (n_chains < 1 || n_chains > 200) throw DataError("mcmc: chains must lie in [1, 200]");
  if (!(adapt_target > 0.0 && adapt_target < 1.0) || !(accept_band_lo > 0.0) ||
      !(accept_band_hi < 1.0) || !(accept_band_lo < accept_band_hi)) {
    throw DataError("mcmc: acceptance band must satisfy 0 < lo < hi < 1");
  }
}

SweepCache make_sweep_cache(const ParamState& state, const Dataset& data,
                            const HyperPriorConfig& hp, OutcomeType mode) {
  SweepCache cache;
  cache.k_mu = factor_k_mu(state, data);
  cache.k_delta = factor_k_delta(state, data);
  count_jitter(cache, cache.k_mu);
  count_jitter(cache, cache.k_delta);
  cache.terms = log_joint_terms(state, data, hp, mode, cache.k_mu, cache.k_delta);
  return cache;
}

bool mh_accept(double log_ratio, double u) {
  if (std::isnan(log_ratio) || log_ratio == -kInf) return false;
  return std::log(u) <= log_ratio;
}

double mh_log_ratio(ScalarParam which, double proposal, const ParamState& state,
                    const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                    double tau, bool q_correction) {
  if (!(proposal > 0.0)) return -kInf;
  SweepCache cache = make_sweep_cache(state, data, hp, mode);
  const Candidate cand = evaluate_candidate(which, proposal, state, cache, data, hp, mode);
  if (!cand.ok) return -kInf;
  const double current = scalar_value(state, which);
  double lr = cand.terms.total() - cache.terms.total();
  if (q_correction) lr += proposal_logq(current, proposal, tau) - proposal_logq(proposal, current, tau);
  return lr;
}

MhResult mh_step_scalar(ScalarParam which, ParamState& state, SweepCache& cache,
                        const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                        double tau, RngStream& rng, bool q_correction) {
  MhResult res;
  const double current = scalar_value(state, which);
  res.proposal = sample_truncnorm(current, tau, 0.0, kInf, rng);

  const Candidate cand = evaluate_candidate(which, res.proposal, state, cache, data, hp, mode);
  const double u = rng.uniform01();
  if (!cand.ok) {
    res.factorization_failed = true;
    res.log_ratio = -kInf;
    ++cache.factorization_rejects;
    return res;
  }
  res.log_ratio = cand.terms.total() - cache.terms.total();
  if (q_correction) {
    res.log_ratio +=
        proposal_logq(current, res.proposal, tau) - proposal_logq(res.proposal, current, tau);
  }
  if (mh_accept(res.log_ratio, u)) {
    res.accepted = true;
    scalar_ref(state, which) = res.proposal;
    cache.terms = cand.terms;
    if (cand.has_factor) {
      count_jitter(cache, cand.factor);
      if (which == ScalarParam::l_mu || which == ScalarParam::eta_mu)
        cache.k_mu = cand.factor;
      else
        cache.k_delta = cand.factor;
    }
  }
  return res;
}

std::pair<ParamState, bool> mh_step_scalar(ScalarParam which, const ParamState& state,
                                           const Dataset& data, const HyperPriorConfig& hp,
                                           OutcomeType mode, double tau, RngStream& rng) {
  ParamState s = state;
  SweepCache cache = make_sweep_cache(s, data, hp, mode);
  const MhResult r = mh_step_scalar(which, s, cache, data, hp, mode, tau, rng);
  return {std::move(s), r.accepted};
}

void gibbs_step_block(BlockParam which, ParamState& state, SweepCache& cache,
                      const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                      RngStream& rng) {
  switch (which) {
    case BlockParam::beta: {
      const ConditionalMVN c = cond_beta(state, data, hp, cache.k_mu);
      count_jitter(cache, c.cov_factor);
      state.beta = sample_mvn(c.mean, c.cov_factor, rng);
      cache.terms.prior_beta =
          -0.5 * (state.beta.size() * (1.8378770664093454836 + std::log(hp.sigma2_beta)) +
                  state.beta.squaredNorm() / hp.sigma2_beta);
      refresh_gp_mu(cache, state, data);
      break;
    }
    case BlockParam::mu: {
      const ConditionalMVN c = cond_mu(state, data, hp, mode, cache.k_mu);
      count_jitter(cache, c.cov_factor);
      state.mu = sample_mvn(c.mean, c.cov_factor, rng);
      cache.terms.likelihood = likelihood_term(state, data, mode, state.sigma2);
      refresh_gp_mu(cache, state, data);
      break;
    }
    case BlockParam::delta: {
      const ConditionalMVN c = cond_delta(state, data, hp, mode, cache.k_delta);
      count_jitter(cache, c.cov_factor);
      state.delta = sample_mvn(c.mean, c.cov_factor, rng);
      cache.terms.likelihood = likelihood_term(state, data, mode, state.sigma2);
      refresh_gp_delta(cache, state, data);
      break;
    }
  }
}

ParamState gibbs_step_block(BlockParam which, const ParamState& state, const Dataset& data,
                            const HyperPriorConfig& hp, OutcomeType mode, RngStream& rng) {
  ParamState s = state;
  SweepCache cache = make_sweep_cache(s, data, hp, mode);
  gibbs_step_block(which, s, cache, data, hp, mode, rng);
  return s;
}

SweepAccepts sweep_once(ParamState& state, SweepCache& cache, const Dataset& data,
                        const HyperPriorConfig& hp, OutcomeType mode, const SweepOptions& opts,
                        RngStream& rng) {
  SweepAccepts acc;
  auto run_mh = [&](ScalarParam which) {
    const int idx = static_cast<int>(which);
    acc.attempted[idx] = true;
    const MhResult r = mh_step_scalar(which, state, cache, data, hp, mode,
                                      tau_value(opts.tau, which), rng, opts.q_correction);
    acc.accepted[idx] = r.accepted;
  };

  if (mode == OutcomeType::binary) {
    state.z = sample_latent_z(state, data, rng);
    cache.terms.likelihood = likelihood_term(state, data, mode, 1.0);
  }

  run_mh(ScalarParam::l_mu);                                     // 1
  run_mh(ScalarParam::eta_mu);                                   // 2
  gibbs_step_block(BlockParam::beta, state, cache, data, hp, mode, rng);   // 3
  gibbs_step_block(BlockParam::mu, state, cache, data, hp, mode, rng);     // 4
  run_mh(ScalarParam::l_delta);                                  // 5
  run_mh(ScalarParam::eta_delta);                                // 6
  gibbs_step_block(BlockParam::delta, state, cache, data, hp, mode, rng);  // 7
  if (mode == OutcomeType::continuous) {                         // 8
    if (opts.conjugate_sigma2) {
      const Eigen::VectorXd resid = data.y - state.mu - state.delta.cwiseProduct(data.a);
      const double shape = hp.sigma2.shape + 0.5 * static_cast<double>(data.n());
      const double scale = hp.sigma2.scale + 0.5 * resid.squaredNorm();
      state.sigma2 = scale / gamma_draw(shape, 1.0, rng);
      cache.terms.likelihood = likelihood_term(state, data, mode, state.sigma2);
      cache.terms.prior_sigma2 =
          invgamma_logpdf(state.sigma2, hp.sigma2.shape, hp.sigma2.scale);
    } else {
      run_mh(ScalarParam::sigma2);
    }
  }
  return acc;
}

ParamState initial_state(const Dataset& data, OutcomeType mode) {
  const Eigen::Index n = data.n();
  ParamState s;
  s.beta = Eigen::VectorXd::Zero(data.p() + 1);
  s.delta = Eigen::VectorXd::Zero(n);
  if (mode == OutcomeType::binary) {
    s.mu = Eigen::VectorXd::Zero(n);
    s.sigma2 = 1.0;
  } else {
    s.mu = Eigen::VectorXd::Constant(n, data.y.mean());
    const double var =
        (data.y.array() - data.y.mean()).square().sum() / static_cast<double>(n - 1);
    s.sigma2 = var > 0.0 ? var : 1.0;
  }
  return s;
}

ChainResult run_chain(const Dataset& data, const HyperPriorConfig& hp, const McmcConfig& config,
                      OutcomeType mode, RngStream rng, const RunChainOptions& opts) {
  data.validate(mode);
  hp.validate();
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  ParamState state = initial_state(data, mode);
  if (opts.overdisperse_init) {
    auto scale = [&rng](double& v) { v *= 0.5 + 1.5 * rng.uniform01(); };
    scale(state.l_mu);
    scale(state.eta_mu);
    scale(state.l_delta);
    scale(state.eta_delta);
    if (mode == OutcomeType::continuous) scale(state.sigma2);
  }
  if (mode == OutcomeType::binary) state.z = sample_latent_z(state, data, rng);

  SweepCache cache = make_sweep_cache(state, data, hp, mode);
  {
    const JointTerms& t = cache.terms;
    const std::pair<const char*, double> named[] = {
        {"likelihood", t.likelihood},   {"gp_mu", t.gp_mu},
        {"gp_delta", t.gp_delta},       {"prior_beta", t.prior_beta},
        {"prior_l_mu", t.prior_l_mu},   {"prior_eta_mu", t.prior_eta_mu},
        {"prior_l_delta", t.prior_l_delta}, {"prior_eta_delta", t.prior_eta_delta},
        {"prior_sigma2", t.prior_sigma2}};
    for (const auto& [name, value] : named) {
      if (!std::isfinite(value)) {
        throw NumericError(std::string("initial log_joint is non-finite: term ") + name);
      }
    }
  }

  SweepOptions sweep_opts;
  sweep_opts.tau = hp.tau;
  sweep_opts.conjugate_sigma2 = config.conjugate_sigma2;

  // Robbins-Monro adaptation of log tau toward the target rate, burn-in only.
  long accept_count[kNumScalarParams] = {0, 0, 0, 0, 0};
  long attempt_count[kNumScalarParams] = {0, 0, 0, 0, 0};
  for (long t = 0; t < config.n_burnin; ++t) {
    const SweepAccepts acc = sweep_once(state, cache, data, hp, mode, sweep_opts, rng);
    if (config.adapt) {
      const double gamma = 1.0 / std::pow(t + 1.0, 0.6);
      for (int p = 0; p < kNumScalarParams; ++p) {
        if (!acc.attempted[p]) continue;
        double& tau = tau_ref(sweep_opts.tau, static_cast<ScalarParam>(p));
        tau *= std::exp(gamma * ((acc.accepted[p] ? 1.0 : 0.0) - config.adapt_target));
        tau = std::min(kTauMax, std::max(kTauMin, tau));
      }
    }
  }

  ChainResult result;
  result.diagnostics.tau_at_freeze = sweep_opts.tau;
  const long n_draws = config.n_kept_iterations / config.thin;
  result.states.reserve(n_draws);
  result.psi.reserve(n_draws);

  for (long i = 0; i < config.n_kept_iterations; ++i) {
    const SweepAccepts acc = sweep_once(state, cache, data, hp, mode, sweep_opts, rng);
    for (int p = 0; p < kNumScalarParams; ++p) {
      if (acc.attempted[p]) {
        ++attempt_count[p];
        if (acc.accepted[p]) ++accept_count[p];
      }
    }
    if ((i + 1) % config.thin == 0) {
      result.states.push_back(state);
      result.iteration.push_back(i + 1);
      if (mode == OutcomeType::binary) {
        const RiskDifferenceDraw rd = risk_difference_draw(state, data);
        result.psi.push_back(rd.psi_rd);
        result.p1.push_back(rd.p1);
        result.p0.push_back(rd.p0);
      } else {
        result.psi.push_back(state.delta.mean());
      }
    }
  }

  result.diagnostics.tau_final = sweep_opts.tau;
  result.diagnostics.jitter_events = cache.jitter_events;
  result.diagnostics.factorization_rejects = cache.factorization_rejects;
  result.diagnostics.seed = rng.seed();
  result.diagnostics.stream = rng.stream();
  for (int p = 0; p < kNumScalarParams; ++p) {
    result.diagnostics.accept_rate[p] =
        attempt_count[p] > 0 ? static_cast<double>(accept_count[p]) / attempt_count[p] : 0.0;
  }
  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

FitResult run_chains(const Dataset& data, const HyperPriorConfig& hp, const McmcConfig& config,
                     OutcomeType mode, std::uint64_t stream_base) {
  config.validate();
  std::vector<ChainResult> chains(config.n_chains);
  std::vector<std::string> errors(config.n_chains);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (config.n_chains > 1 && !omp_in_parallel())
#endif
  for (int c = 0; c < config.n_chains; ++c) {
    try {
      RunChainOptions opts;
      opts.overdisperse_init = c > 0;
      RngStream rng(config.seed, stream_base + static_cast<std::uint64_t>(c));
      chains[c] = run_chain(data, hp, config, mode, rng, opts);
      chains[c].diagnostics.chain_index = c;
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }
  for (int c = 0; c < config.n_chains; ++c) {
    if (!errors[c].empty()) {
      throw NumericError("chain " + std::to_string(c) + " aborted: " + errors[c]);
    }
  }

  FitResult fit;
  fit.draws.mode = mode;
  for (int c = 0; c < config.n_chains; ++c) {
    ChainResult& cr = chains[c];
    fit.chains.push_back(cr.diagnostics);
    for (std::size_t i = 0; i < cr.psi.size(); ++i) {
      fit.draws.states.push_back(std::move(cr.states[i]));
      fit.draws.psi.push_back(cr.psi[i]);
      fit.draws.chain.push_back(c);
      fit.draws.iteration.push_back(cr.iteration[i]);
      if (mode == OutcomeType::binary) {
        fit.draws.p1.push_back(cr.p1[i]);
        fit.draws.p0.push_back(cr.p0[i]);
      }
    }
  }
  return fit;
}

}  // namespace gpcausal
