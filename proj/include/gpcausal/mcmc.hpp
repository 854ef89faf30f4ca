#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpcausal/estimands.hpp"
#include "gpcausal/model.hpp"
#include "gpcausal/probit.hpp"
#include "gpcausal/rng.hpp"

namespace gpcausal {

enum class ScalarParam { l_mu, eta_mu, l_delta, eta_delta, sigma2 };
enum class BlockParam { beta, mu, delta };

constexpr int kNumScalarParams = 5;
const char* scalar_param_name(ScalarParam p);

struct McmcConfig {
  long n_burnin = 10000;
  long n_kept_iterations = 20000;
  long thin = 80;
  int n_chains = 4;
  bool adapt = true;
  double adapt_target = 0.35;
  // Acceptance band the adapted rates are expected to land in; recorded in
  // diagnostics, not used to drive adaptation.
  double accept_band_lo = 0.1;
  double accept_band_hi = 0.6;
  std::uint64_t seed = 1;
  bool conjugate_sigma2 = false;  // inverse-gamma Gibbs update instead of MH step 8

  void validate() const;
};

// Kernel factors and log-joint terms at the current state, so each
// Metropolis step only recomputes what its proposal touches. The factors
// always correspond to the state's current kernel parameters.
struct SweepCache {
  PDMatrix k_mu;
  PDMatrix k_delta;
  JointTerms terms;
  long jitter_events = 0;
  long factorization_rejects = 0;
};

SweepCache make_sweep_cache(const ParamState& state, const Dataset& data,
                            const HyperPriorConfig& hp, OutcomeType mode);

// Full four-term Metropolis-Hastings log ratio for proposing `proposal` on
// the named scalar: log_joint difference plus the lower-truncated-normal
// proposal correction log q(x; x*, tau) - log q(x*; x, tau). Returns -inf
// when the proposal's kernel cannot be factored. Everything is rebuilt from
// scratch; the sampler itself uses the cached equivalent.
double mh_log_ratio(ScalarParam which, double proposal, const ParamState& state,
                    const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                    double tau, bool q_correction = true);

struct MhResult {
  bool accepted = false;
  bool factorization_failed = false;
  double proposal = 0.0;
  double log_ratio = 0.0;
};

// Acceptance rule: non-finite ratios never accept.
bool mh_accept(double log_ratio, double u);

MhResult mh_step_scalar(ScalarParam which, ParamState& state, SweepCache& cache,
                        const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                        double tau, RngStream& rng, bool q_correction = true);

// Cache-free convenience form.
std::pair<ParamState, bool> mh_step_scalar(ScalarParam which, const ParamState& state,
                                           const Dataset& data, const HyperPriorConfig& hp,
                                           OutcomeType mode, double tau, RngStream& rng);

void gibbs_step_block(BlockParam which, ParamState& state, SweepCache& cache,
                      const Dataset& data, const HyperPriorConfig& hp, OutcomeType mode,
                      RngStream& rng);
ParamState gibbs_step_block(BlockParam which, const ParamState& state, const Dataset& data,
                            const HyperPriorConfig& hp, OutcomeType mode, RngStream& rng);

struct SweepOptions {
  ProposalScales tau;
  bool q_correction = true;
  bool conjugate_sigma2 = false;
};

struct SweepAccepts {
  bool accepted[kNumScalarParams] = {false, false, false, false, false};
  bool attempted[kNumScalarParams] = {false, false, false, false, false};
};

// One full iteration in the paper's step order: (binary: latent z first,)
// l_mu, eta_mu, beta, mu, l_delta, eta_delta, delta, sigma2. Steps consume
// the values already updated earlier in the same sweep.
SweepAccepts sweep_once(ParamState& state, SweepCache& cache, const Dataset& data,
                        const HyperPriorConfig& hp, OutcomeType mode, const SweepOptions& opts,
                        RngStream& rng);

struct ChainDiagnostics {
  int chain_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double accept_rate[kNumScalarParams] = {0, 0, 0, 0, 0};
  long jitter_events = 0;
  long factorization_rejects = 0;
  double wall_seconds = 0.0;
  ProposalScales tau_at_freeze;
  ProposalScales tau_final;
};

struct ChainResult {
  std::vector<ParamState> states;  // thinned, post-burn-in
  std::vector<double> psi;         // per kept draw; risk difference in binary mode
  std::vector<double> p1, p0;      // binary mode only
  std::vector<long> iteration;     // 1-based post-burn-in iteration index
  ChainDiagnostics diagnostics;
};

// Default initial values; binary mode draws the latent z once at startup.
ParamState initial_state(const Dataset& data, OutcomeType mode);

struct RunChainOptions {
  bool overdisperse_init = false;  // scalars multiplied by U(0.5, 2)
};

ChainResult run_chain(const Dataset& data, const HyperPriorConfig& hp, const McmcConfig& config,
                      OutcomeType mode, RngStream rng, const RunChainOptions& opts = {});

struct FitResult {
  PosteriorDraws draws;
  std::vector<ChainDiagnostics> chains;
};

// Runs config.n_chains chains on streams stream_base .. stream_base+n-1 of
// config.seed (in parallel when OpenMP is enabled), then pools kept draws in
// chain order. Chain 0 starts from the defaults, later chains from
// overdispersed initial values.
FitResult run_chains(const Dataset& data, const HyperPriorConfig& hp, const McmcConfig& config,
                     OutcomeType mode, std::uint64_t stream_base = 1);

}  // namespace gpcausal
