#pragma once

#include <optional>

#include <Eigen/Dense>

#include "gpcausal/kernels.hpp"

namespace gpcausal {

enum class OutcomeType { continuous, binary };

// Observed (y, a, X) triple. Continuous covariate columns are expected to be
// standardized (mean 0, sd 1) and binary columns coded 0/1 before entering
// the kernel; ingestion and the simulation generators take care of that.
// `design` prepends an intercept column to X for the linear prior mean.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd a;
  Eigen::MatrixXd x;
  Eigen::MatrixXd design;

  static Dataset make(Eigen::VectorXd y, Eigen::VectorXd a, Eigen::MatrixXd x);

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return x.cols(); }

  // Throws DataError on violated invariants: n >= 2, both arms present,
  // finite entries, a in {0,1}, and y in {0,1} in binary mode.
  void validate(OutcomeType mode) const;
};

struct GammaPrior {
  double shape = 2.0;
  double rate = 1.0;
};

struct InvGammaPrior {
  double shape = 2.0;
  double scale = 1.0;
};

// Proposal standard deviations for the five Metropolis-updated scalars.
struct ProposalScales {
  double l_mu = 0.5;
  double eta_mu = 0.5;
  double l_delta = 0.5;
  double eta_delta = 0.5;
  double sigma2 = 0.5;
};

// Fixed prior constants. The paper leaves the gamma/inverse-gamma constants
// unspecified; these defaults assume standardized covariates and are all
// overridable from the CLI.
struct HyperPriorConfig {
  double sigma2_beta = 100.0;
  GammaPrior l_mu{2.0, 1.0};
  GammaPrior eta_mu{2.0, 1.0};
  GammaPrior l_delta{2.0, 1.0};
  GammaPrior eta_delta{2.0, 1.0};
  InvGammaPrior sigma2{2.0, 1.0};
  ProposalScales tau;

  void validate() const;
};

// One MCMC state. z is present only in binary mode, where sigma2 stays
// fixed at 1 and z-signs agree with y.
struct ParamState {
  Eigen::VectorXd mu;
  Eigen::VectorXd delta;
  Eigen::VectorXd beta;
  double l_mu = 1.0;
  double eta_mu = 1.0;
  double l_delta = 1.0;
  double eta_delta = 1.0;
  double sigma2 = 1.0;
  std::optional<Eigen::VectorXd> z;
};

struct ConditionalMVN {
  Eigen::VectorXd mean;
  PDMatrix cov_factor;
};

// Additive pieces of the unnormalized log joint posterior; kept separate so
// Metropolis steps only recompute the terms a proposal touches.
struct JointTerms {
  double likelihood = 0.0;
  double gp_mu = 0.0;
  double gp_delta = 0.0;
  double prior_beta = 0.0;
  double prior_l_mu = 0.0;
  double prior_eta_mu = 0.0;
  double prior_l_delta = 0.0;
  double prior_eta_delta = 0.0;
  double prior_sigma2 = 0.0;

  double total() const {
    return likelihood + gp_mu + gp_delta + prior_beta + prior_l_mu + prior_eta_mu +
           prior_l_delta + prior_eta_delta + prior_sigma2;
  }
};

// K_mu / K_delta built from the state's kernel parameters.
PDMatrix factor_k_mu(const ParamState& state, const Dataset& data);
PDMatrix factor_k_delta(const ParamState& state, const Dataset& data);

// Terms may be computed against caller-supplied kernel factors (they must
// match the state's kernel parameters); the two-argument form rebuilds them.
JointTerms log_joint_terms(const ParamState& state, const Dataset& data,
                           const HyperPriorConfig& hp, OutcomeType mode, const PDMatrix& k_mu,
                           const PDMatrix& k_delta);
JointTerms log_joint_terms(const ParamState& state, const Dataset& data,
                           const HyperPriorConfig& hp, OutcomeType mode);
double log_joint(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                 OutcomeType mode);

// Closed-form full conditionals. Overloads taking kernel factors avoid
// rebuilding them inside the sampler sweep.
ConditionalMVN cond_beta(const ParamState& state, const Dataset& data,
                         const HyperPriorConfig& hp, const PDMatrix& k_mu);
ConditionalMVN cond_beta(const ParamState& state, const Dataset& data,
                         const HyperPriorConfig& hp);
ConditionalMVN cond_mu(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                       OutcomeType mode, const PDMatrix& k_mu);
ConditionalMVN cond_mu(const ParamState& state, const Dataset& data, const HyperPriorConfig& hp,
                       OutcomeType mode);
ConditionalMVN cond_delta(const ParamState& state, const Dataset& data,
                          const HyperPriorConfig& hp, OutcomeType mode, const PDMatrix& k_delta);
ConditionalMVN cond_delta(const ParamState& state, const Dataset& data,
                          const HyperPriorConfig& hp, OutcomeType mode);

}  // namespace gpcausal
