#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcausal/model.hpp"

namespace gpcausal {

// Pooled, thinned, post-burn-in draws across chains. psi holds the per-draw
// effect (mean of delta for continuous outcomes, the risk difference for
// binary ones, where p1/p0 are also kept).
struct PosteriorDraws {
  OutcomeType mode = OutcomeType::continuous;
  std::vector<ParamState> states;
  std::vector<double> psi;
  std::vector<double> p1;
  std::vector<double> p0;
  std::vector<int> chain;
  std::vector<long> iteration;

  std::size_t size() const { return psi.size(); }
};

struct PosteriorSummary {
  double estimate = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t draws = 0;
};

// Type-7 empirical quantile (linear interpolation of order statistics).
double quantile_type7(std::vector<double> values, double p);

PosteriorSummary summarize_ate(const std::vector<double>& psi_draws);
PosteriorSummary summarize_ate(const PosteriorDraws& draws);

// Per-subject posterior mean/sd of the individual effects. In binary mode
// the deltas live on the latent probit scale, flagged accordingly.
struct SubjectEffectSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  std::vector<Eigen::Index> order;  // subject indices, sorted by key when present
  bool latent_scale = false;
};

SubjectEffectSummary summarize_subjects(const PosteriorDraws& draws,
                                        const std::optional<Eigen::VectorXd>& order_key = {});

}  // namespace gpcausal
