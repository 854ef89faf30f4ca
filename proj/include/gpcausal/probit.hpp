#pragma once

#include <Eigen/Dense>

#include "gpcausal/model.hpp"
#include "gpcausal/rng.hpp"

namespace gpcausal {

// One posterior draw of the causal risk difference p1 - p0.
struct RiskDifferenceDraw {
  double p1 = 0.0;
  double p0 = 0.0;
  double psi_rd = 0.0;
};

// Latent probit variables: z_i ~ N(mu_i + delta_i a_i, 1) truncated to the
// half-line whose sign matches y_i.
Eigen::VectorXd sample_latent_z(const ParamState& state, const Dataset& data, RngStream& rng);

// p1 = mean Phi(mu + delta), p0 = mean Phi(mu).
RiskDifferenceDraw risk_difference_draw(const ParamState& state, const Dataset& data);

}  // namespace gpcausal
