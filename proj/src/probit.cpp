#include "gpcausal/probit.hpp"

#include <limits>

#include "gpcausal/distributions.hpp"
#include "gpcausal/errors.hpp"

namespace gpcausal {

Eigen::VectorXd sample_latent_z(const ParamState& state, const Dataset& data, RngStream& rng) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = data.n();
  if (state.mu.size() != n || state.delta.size() != n) {
    throw DataError("sample_latent_z: state dimension mismatch");
  }
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double center = state.mu(i) + state.delta(i) * data.a(i);
    z(i) = data.y(i) == 1.0 ? sample_truncnorm(center, 1.0, 0.0, kInf, rng)
                            : sample_truncnorm(center, 1.0, -kInf, 0.0, rng);
  }
  return z;
}

RiskDifferenceDraw risk_difference_draw(const ParamState& state, const Dataset& data) {
  const Eigen::Index n = data.n();
  RiskDifferenceDraw out;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.p1 += norm_cdf(state.mu(i) + state.delta(i));
    out.p0 += norm_cdf(state.mu(i));
  }
  out.p1 /= static_cast<double>(n);
  out.p0 /= static_cast<double>(n);
  out.psi_rd = out.p1 - out.p0;
  return out;
}

}  // namespace gpcausal
