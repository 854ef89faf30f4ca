#include "gpcausal/estimands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpcausal/errors.hpp"

namespace gpcausal {

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile: p outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

PosteriorSummary summarize_ate(const std::vector<double>& psi_draws) {
  if (psi_draws.size() < 2) throw DataError("summarize_ate: need at least 2 draws");
  PosteriorSummary s;
  s.draws = psi_draws.size();
  const double n = static_cast<double>(s.draws);
  s.estimate = std::accumulate(psi_draws.begin(), psi_draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : psi_draws) ss += (v - s.estimate) * (v - s.estimate);
  s.sd = std::sqrt(ss / (n - 1.0));
  s.ci_lo = quantile_type7(psi_draws, 0.025);
  s.ci_hi = quantile_type7(psi_draws, 0.975);
  return s;
}

PosteriorSummary summarize_ate(const PosteriorDraws& draws) {
  return summarize_ate(draws.psi);
}

SubjectEffectSummary summarize_subjects(const PosteriorDraws& draws,
                                        const std::optional<Eigen::VectorXd>& order_key) {
  if (draws.states.empty()) throw DataError("summarize_subjects: no stored draws");
  const Eigen::Index n = draws.states.front().delta.size();
  const double j = static_cast<double>(draws.states.size());

  SubjectEffectSummary out;
  out.latent_scale = draws.mode == OutcomeType::binary;
  out.mean = Eigen::VectorXd::Zero(n);
  for (const auto& st : draws.states) out.mean += st.delta;
  out.mean /= j;
  out.sd = Eigen::VectorXd::Zero(n);
  if (draws.states.size() > 1) {
    for (const auto& st : draws.states) {
      out.sd += (st.delta - out.mean).cwiseAbs2();
    }
    out.sd = (out.sd / (j - 1.0)).cwiseSqrt();
  }

  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), Eigen::Index{0});
  if (order_key) {
    if (order_key->size() != n) throw DataError("summarize_subjects: ordering key length mismatch");
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](Eigen::Index i, Eigen::Index k) { return (*order_key)(i) < (*order_key)(k); });
  }
  return out;
}

}  // namespace gpcausal
