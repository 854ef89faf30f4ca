#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "gpcausal/kernels.hpp"

namespace gpcausal {

// Counter-based stream (Philox-2x64-10). A stream is fully identified by
// (seed, stream id): the key is the seed and the high counter word is the
// stream id, so distinct stream ids index disjoint counter blocks and never
// overlap. All draws reduce to integer arithmetic plus inverse-CDF
// transforms, so sequences are bit-reproducible across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform01();  // strictly inside (0,1)
  double normal();     // standard normal by inverse CDF
  double normal(double mean, double sd);
  bool bernoulli(double p);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::array<std::uint64_t, 2> block(std::uint64_t counter) const;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// mean + L z with z iid standard normal and L the factor's lower triangle.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const PDMatrix& cov_factor,
                           RngStream& rng);

// Inverse-CDF draw from normal(mean, sd) truncated to (lower, upper); stable
// for means far outside the interval. Bounds may be +-infinity.
double sample_truncnorm(double mean, double sd, double lower, double upper, RngStream& rng);

// Marsaglia-Tsang gamma draw, shape-rate parameterization.
double gamma_draw(double shape, double rate, RngStream& rng);

// If X ~ gamma(shape, rate=scale) then 1/X ~ inv-gamma(shape, scale).
double invgamma_draw(double shape, double scale, RngStream& rng);

}  // namespace gpcausal
