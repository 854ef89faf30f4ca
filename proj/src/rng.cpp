#include "gpcausal/rng.hpp"

#include <cmath>

#include "gpcausal/distributions.hpp"
#include "gpcausal/errors.hpp"

namespace gpcausal {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL;

inline void philox_round(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t key) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxM) * x0;
  const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
  const std::uint64_t lo = static_cast<std::uint64_t>(prod);
  x0 = hi ^ key ^ x1;
  x1 = lo;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

std::array<std::uint64_t, 2> RngStream::block(std::uint64_t counter) const {
  std::uint64_t x0 = counter;
  std::uint64_t x1 = stream_;
  std::uint64_t key = seed_;
  for (int round = 0; round < 10; ++round) {
    philox_round(x0, x1, key);
    key += kPhiloxW;
  }
  return {x0, x1};
}

std::uint64_t RngStream::next_u64() {
  if (buffered_ == 0) {
    buffer_ = block(counter_++);
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double RngStream::uniform01() {
  // ((x >> 11) + 0.5) * 2^-53 lies strictly inside (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double RngStream::normal() {
  return norm_quantile(uniform01());
}

double RngStream::normal(double mean, double sd) {
  return mean + sd * normal();
}

bool RngStream::bernoulli(double p) {
  return uniform01() < p;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const PDMatrix& cov_factor,
                           RngStream& rng) {
  if (mean.size() != cov_factor.size()) {
    throw DataError("sample_mvn: dimension mismatch");
  }
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov_factor.lower().triangularView<Eigen::Lower>() * z;
}

double sample_truncnorm(double mean, double sd, double lower, double upper, RngStream& rng) {
  if (!(lower < upper)) throw DataError("sample_truncnorm: requires lower < upper");
  if (!(sd > 0.0)) throw DataError("sample_truncnorm: sd must be positive");
  return truncnorm_quantile(rng.uniform01(), mean, sd, lower, upper);
}

double gamma_draw(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0 && rate > 0.0)) throw DataError("gamma_draw: invalid parameters");
  if (shape < 1.0) {
    const double g = gamma_draw(shape + 1.0, rate, rng);
    return g * std::pow(rng.uniform01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
  }
}

double invgamma_draw(double shape, double scale, RngStream& rng) {
  return 1.0 / gamma_draw(shape, scale, rng);
}

}  // namespace gpcausal
