#include "gpcausal/checks.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpcausal/distributions.hpp"
#include "gpcausal/model.hpp"
#include "gpcausal/rng.hpp"

namespace gpcausal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Independent kernel evaluation straight from the element formula.
Eigen::MatrixXd dense_kernel(const Eigen::MatrixXd& x, double l, double eta) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (Eigen::Index p = 0; p < x.cols(); ++p) {
        const double d = (x(i, p) - x(j, p)) / l;
        d2 += d * d;
      }
      k(i, j) = eta * eta * std::exp(-0.5 * d2);
    }
  }
  return k;
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

double max_rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.rows(); ++i)
    for (Eigen::Index j = 0; j < got.cols(); ++j)
      worst = std::max(worst, rel_err(got(i, j), want(i, j)));
  return worst;
}

struct Fixture {
  Dataset data;
  ParamState state;
  HyperPriorConfig hp;
};

Fixture random_fixture(Eigen::Index n, RngStream& rng) {
  const Eigen::Index p = 1 + (rng.next_u64() % 2);
  // Re-draw until every pair of points is at least 0.5 apart so the kernels
  // stay well conditioned and the 1e-9 comparison is about algebra, not
  // round-off amplification.
  Eigen::MatrixXd x(n, p);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal() * 1.5;
    double min_dist2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        min_dist2 = std::min(min_dist2, (x.row(i) - x.row(j)).squaredNorm());
    if (min_dist2 >= 0.25) break;
  }
  Eigen::VectorXd a(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = (i % 2 == 0) ? 1.0 : 0.0;  // both arms present at every n >= 2
    y(i) = rng.normal();
  }

  Fixture f{Dataset::make(y, a, x), {}, {}};
  f.state.mu = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
  f.state.delta = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.normal(); });
  f.state.beta =
      Eigen::VectorXd::NullaryExpr(p + 1, [&](Eigen::Index) { return rng.normal(); });
  f.state.l_mu = 0.5 + rng.uniform01() * 0.7;
  f.state.eta_mu = 0.6 + rng.uniform01() * 1.4;
  f.state.l_delta = 0.5 + rng.uniform01() * 0.7;
  f.state.eta_delta = 0.6 + rng.uniform01() * 1.4;
  f.state.sigma2 = 0.5 + rng.uniform01() * 1.5;
  f.hp.sigma2_beta = 10.0 + rng.uniform01() * 90.0;
  return f;
}

}  // namespace

CheckResult check_conditionals(int n_fixtures, std::uint64_t seed, CheckMutation mutation) {
  const auto t0 = Clock::now();
  CheckResult res;
  res.name = "conditionals";
  RngStream rng(seed, 0);
  double worst = 0.0;

  for (int f = 0; f < n_fixtures; ++f) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    Fixture fx = random_fixture(n, rng);
    const Eigen::MatrixXd k_mu_inv =
        dense_kernel(fx.data.x, fx.state.l_mu, fx.state.eta_mu).inverse();
    const Eigen::MatrixXd k_delta_inv =
        dense_kernel(fx.data.x, fx.state.l_delta, fx.state.eta_delta).inverse();
    const Eigen::MatrixXd& xd = fx.data.design;
    const Eigen::Index pp = xd.cols();

    // beta | mu: [X' Kmu^-1 X + (s2b I)^-1]^-1 X' Kmu^-1 mu, same bracket as covariance.
    {
      const Eigen::MatrixXd bracket =
          (xd.transpose() * k_mu_inv * xd +
           Eigen::MatrixXd::Identity(pp, pp) / fx.hp.sigma2_beta)
              .inverse();
      const Eigen::VectorXd want_mean = bracket * xd.transpose() * k_mu_inv * fx.state.mu;
      const ConditionalMVN got = cond_beta(fx.state, fx.data, fx.hp);
      worst = std::max(worst, max_rel_err(got.mean, want_mean));
      worst = std::max(worst, max_rel_err(got.cov_factor.reconstruct(), bracket));
    }
    // mu | beta, delta, y
    {
      const Eigen::MatrixXd bracket =
          (k_mu_inv + Eigen::MatrixXd::Identity(n, n) / fx.state.sigma2).inverse();
      const Eigen::VectorXd rhs =
          (fx.data.y - fx.state.delta.cwiseProduct(fx.data.a)) / fx.state.sigma2 +
          k_mu_inv * (xd * fx.state.beta);
      const Eigen::VectorXd want_mean = bracket * rhs;
      const ConditionalMVN got = cond_mu(fx.state, fx.data, fx.hp, OutcomeType::continuous);
      worst = std::max(worst, max_rel_err(got.mean, want_mean));
      worst = std::max(worst, max_rel_err(got.cov_factor.reconstruct(), bracket));
    }
    // delta | mu, y with the element-wise treatment algebra as a diagonal matrix
    {
      const Eigen::MatrixXd d_a = fx.data.a.asDiagonal();
      const Eigen::MatrixXd bracket =
          (k_delta_inv + d_a * d_a / fx.state.sigma2).inverse();
      const Eigen::VectorXd want_mean =
          bracket * (d_a * (fx.data.y - fx.state.mu) / fx.state.sigma2);
      ConditionalMVN got = cond_delta(fx.state, fx.data, fx.hp, OutcomeType::continuous);
      if (mutation == CheckMutation::delta_mean_sign) got.mean = -got.mean;
      worst = std::max(worst, max_rel_err(got.mean, want_mean));
      worst = std::max(worst, max_rel_err(got.cov_factor.reconstruct(), bracket));
    }
  }

  res.pass = worst <= 1e-9;
  std::ostringstream ss;
  ss << n_fixtures << " fixtures, max relative error " << worst;
  res.detail = ss.str();
  res.seconds = seconds_since(t0);
  return res;
}

CheckResult check_two_subject_grid() {
  const auto t0 = Clock::now();
  CheckResult res;
  res.name = "two-subject";
  double worst = 0.0;
  bool monotone = true;

  // 100 parameter triples x 50 distances; ranges keep the covariance
  // comparison well conditioned and the monotone increments resolvable.
  std::vector<double> sigma2s{0.5, 0.8, 1.0, 1.5, 2.5};
  std::vector<double> etas{0.5, 0.8, 1.2, 2.0, 3.0};
  std::vector<double> ls{0.5, 1.0, 1.8, 3.0};
  HyperPriorConfig hp;

  for (double s2 : sigma2s) {
    for (double eta : etas) {
      for (double l : ls) {
        double prev_var = -1.0;
        for (int di = 0; di < 50; ++di) {
          const double dist = 0.05 + (2.5 - 0.05) * di / 49.0;
          Eigen::MatrixXd x(2, 1);
          x << 0.0, dist;
          Eigen::VectorXd a(2), y(2);
          a << 1.0, 0.0;
          y << 0.0, 0.0;
          ParamState st;
          st.mu = Eigen::VectorXd::Zero(2);
          st.delta = Eigen::VectorXd::Zero(2);
          st.beta = Eigen::VectorXd::Zero(2);
          st.l_delta = l;
          st.eta_delta = eta;
          st.sigma2 = s2;
          const Dataset data = Dataset::make(y, a, x);

          // Closed form for one treated and one control subject.
          const double eta2 = eta * eta;
          const double rho = std::exp(-0.5 * (dist / l) * (dist / l));
          const double v11 = s2 * eta2 / (s2 + eta2);
          const double v12 = v11 * rho;
          const double v22 = eta2 * (1.0 - eta2 / (s2 + eta2) * rho * rho);

          const ConditionalMVN got = cond_delta(st, data, hp, OutcomeType::continuous);
          const Eigen::MatrixXd cov = got.cov_factor.reconstruct();
          worst = std::max(worst, rel_err(cov(0, 0), v11));
          worst = std::max(worst, rel_err(cov(0, 1), v12));
          worst = std::max(worst, rel_err(cov(1, 0), v12));
          worst = std::max(worst, rel_err(cov(1, 1), v22));

          if (prev_var >= 0.0 && !(cov(1, 1) > prev_var)) monotone = false;
          prev_var = cov(1, 1);
        }
      }
    }
  }

  res.pass = worst <= 1e-10 && monotone;
  std::ostringstream ss;
  ss << "max relative error " << worst << ", Var(Delta_2) strictly increasing: "
     << (monotone ? "yes" : "NO");
  res.detail = ss.str();
  res.seconds = seconds_since(t0);
  return res;
}

CheckResult check_geweke(long sweeps, CheckMutation mutation, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res;
  res.name = "geweke";
  GewekeConfig cfg;
  cfg.sweeps = sweeps;
  cfg.marginal_draws = sweeps;
  cfg.seed = seed;
  cfg.drop_q_correction = mutation == CheckMutation::drop_q_correction;
  const GewekeReport report = geweke_joint_test(cfg);
  res.pass = report.pass(4.0);
  std::ostringstream ss;
  ss << "z-scores:";
  for (const auto& p : report.params) ss << " " << p.name << "=" << p.z;
  res.detail = ss.str();
  res.seconds = seconds_since(t0);
  return res;
}

CheckResult check_tail_stability(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult res;
  res.name = "tail";
  bool ok = true;
  std::ostringstream problems;

  // TN(mean=-40, sd=1, lower=0) quantiles, 60-digit reference values.
  const struct {
    double u, want;
  } refs[] = {{0.1, 0.002632283207007428871452},
              {0.5, 0.01731412676465110613599},
              {0.9, 0.05748745803602165890599}};
  for (const auto& r : refs) {
    const double got = truncnorm_quantile(r.u, -40.0, 1.0, 0.0,
                                          std::numeric_limits<double>::infinity());
    if (rel_err(got, r.want) > 1e-9) {
      ok = false;
      problems << " quantile(u=" << r.u << ")=" << got << " want " << r.want << ";";
    }
  }

  // log survival reference values (same oracle).
  const struct {
    double x, want;
  } sf_refs[] = {{8.0, -35.0134371599145498955},
                 {12.0, -75.41067300156879593884},
                 {30.0, -454.3212439563431971074},
                 {40.0, -804.6084420137537881666}};
  for (const auto& r : sf_refs) {
    if (std::fabs(log_norm_sf(r.x) - r.want) > 1e-8 * std::fabs(r.want)) {
      ok = false;
      problems << " log_sf(" << r.x << ")=" << log_norm_sf(r.x) << " want " << r.want << ";";
    }
  }

  // Adversarial bound containment: means up to hundreds of sd outside the
  // interval and interval widths across 12 orders of magnitude.
  RngStream rng(seed, 0);
  long violations = 0;
  const long n_draws = 1000000;
  for (long i = 0; i < n_draws; ++i) {
    const double mean = (rng.uniform01() - 0.5) * 400.0;
    const double sd = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
    const double lower = (rng.uniform01() - 0.5) * 200.0;
    const double width = std::pow(10.0, -6.0 + 8.0 * rng.uniform01());
    const int kind = static_cast<int>(rng.next_u64() % 3);
    const double lo = kind == 1 ? -std::numeric_limits<double>::infinity() : lower;
    const double hi = kind == 2 ? std::numeric_limits<double>::infinity() : lower + width;
    const double x = sample_truncnorm(mean, sd, lo, hi, rng);
    if (!(x > lo && x < hi) || !std::isfinite(x)) ++violations;
  }
  if (violations > 0) {
    ok = false;
    problems << " " << violations << " out-of-bound draws;";
  }

  res.pass = ok;
  res.detail = ok ? "reference quantiles matched; 1e6 adversarial draws in bounds"
                  : problems.str();
  res.seconds = seconds_since(t0);
  return res;
}

std::vector<CheckResult> run_all_checks(CheckMutation mutation, long geweke_sweeps) {
  std::vector<CheckResult> out;
  out.push_back(check_conditionals(50, 91, mutation));
  out.push_back(check_two_subject_grid());
  out.push_back(check_tail_stability());
  out.push_back(check_geweke(geweke_sweeps, mutation));
  return out;
}

}  // namespace gpcausal
