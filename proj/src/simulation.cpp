#include "gpcausal/simulation.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpcausal/baselines.hpp"
#include "gpcausal/distributions.hpp"
#include "gpcausal/estimands.hpp"

namespace gpcausal {

namespace {

// Standardizes continuous columns in place (binary columns stay 0/1); the
// outcomes have already been computed from the raw values.
void standardize_columns(Eigen::MatrixXd& x, const std::vector<bool>& is_binary) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (is_binary[static_cast<std::size_t>(j)]) continue;
    const double mean = x.col(j).mean();
    const double sd =
        std::sqrt((x.col(j).array() - mean).square().sum() / static_cast<double>(x.rows() - 1));
    x.col(j) = (x.col(j).array() - mean) / (sd > 0.0 ? sd : 1.0);
  }
}

// Treatment vector with both arms guaranteed; at the harness sample sizes a
// redraw is essentially never needed.
Eigen::VectorXd draw_treatment(Eigen::Index n, RngStream& rng) {
  Eigen::VectorXd a(n);
  for (;;) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
      total += a(i);
    }
    if (total > 0.0 && total < static_cast<double>(n)) return a;
  }
}

struct RawCovariates {
  Eigen::VectorXd a, x1, x2, x3;
};

RawCovariates draw_overlap_covariates(const OverlapParams& params, Eigen::Index n,
                                      RngStream& rng) {
  RawCovariates c;
  c.a = draw_treatment(n, rng);
  c.x1.resize(n);
  c.x2.resize(n);
  c.x3.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool treated = c.a(i) == 1.0;
    c.x1(i) = rng.normal(treated ? params.mu1 : 0.0, 1.0);
    c.x2(i) = rng.normal(treated ? params.mu2 : 2.0, 1.0);
    c.x3(i) = rng.bernoulli(treated ? params.p : 0.4) ? 1.0 : 0.0;
  }
  return c;
}

Eigen::MatrixXd standardized_matrix(const RawCovariates& c) {
  Eigen::MatrixXd x(c.x1.size(), 3);
  x.col(0) = c.x1;
  x.col(1) = c.x2;
  x.col(2) = c.x3;
  standardize_columns(x, {false, false, true});
  return x;
}

double y2_linear_predictor(double x1, double x2, double x3, double a, double a_coef) {
  return -3.0 - 2.5 * x1 + 2.0 * x1 * x1 * a + std::exp(1.4 - x2 * a) + x2 * x3 - 1.2 * x3 -
         2.0 * x3 * a + a_coef * a;
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) * 0.3989422804014327 / sd;
}

ReplicationRow make_row(int k, double estimate, double sd, double lo, double hi, double truth) {
  ReplicationRow r;
  r.k = k;
  r.estimate = estimate;
  r.sd = sd;
  r.ci_lo = lo;
  r.ci_hi = hi;
  r.truth = truth;
  r.covered = lo <= truth && truth <= hi;
  return r;
}

}  // namespace

const char* scenario_family_name(ScenarioFamily f) {
  switch (f) {
    case ScenarioFamily::linear_y1: return "linear-y1";
    case ScenarioFamily::nonlinear_y2: return "nonlinear-y2";
    case ScenarioFamily::nethery_c: return "nethery-c";
    case ScenarioFamily::binary_y1b: return "binary-y1b";
    case ScenarioFamily::binary_y2b: return "binary-y2b";
  }
  return "?";
}

ScenarioFamily parse_scenario_family(const std::string& name) {
  std::string s;
  for (char ch : name) s.push_back(static_cast<char>(std::tolower(ch)));
  if (s == "linear-y1") return ScenarioFamily::linear_y1;
  if (s == "nonlinear-y2") return ScenarioFamily::nonlinear_y2;
  if (s == "nethery-c") return ScenarioFamily::nethery_c;
  if (s == "binary-y1b") return ScenarioFamily::binary_y1b;
  if (s == "binary-y2b") return ScenarioFamily::binary_y2b;
  throw DataError("unknown scenario family '" + name +
                  "'; legal families: linear-y1, nonlinear-y2, nethery-c, binary-y1b, binary-y2b");
}

bool scenario_is_binary(ScenarioFamily f) {
  return f == ScenarioFamily::binary_y1b || f == ScenarioFamily::binary_y2b;
}

bool scenario_has_per_dataset_truth(ScenarioFamily f) {
  return f == ScenarioFamily::nethery_c || f == ScenarioFamily::nonlinear_y2;
}

void ScenarioSpec::validate() const {
  if (n < 10) throw DataError("scenario: n must be at least 10");
  if (replications < 1) throw DataError("scenario: replications must be positive");
  if (family == ScenarioFamily::nethery_c && !(c >= 0.0)) {
    throw DataError("scenario: nethery c must be nonnegative");
  }
  if (static_cast<std::uint64_t>(mcmc.n_chains) + 1 >= kStreamsPerReplication) {
    throw DataError("scenario: too many chains per replication");
  }
  mcmc.validate();
  hyper.validate();
}

GeneratedData gen_linear(const OverlapParams& params, Eigen::Index n, RngStream& rng) {
  const RawCovariates c = draw_overlap_covariates(params, n, rng);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = 1.0 - 2.0 * c.x1(i) + c.x2(i) - 1.2 * c.x3(i) + 2.0 * c.a(i);
    y(i) = rng.normal(mean, 1.0);
  }
  GeneratedData out{Dataset::make(std::move(y), c.a, standardized_matrix(c)), 2.0, {}};
  return out;
}

GeneratedData gen_nonlinear(const OverlapParams& params, Eigen::Index n, RngStream& rng) {
  const RawCovariates c = draw_overlap_covariates(params, n, rng);
  Eigen::VectorXd y(n);
  double truth = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = rng.normal(y2_linear_predictor(c.x1(i), c.x2(i), c.x3(i), c.a(i), 2.0), 1.0);
    truth += y2_linear_predictor(c.x1(i), c.x2(i), c.x3(i), 1.0, 2.0) -
             y2_linear_predictor(c.x1(i), c.x2(i), c.x3(i), 0.0, 2.0);
  }
  truth /= static_cast<double>(n);
  GeneratedData out{Dataset::make(std::move(y), c.a, standardized_matrix(c)), truth, {}};
  return out;
}

GeneratedData gen_nethery(double c, Eigen::Index n, RngStream& rng) {
  const Eigen::Index n_treated = n / 2;
  Eigen::VectorXd a(n), x1(n), x2(n), y0(n), y1(n);
  const double treated_sd = 1.25 + 0.1 * c;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool treated = i < n_treated;
    a(i) = treated ? 1.0 : 0.0;
    x1(i) = rng.bernoulli(treated ? 0.5 : 0.4) ? 1.0 : 0.0;
    x2(i) = treated ? rng.normal(2.0 + c, treated_sd) : rng.normal(1.0, 1.0);
    y0(i) = -1.5 * x2(i);
    y1(i) = -3.0 / (1.0 + std::exp(-10.0 * (x2(i) - 1.0))) + 0.25 * x1(i) - x1(i) * x2(i);
  }
  Eigen::VectorXd y = a.cwiseProduct(y1) + (1.0 - a.array()).matrix().cwiseProduct(y0);
  const double truth = (y1 - y0).mean();

  Eigen::VectorXd ps(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ber1 = x1(i) == 1.0 ? 0.5 : 0.5;
    const double ber0 = x1(i) == 1.0 ? 0.4 : 0.6;
    const double num = normal_pdf(x2(i), 2.0 + c, treated_sd) * ber1;
    const double den = num + normal_pdf(x2(i), 1.0, 1.0) * ber0;
    ps(i) = num / den;
  }

  Eigen::MatrixXd x(n, 2);
  x.col(0) = x1;
  x.col(1) = x2;
  standardize_columns(x, {true, false});
  GeneratedData out{Dataset::make(std::move(y), std::move(a), std::move(x)), truth, std::move(ps)};
  return out;
}

GeneratedData gen_binary(ScenarioFamily family, const OverlapParams& params, Eigen::Index n,
                         RngStream& rng) {
  if (!scenario_is_binary(family)) throw DataError("gen_binary: not a binary family");
  const RawCovariates c = draw_overlap_covariates(params, n, rng);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f =
        family == ScenarioFamily::binary_y1b
            ? -1.0 - 2.0 * c.x1(i) + c.x2(i) - 1.2 * c.x3(i) + 2.0 * c.a(i)
            : y2_linear_predictor(c.x1(i), c.x2(i), c.x3(i), c.a(i), 1.0);
    y(i) = rng.bernoulli(norm_cdf(f)) ? 1.0 : 0.0;
  }
  GeneratedData out{Dataset::make(std::move(y), c.a, standardized_matrix(c)),
                    binary_true_rd(family, params),
                    {}};
  return out;
}

double binary_true_rd_oracle(ScenarioFamily family, const OverlapParams& params, long n_draws,
                             std::uint64_t seed) {
  if (!scenario_is_binary(family)) throw DataError("true_rd_oracle: not a binary family");
  RngStream rng(seed, 0);
  double acc = 0.0;
  for (long i = 0; i < n_draws; ++i) {
    const bool treated = rng.bernoulli(0.5);
    const double x1 = rng.normal(treated ? params.mu1 : 0.0, 1.0);
    const double x2 = rng.normal(treated ? params.mu2 : 2.0, 1.0);
    const double x3 = rng.bernoulli(treated ? params.p : 0.4) ? 1.0 : 0.0;
    double f1, f0;
    if (family == ScenarioFamily::binary_y1b) {
      const double base = -1.0 - 2.0 * x1 + x2 - 1.2 * x3;
      f1 = base + 2.0;
      f0 = base;
    } else {
      f1 = y2_linear_predictor(x1, x2, x3, 1.0, 1.0);
      f0 = y2_linear_predictor(x1, x2, x3, 0.0, 1.0);
    }
    acc += norm_cdf(f1) - norm_cdf(f0);
  }
  return acc / static_cast<double>(n_draws);
}

double binary_true_rd(ScenarioFamily family, const OverlapParams& params) {
  using Key = std::tuple<int, double, double, double>;
  static std::map<Key, double> cache;
  static std::mutex mtx;
  const Key key{static_cast<int>(family), params.mu1, params.mu2, params.p};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double value = binary_true_rd_oracle(family, params, kTrueRdOracleDraws, kTrueRdOracleSeed);
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, value);
  return value;
}

MethodMetrics aggregate_metrics(const std::string& method,
                                const std::vector<ReplicationRow>& rows) {
  MethodMetrics m;
  m.method = method;
  std::vector<double> estimates;
  for (const auto& r : rows) {
    if (r.failed) {
      ++m.failures;
      continue;
    }
    estimates.push_back(r.estimate);
    m.abs_bias += std::fabs(r.estimate - r.truth);
    m.pct_bias += std::fabs((r.estimate - r.truth) / r.truth) * 100.0;
    m.mean_sd += r.sd;
    m.coverage += r.covered ? 1.0 : 0.0;
  }
  const double k = static_cast<double>(estimates.size());
  if (k == 0.0) throw NumericError("metrics: every replication failed");
  m.abs_bias /= k;
  m.pct_bias /= k;
  m.mean_sd /= k;
  m.coverage /= k;
  for (double e : estimates) m.ate += e;
  m.ate /= k;
  if (estimates.size() > 1) {
    double ss = 0.0;
    for (double e : estimates) ss += (e - m.ate) * (e - m.ate);
    m.se = std::sqrt(ss / (k - 1.0));
  }
  return m;
}

ReplicationReport run_replications(const ScenarioSpec& spec) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const OutcomeType mode =
      scenario_is_binary(spec.family) ? OutcomeType::binary : OutcomeType::continuous;
  const int k_total = spec.replications;

  ReplicationReport report;
  report.family = spec.family;
  report.gp_rows.assign(k_total, ReplicationRow{});
  report.glm_rows.assign(k_total, ReplicationRow{});
  std::vector<double> accept_acc(kNumScalarParams, 0.0);
  long jitter_total = 0;
  int failures = 0;

  // Fix the binary truth before entering the parallel region.
  if (scenario_is_binary(spec.family)) binary_true_rd(spec.family, spec.overlap);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : failures, jitter_total)
#endif
  for (int k = 0; k < k_total; ++k) {
    try {
      RngStream data_rng(spec.mcmc.seed, static_cast<std::uint64_t>(k) * kStreamsPerReplication);
      GeneratedData gen = [&]() {
        switch (spec.family) {
          case ScenarioFamily::linear_y1: return gen_linear(spec.overlap, spec.n, data_rng);
          case ScenarioFamily::nonlinear_y2: return gen_nonlinear(spec.overlap, spec.n, data_rng);
          case ScenarioFamily::nethery_c: return gen_nethery(spec.c, spec.n, data_rng);
          default: return gen_binary(spec.family, spec.overlap, spec.n, data_rng);
        }
      }();
      gen.data.validate(mode);

      const FitResult fit =
          run_chains(gen.data, spec.hyper, spec.mcmc, mode,
                     static_cast<std::uint64_t>(k) * kStreamsPerReplication + 1);
      const PosteriorSummary ps = summarize_ate(fit.draws);
      report.gp_rows[k] = make_row(k, ps.estimate, ps.sd, ps.ci_lo, ps.ci_hi, gen.truth);

      for (const auto& d : fit.chains) {
        jitter_total += d.jitter_events;
        for (int p = 0; p < kNumScalarParams; ++p) {
#ifdef _OPENMP
#pragma omp atomic
#endif
          accept_acc[p] += d.accept_rate[p] / static_cast<double>(fit.chains.size());
        }
      }

      const BaselineFit bf = mode == OutcomeType::binary ? fit_probit_baseline(gen.data)
                                                         : fit_linear_baseline(gen.data);
      if (!bf.converged) throw NumericError("baseline did not converge");
      report.glm_rows[k] = make_row(k, bf.estimate, bf.sd, bf.ci_lo, bf.ci_hi, gen.truth);
    } catch (const std::exception&) {
      report.gp_rows[k].failed = true;
      report.glm_rows[k].failed = true;
      ++failures;
    }
  }

  report.n_failed = failures;
  if (static_cast<double>(failures) > 0.02 * static_cast<double>(k_total)) {
    throw NumericError("simulation: " + std::to_string(failures) + " of " +
                       std::to_string(k_total) + " replications failed (> 2%)");
  }
  report.gp_jitter_events = jitter_total;
  const double k_ok = static_cast<double>(k_total - failures);
  for (int p = 0; p < kNumScalarParams; ++p) report.gp_accept_rate[p] = accept_acc[p] / k_ok;

  report.methods.push_back(aggregate_metrics("gp", report.gp_rows));
  report.methods.push_back(aggregate_metrics("glm", report.glm_rows));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace gpcausal
