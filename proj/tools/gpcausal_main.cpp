// Command-line front end: fit (GP causal model on a CSV), simulate (scenario
// replication harness), oracle (verification suite).
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcausal/checks.hpp"
#include "gpcausal/errors.hpp"
#include "gpcausal/io.hpp"
#include "gpcausal/version.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void add_config_flags(CLI::App* cmd, gpcausal::McmcConfig& mcmc, gpcausal::HyperPriorConfig& hp) {
  cmd->add_option("--chains", mcmc.n_chains, "Number of MCMC chains");
  cmd->add_option("--burnin", mcmc.n_burnin, "Burn-in iterations per chain");
  cmd->add_option("--kept", mcmc.n_kept_iterations, "Post-burn-in iterations per chain");
  cmd->add_option("--thin", mcmc.thin, "Keep every thin-th iteration");
  cmd->add_option("--seed", mcmc.seed, "Master RNG seed");
  cmd->add_flag("--no-adapt", [&mcmc](std::int64_t) { mcmc.adapt = false; },
                "Disable burn-in proposal adaptation");
  cmd->add_flag("--conjugate-sigma2", [&mcmc](std::int64_t) { mcmc.conjugate_sigma2 = true; },
                "Update sigma2 by its conjugate inverse-gamma draw instead of MH");
  cmd->add_option("--sigma2-beta", hp.sigma2_beta, "Prior variance of the linear coefficients");
  cmd->add_option("--l-mu-prior", [&hp](const std::vector<std::string>& v) {
        hp.l_mu = {std::stod(v[0]), std::stod(v[1])}; return true; },
      "Gamma shape rate for l_mu")->expected(2);
  cmd->add_option("--eta-mu-prior", [&hp](const std::vector<std::string>& v) {
        hp.eta_mu = {std::stod(v[0]), std::stod(v[1])}; return true; },
      "Gamma shape rate for eta_mu")->expected(2);
  cmd->add_option("--l-delta-prior", [&hp](const std::vector<std::string>& v) {
        hp.l_delta = {std::stod(v[0]), std::stod(v[1])}; return true; },
      "Gamma shape rate for l_delta")->expected(2);
  cmd->add_option("--eta-delta-prior", [&hp](const std::vector<std::string>& v) {
        hp.eta_delta = {std::stod(v[0]), std::stod(v[1])}; return true; },
      "Gamma shape rate for eta_delta")->expected(2);
  cmd->add_option("--sigma2-prior", [&hp](const std::vector<std::string>& v) {
        hp.sigma2 = {std::stod(v[0]), std::stod(v[1])}; return true; },
      "Inverse-gamma shape scale for sigma2")->expected(2);
  cmd->add_option("--tau", [&hp](const std::vector<std::string>& v) {
        const double t = std::stod(v[0]);
        hp.tau = {t, t, t, t, t}; return true; },
      "Initial proposal scale for all five MH parameters")->expected(1);
}

int run_oracle(const std::string& only, const std::string& mutate, long geweke_sweeps,
               std::uint64_t seed) {
  gpcausal::CheckMutation mutation = gpcausal::CheckMutation::none;
  if (mutate == "delta-mean-sign") mutation = gpcausal::CheckMutation::delta_mean_sign;
  else if (mutate == "drop-q-correction") mutation = gpcausal::CheckMutation::drop_q_correction;
  else if (!mutate.empty() && mutate != "none") {
    std::fprintf(stderr, "unknown mutation '%s' (none, delta-mean-sign, drop-q-correction)\n",
                 mutate.c_str());
    return kExitUsage;
  }

  std::vector<gpcausal::CheckResult> results;
  if (only.empty()) {
    results = gpcausal::run_all_checks(mutation, geweke_sweeps);
  } else if (only == "conditionals") {
    results.push_back(gpcausal::check_conditionals(50, 91, mutation));
  } else if (only == "two-subject") {
    results.push_back(gpcausal::check_two_subject_grid());
  } else if (only == "tail") {
    results.push_back(gpcausal::check_tail_stability());
  } else if (only == "geweke") {
    results.push_back(gpcausal::check_geweke(geweke_sweeps, mutation, seed));
  } else {
    std::fprintf(stderr, "unknown check '%s' (conditionals, two-subject, tail, geweke)\n",
                 only.c_str());
    return kExitUsage;
  }

  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("[%s] %-14s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process treatment effect estimation under practical positivity violations"};
  app.set_version_flag("--version", gpcausal::kVersion);
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the GP model to a CSV dataset");
  gpcausal::FitRequest request;
  std::string outcome_type = "continuous";
  std::string from_manifest;
  fit->add_option("--input", request.input_path, "Input CSV path");
  fit->add_option("--outcome", request.columns.outcome, "Outcome column name");
  fit->add_option("--treatment", request.columns.treatment, "Treatment column name");
  fit->add_option("--covariates", request.columns.covariates, "Covariate column names")
      ->delimiter(',');
  fit->add_option("--outcome-type", outcome_type, "continuous|binary")
      ->check(CLI::IsMember({"continuous", "binary"}));
  fit->add_option("--out", request.output_dir, "Output directory");
  fit->add_option("--from-manifest", from_manifest,
                  "Re-run the fit recorded in a manifest (other data flags ignored)");
  add_config_flags(fit, request.mcmc, request.hyper);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a scenario replication study");
  std::string spec_path, sim_out = ".";
  simulate->add_option("--spec", spec_path, "Scenario spec file (key=value)")->required();
  simulate->add_option("--out", sim_out, "Output directory");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Run the verification suite");
  std::string only, mutate;
  long geweke_sweeps = 50000;
  std::uint64_t oracle_seed = 20240901;
  oracle->add_option("--only", only, "Run a single check (conditionals|two-subject|tail|geweke)");
  oracle->add_option("--mutate", mutate,
                     "Inject a deliberate defect (delta-mean-sign|drop-q-correction)");
  oracle->add_option("--geweke-sweeps", geweke_sweeps, "Sweeps for the geweke check");
  oracle->add_option("--seed", oracle_seed, "Seed for the geweke check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      if (!from_manifest.empty()) {
        gpcausal::FitRequest replay = gpcausal::fit_request_from_manifest(from_manifest);
        replay.output_dir = request.output_dir;
        const auto outputs = gpcausal::run_fit(replay);
        std::printf("wrote %s\n", outputs.draws_path.c_str());
        return 0;
      }
      if (request.input_path.empty() || request.columns.outcome.empty() ||
          request.columns.treatment.empty() || request.columns.covariates.empty()) {
        std::fprintf(stderr, "fit requires --input, --outcome, --treatment, --covariates\n");
        return kExitUsage;
      }
      request.mode = outcome_type == "binary" ? gpcausal::OutcomeType::binary
                                              : gpcausal::OutcomeType::continuous;
      const auto outputs = gpcausal::run_fit(request);
      std::printf("wrote %s\n", outputs.draws_path.c_str());
      return 0;
    }
    if (simulate->parsed()) {
      const auto outputs = gpcausal::run_simulate(spec_path, sim_out);
      std::printf("wrote %s\n", outputs.report_path.c_str());
      return 0;
    }
    if (oracle->parsed()) {
      return run_oracle(only, mutate, geweke_sweeps, oracle_seed);
    }
  } catch (const gpcausal::NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const gpcausal::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
