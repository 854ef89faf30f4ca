#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpcausal/geweke.hpp"

namespace gpcausal {

// On-demand verification suite behind the `oracle` CLI subcommand. Each
// check re-derives expected values through an independent route (dense
// inversion, closed forms, high-precision constants) and never reuses the
// factored solve path it is checking.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Deliberate defects injectable into the checks; used to demonstrate that
// the suite actually detects them.
enum class CheckMutation { none, delta_mean_sign, drop_q_correction };

// Dense-inverse comparison of cond_beta / cond_mu / cond_delta on random
// fixtures at n in {2..5}; relative tolerance 1e-9.
CheckResult check_conditionals(int n_fixtures = 50, std::uint64_t seed = 91,
                               CheckMutation mutation = CheckMutation::none);

// Two-subject closed-form covariance on a (sigma2, eta, l) x distance grid,
// tolerance 1e-10, plus strict monotone growth of Var(Delta_2) in distance.
CheckResult check_two_subject_grid();

// Joint-distribution (Geweke) test; |z| < 4 on all five scalars.
CheckResult check_geweke(long sweeps = 50000, CheckMutation mutation = CheckMutation::none,
                         std::uint64_t seed = 20240901);

// Deep-tail truncated-normal draws against high-precision quantile values
// and bound containment under adversarial parameters.
CheckResult check_tail_stability(std::uint64_t seed = 4711);

std::vector<CheckResult> run_all_checks(CheckMutation mutation = CheckMutation::none,
                                        long geweke_sweeps = 50000);

}  // namespace gpcausal
