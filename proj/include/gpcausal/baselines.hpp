#pragma once

#include "gpcausal/model.hpp"

namespace gpcausal {

// The plain regression comparator: identity link for continuous outcomes,
// probit link for binary ones, outcome on main effects of treatment and
// covariates. For the probit the reported effect is the average marginal
// risk difference with a delta-method interval.
struct BaselineFit {
  double estimate = 0.0;
  double sd = 0.0;  // frequentist SE, the analogue of a posterior SD
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool converged = true;
};

BaselineFit fit_linear_baseline(const Dataset& data);
BaselineFit fit_probit_baseline(const Dataset& data);

}  // namespace gpcausal
