// Benchmark of the OpenMP kernel fill against the serial reference, plus
// replication-level throughput of the simulation harness at one vs all
// threads.
#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpcausal/kernels.hpp"
#include "gpcausal/rng.hpp"
#include "gpcausal/simulation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n\n");
#endif

  std::printf("%-28s %10s %10s %8s\n", "kernel fill", "serial ms", "omp ms", "speedup");
  gpcausal::RngStream rng(7, 0);
  for (const int n : {200, 500, 1000, 2000}) {
    Eigen::MatrixXd x(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    const gpcausal::KernelParams params{1.3, 1.7};
    const int reps = n <= 500 ? 50 : 10;
    Eigen::MatrixXd serial_out, parallel_out;
    const double t_serial =
        time_ms([&] { serial_out = gpcausal::se_kernel_serial(x, x, params); }, reps);
    const double t_parallel = time_ms([&] { parallel_out = gpcausal::se_kernel(x, x, params); }, reps);
    const bool identical = serial_out == parallel_out;
    std::printf("n=%-5d %31.3f %10.3f %7.2fx  bit-identical: %s\n", n, t_serial, t_parallel,
                t_serial / t_parallel, identical ? "yes" : "NO");
  }

  std::printf("\nreplication harness (linear-y1, n=100, K=8, reduced chain)\n");
  gpcausal::ScenarioSpec spec;
  spec.family = gpcausal::ScenarioFamily::linear_y1;
  spec.n = 100;
  spec.replications = 8;
  spec.mcmc.n_chains = 1;
  spec.mcmc.n_burnin = 200;
  spec.mcmc.n_kept_iterations = 200;
  spec.mcmc.thin = 5;
  spec.mcmc.seed = 11;

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  for (const int threads : {1, max_threads}) {
    omp_set_num_threads(threads);
    const auto t0 = Clock::now();
    const auto report = gpcausal::run_replications(spec);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("threads=%d: %.2fs  (gp ate %.3f)\n", threads, secs, report.methods[0].ate);
    if (threads == max_threads && max_threads == 1) break;
  }
#else
  const auto t0 = Clock::now();
  const auto report = gpcausal::run_replications(spec);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("serial: %.2fs  (gp ate %.3f)\n", secs, report.methods[0].ate);
#endif
  return 0;
}
