// Times the grid sweep with the serial reference loop against the OpenMP
// kernel and reports the speedup.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "rdmft/parallel.hpp"
#include "rdmft/sweep.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 2;
  int grid = argc > 2 ? std::atoi(argv[2]) : 40;
  double u = argc > 3 ? std::atof(argv[3]) : 1.0;

  rdmft::SearchOptions opts;
  opts.seed = 0x5eed;

  std::printf("sweep N=%d grid=%d u=%g threads=%d\n", n, grid, u,
              rdmft::max_threads());

  auto t0 = Clock::now();
  const auto serial =
      rdmft::run_sweep(n, u, grid, rdmft::Strategy::automatic, opts, true);
  const double ts = seconds_since(t0);

  t0 = Clock::now();
  const auto parallel =
      rdmft::run_sweep(n, u, grid, rdmft::Strategy::automatic, opts, false);
  const double tp = seconds_since(t0);

  double worst = 0;
  for (size_t i = 0; i < serial.size(); ++i) {
    worst = std::max(worst, std::abs(serial[i].f - parallel[i].f));
    worst = std::max(worst, std::abs(serial[i].m_zz - parallel[i].m_zz));
  }

  std::printf("serial   %8.3f s\n", ts);
  std::printf("parallel %8.3f s  (speedup %.2fx)\n", tp, ts / tp);
  std::printf("max |serial - parallel| deviation: %.3g\n", worst);
  return worst == 0.0 ? 0 : 1;
}
