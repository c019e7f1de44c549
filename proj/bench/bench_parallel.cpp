// Times the OpenMP trial pools against their serial reference
// implementations and confirms both routes agree. Usage:
//   bench_parallel [trials] [workers]
// Defaults: 20000 trials, workers = hardware default. The connectivity
// reference deliberately materializes the full configuration per trial, so
// its ratio mixes algorithm and parallelism; the conjugate-gradient rows
// isolate the worker count. On one hardware thread CG is expected near
// parity — the point is that hit counts and conductances stay identical
// for every worker count.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "perclab/conductance.hpp"
#include "perclab/graphs.hpp"
#include "perclab/percolation.hpp"
#include "perclab/window.hpp"

using namespace perclab;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int64_t trials = argc > 1 ? std::atoll(argv[1]) : 20000;
  const int workers = argc > 2 ? std::atoi(argv[2]) : 0;
  const int effective = workers > 0 ? workers : omp_get_max_threads();
  std::printf("bench_parallel: trials=%lld, workers=%d (hardware threads %d)\n",
              static_cast<long long>(trials), effective, omp_get_max_threads());

  {
    const auto g = make_oriented_tree(1, 2);
    const VertexRef x = origin(*g);
    const VertexRef y = canonical_target(*g, 5);
    Estimate par, ser;
    const double ms_par = time_ms([&] {
      par = connectivity_estimate(g, 0.5, x, y, trials, 7, 2, workers);
    });
    const double ms_ser = time_ms(
        [&] { ser = connectivity_estimate_serial(g, 0.5, x, y, trials, 7, 2); });
    std::printf(
        "connectivity     lazy-parallel %8.1f ms   full-config reference %8.1f ms"
        "   ratio %.2fx   hits %lld/%lld %s\n",
        ms_par, ms_ser, ms_ser / ms_par, static_cast<long long>(par.hits),
        static_cast<long long>(ser.hits),
        par.hits == ser.hits ? "(identical)" : "(MISMATCH)");
  }

  {
    // One large percolation cluster network, solved by conjugate gradients
    // with the requested worker count versus one worker.
    const auto g = make_fixed_end_tree(2);
    const VertexRef o = origin(*g);
    const Window win = ball(g, o, 14);
    const Config cfg = sample_config(win, 0.95, 11);
    const Network net = cluster_network(win, cfg, o, 14);
    ConductanceResult many, one;
    const double ms_many = time_ms(
        [&] { many = solve_effective_conductance(net, 1e-10, workers); });
    const double ms_one =
        time_ms([&] { one = solve_effective_conductance(net, 1e-10, 1); });
    std::printf(
        "conductance CG   parallel %8.1f ms   1-worker %7.1f ms   speedup %.2fx"
        "   c_eff %.12g %s (network %d vertices)\n",
        ms_many, ms_one, ms_one / ms_many, many.c_eff,
        many.c_eff == one.c_eff ? "(identical)" : "(MISMATCH)", net.n);
  }
  return 0;
}
