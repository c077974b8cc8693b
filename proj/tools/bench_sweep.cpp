// Benchmark: serial reference kernel vs the OpenMP kernel on the same
// sweeps, checking that both produce identical rows.

#include <chrono>
#include <cstdio>
#include <string>

#include "fforbit/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fforbit;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void bench_sweep(const char* name, const AnyMap& map, std::vector<std::int64_t> x0,
                 std::uint64_t pmax, int threads) {
    SweepConfig cfg{map, std::move(x0), pmax};
    std::vector<ResultRow> serial_rows, parallel_rows;
    double t_serial = time_ms([&] { serial_rows = run_cycle_sweep_serial(cfg); });
    cfg.jobs = threads;
    double t_parallel = time_ms([&] { parallel_rows = run_cycle_sweep(cfg); });
    bool equal = serial_rows == parallel_rows;
    std::printf("%-12s pmax=%-7llu serial %8.1f ms   omp(%d) %8.1f ms   speedup %.2fx   rows_equal %s\n",
                name, static_cast<unsigned long long>(pmax), t_serial, threads, t_parallel,
                t_serial / t_parallel, equal ? "yes" : "NO");
    if (!equal) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t pmax1 = 50000, pmax3 = 1000;
    if (argc > 1) pmax1 = std::stoull(argv[1]);
    if (argc > 2) pmax3 = std::stoull(argv[2]);
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#else
    std::printf("built without OpenMP; comparing the serial kernel against itself\n");
#endif
    bench_sweep("dim1", builtin_map("dim1"), {1}, pmax1, threads);
    bench_sweep("dim3", builtin_map("dim3"), {1, 2, 3}, pmax3, threads);
    return 0;
}
