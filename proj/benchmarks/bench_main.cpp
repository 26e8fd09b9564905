#include <benchmark/benchmark.h>

// The distro's benchmark_main archive is LTO bytecode tied to another gcc.
BENCHMARK_MAIN();
