#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dyngeo/dynamic.hpp"

namespace dyngeo::cli {

// Runs one dyngeo command. `args` excludes the program name. Returns the
// process exit code: 0 success, 1 numerical failure (or a certificate that
// fails validation), 2 bad input or usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::size_t trial = 0;
  std::size_t events = 0;
  std::size_t points = 0;  // evaluation points given to the scratch baseline
  std::size_t sweep_augmentations = 0;
  std::size_t scratch_augmentations = 0;
  double sweep_ms = 0.0;
  double scratch_ms = 0.0;
};

struct BenchConfig {
  int leaves = 20;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t grid = 100;
  SweepOptions options;
};

// One random same-orthant segment and target per trial. The scratch
// baseline recomputes the geodesic at every event lambda and every grid
// point.
std::vector<BenchRow> run_bench(const BenchConfig& config);

void print_bench_table(const BenchConfig& config, const std::vector<BenchRow>& rows,
                       bool timing, std::ostream& out);

}  // namespace dyngeo::cli
