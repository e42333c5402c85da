#pragma once

#include "fbd/tilthex.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fbd {

enum class Sweep { OverN, OverR };
enum class BenchAlgo { Inverse, Forward };

struct BenchConfig {
  Sweep sweep = Sweep::OverN;
  BenchAlgo algo = BenchAlgo::Inverse;
  std::vector<int> bodies_per_branch{1, 2, 5, 10, 20, 40, 60, 99};  // N = 1 + 5·N_BOD
  std::vector<int> orders{3};
  int reps = 1000;
  int warmup = 20;
  int trials = 1;  // repeated timing runs per point, fastest kept
  std::uint64_t seed = 1;
};

struct BenchRow {
  int N = 0;
  int r = 0;
  double mean_s = 0.0;
  double std_s = 0.0;
};

void check_config(const BenchConfig& cfg);
std::vector<BenchRow> run_bench(const BenchConfig& cfg);
BenchRow bench_point(const RobotModel& model, BenchAlgo algo, int r, const BenchConfig& cfg);

// Least-squares slope of log(mean_s) against log(N).
double loglog_slope(const std::vector<BenchRow>& rows);

}  // namespace fbd
