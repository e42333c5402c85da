#include "fbd/bench.hpp"

#include "fbd/forward_dynamics.hpp"
#include "fbd/inverse_dynamics.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fbd {

void check_config(const BenchConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (cfg.warmup < 0 || cfg.trials < 1) throw std::invalid_argument("warmup must be >= 0 and trials >= 1");
  if (cfg.bodies_per_branch.empty() || cfg.orders.empty()) throw std::invalid_argument("empty sweep");
  for (int b : cfg.bodies_per_branch)
    if (b < 1) throw std::invalid_argument("bodies per branch must be >= 1");
  for (int r : cfg.orders)
    if (r < 0 || r + 3 > kMaxBinom) throw std::invalid_argument("order out of range");
  if (cfg.sweep == Sweep::OverN && cfg.orders.size() != 1) throw std::invalid_argument("over_N sweep takes one order");
  if (cfg.sweep == Sweep::OverR && cfg.bodies_per_branch.size() != 1) throw std::invalid_argument("over_r sweep takes one tree size");
}

namespace {

template <class Call>
BenchRow time_calls(Call&& call, int N, int r, const BenchConfig& cfg) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < cfg.warmup; ++i) call();
  BenchRow best{N, r, std::numeric_limits<double>::infinity(), 0.0};
  std::vector<double> dt(cfg.reps);
  for (int trial = 0; trial < cfg.trials; ++trial) {
    for (int i = 0; i < cfg.reps; ++i) {
      auto t0 = clock::now();
      call();
      dt[i] = std::chrono::duration<double>(clock::now() - t0).count();
    }
    double mean = 0.0;
    for (double x : dt) mean += x;
    mean /= cfg.reps;
    if (mean < best.mean_s) {
      double var = 0.0;
      for (double x : dt) var += (x - mean) * (x - mean);
      best.mean_s = mean;
      best.std_s = cfg.reps > 1 ? std::sqrt(var / (cfg.reps - 1)) : 0.0;
    }
  }
  return best;
}

}  // namespace

BenchRow bench_point(const RobotModel& model, BenchAlgo algo, int r, const BenchConfig& cfg) {
  std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(model.N), static_cast<std::uint64_t>(r),
                    static_cast<std::uint64_t>(algo)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto fill = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = U(rng);
  };

  if (algo == BenchAlgo::Inverse) {
    MotionInput in;
    in.base_twist.resize(6, r + 2);
    in.q.resize(model.n, r + 3);
    fill(in.base_twist);
    fill(in.q);
    KinematicsCache cache;
    GeneralizedForces out;
    LoadWorkspace ws;
    LoadInput none;
    auto call = [&] {
      forward_kinematics(model, in, r + 1, cache);
      hgrne(model, cache, none, r, out, ws);
    };
    return time_calls(call, model.N, r, cfg);
  }

  ForwardDynamicsInput in;
  in.q.resize(model.n);
  in.qdot.resize(model.n);
  fill(in.q);
  fill(in.qdot);
  in.base_wrench = Mat6X::Zero(6, r + 1);
  in.tau = Eigen::MatrixXd::Zero(model.n, r + 1);
  ForwardDynamicsWorkspace ws;
  AccelOutput out;
  auto call = [&] { hgabi(model, in, r, ws, out); };
  return time_calls(call, model.N, r, cfg);
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  check_config(cfg);
  std::vector<BenchRow> rows;
  if (cfg.sweep == Sweep::OverN) {
    for (int nb : cfg.bodies_per_branch) {
      RobotModel m = build_branched_tree(nb);
      rows.push_back(bench_point(m, cfg.algo, cfg.orders.front(), cfg));
    }
  } else {
    RobotModel m = build_branched_tree(cfg.bodies_per_branch.front());
    for (int r : cfg.orders) rows.push_back(bench_point(m, cfg.algo, r, cfg));
  }
  return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows) {
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    double x = std::log(static_cast<double>(r.N)), y = std::log(r.mean_s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fbd
