#include "fbd/simulate.hpp"
#include "fbd/tilthex.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace fbd;

namespace {

SimState initial(const RobotModel& m) {
  std::mt19937_64 rng(71);
  SimState s;
  s.base_pose = oracle::random_pose(rng);
  s.base_twist = oracle::random_vec6(rng, 0.5);
  s.q = Eigen::VectorXd::Zero(m.n);
  s.qdot = Eigen::VectorXd::Zero(m.n);
  oracle::fill_uniform(s.q, rng);
  oracle::fill_uniform(s.qdot, rng);
  return s;
}

double drift(const RobotModel& m, double dt, int steps) {
  ForwardDynamicsWorkspace ws;
  SimState s = initial(m);
  const double E0 = mechanical_energy(m, s);
  double worst = 0.0;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(m.n);
  for (int i = 0; i < steps; ++i) {
    s = rk4_step(m, s, dt, Vec6::Zero(), tau, ws);
    worst = std::max(worst, std::abs(mechanical_energy(m, s) - E0));
  }
  return worst / std::abs(E0);
}

}  // namespace

TEST_CASE("unforced motion conserves energy") {
  RobotModel m = build_tilthex();
  double coarse = drift(m, 2e-3, 500);
  double fine = drift(m, 1e-3, 1000);
  CHECK(fine <= 1e-8);
  // Fourth-order convergence of the drift.
  CHECK(coarse / fine > 8.0);
}

TEST_CASE("free fall integrates exactly") {
  RobotModel m = build_tilthex();
  ForwardDynamicsWorkspace ws;
  SimState s;
  s.q = Eigen::VectorXd::Zero(m.n);
  s.qdot = s.q;
  for (int i = 0; i < 100; ++i) s = rk4_step(m, s, 0.01, Vec6::Zero(), s.q * 0.0, ws);
  CHECK(std::abs(s.base_pose.x().z() + 0.5 * 9.81) < 1e-12);
  CHECK(std::abs(s.base_twist[5] + 9.81) < 1e-12);
  CHECK(s.base_pose.orthonormality_error() < 1e-14);
}

TEST_CASE("hover wrench keeps the robot still") {
  RobotModel m = build_tilthex();
  ForwardDynamicsWorkspace ws;
  SimState s;
  s.q = Eigen::VectorXd::Zero(m.n);
  s.qdot = s.q;
  auto hold = oracle::static_holding(m, Mat4::Identity(), s.q);
  for (int i = 0; i < 100; ++i) s = rk4_step(m, s, 0.01, hold.base, hold.tau, ws);
  CHECK(s.base_pose.x().norm() < 1e-10);
  CHECK(s.q.cwiseAbs().maxCoeff() < 1e-10);
}
