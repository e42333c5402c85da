#include "fbd/audit.hpp"
#include "fbd/closed_form.hpp"
#include "fbd/tilthex.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <functional>

using namespace fbd;

namespace {

double maxabs(const auto& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

MotionInput random_motion(const RobotModel& m, std::mt19937_64& rng) {
  MotionInput in;
  in.base_pose = oracle::random_pose(rng);
  in.base_twist.resize(6, 3);
  in.q.resize(m.n, 4);
  oracle::fill_uniform(in.base_twist, rng);
  oracle::fill_uniform(in.q, rng);
  return in;
}

}  // namespace

TEST_CASE("stacked operators rebuild the body twists") {
  std::mt19937_64 rng(61);
  for (const RobotModel& m : {build_tilthex(), build_branched_tree(2)}) {
    MotionInput in = random_motion(m, rng);
    auto c = forward_kinematics(m, in, 2);
    auto ops = assemble_operators(m, c);
    CHECK(ops.Gp.rows() == 6 * m.N);
    CHECK(ops.S.cols() == 6 + m.n);
    for (int b = 0; b < m.N; ++b) CHECK(maxabs(ops.V.segment<6>(6 * b) - c.V(b, 0)) <= 1e-12 * (1 + maxabs(c.V(b, 0))));
    // Gc is the transpose of Gp.
    CHECK(maxabs(ops.Gc - ops.Gp.transpose()) == 0.0);
  }
}

TEST_CASE("mass matrix is symmetric positive-definite") {
  std::mt19937_64 rng(62);
  RobotModel m = build_tilthex();
  for (int i = 0; i < 20; ++i) {
    auto c = forward_kinematics(m, random_motion(m, rng), 2);
    auto ops = assemble_operators(m, c);
    auto t = eom_order0(ops, {});
    CHECK(maxabs(t.Mbar - t.Mbar.transpose()) <= 1e-11 * maxabs(t.Mbar));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t.Mbar + t.Mbar.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // Base block is the locked composite inertia.
    Mat6 sum = Mat6::Zero();
    for (int b = 0; b < m.N; ++b) sum += c.M(b, 0);
    CHECK(maxabs(t.Mbar.topLeftCorner<6, 6>() - sum) <= 1e-12 * maxabs(sum));
  }
}

TEST_CASE("Coriolis matrix is admissible") {
  std::mt19937_64 rng(63);
  RobotModel m = build_tilthex();
  for (int i = 0; i < 100; ++i) {
    auto c = forward_kinematics(m, random_motion(m, rng), 2);
    auto ops = assemble_operators(m, c);
    auto t = eom_order0(ops, {});
    Eigen::MatrixXd X = 0.5 * t.Mbar_dot - t.C;
    CHECK((X + X.transpose()).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-9);
    CHECK(maxabs(t.C * ops.nu - t.h) <= 1e-11 * (1 + maxabs(t.h)));
    CHECK(maxabs(coriolis_matrix(ops) - t.C) == 0.0);
    CHECK(maxabs(mass_matrix_derivative(ops) - t.Mbar_dot) == 0.0);
  }
}

TEST_CASE("analytic mass matrix and gravity rates match finite differences") {
  RobotModel m = build_tilthex();
  TiltHexTrajectory traj;
  for (double t0 : {2.5, 13.0, 22.2}) {
    auto terms = [&](double s) {
      auto c = forward_kinematics(m, traj.eval(s, 2), 2);
      auto ops = assemble_operators(m, c);
      auto t = eom_order0(ops, {});
      eom_order1(ops, {}, t);
      return t;
    };
    auto T = terms(t0);
    Eigen::MatrixXd Md = oracle::derivative([&](double s) -> Eigen::MatrixXd { return terms(s).Mbar; }, t0, 1e-2);
    Eigen::VectorXd gd = oracle::derivative([&](double s) -> Eigen::VectorXd { return terms(s).g; }, t0, 1e-2);
    CHECK(oracle::rel(maxabs(Md - T.Mbar_dot), maxabs(T.Mbar_dot)) <= 1e-6);
    CHECK(oracle::rel(maxabs(gd - T.gdot), maxabs(T.gdot)) <= 1e-6);
  }
}

TEST_CASE("closed form agrees with the recursion") {
  std::mt19937_64 rng(64);
  RobotModel m = build_tilthex();
  double worst0 = 0.0, worst1 = 0.0;
  for (int i = 0; i < 100; ++i) {
    MotionInput in = random_motion(m, rng);
    LoadInput L = synthetic_loads(m, 0.1 * i, 1);
    auto c = forward_kinematics(m, in, 2);
    auto f = hgrne(m, c, L, 1);
    auto ops = assemble_operators(m, c);
    auto t = eom_order0(ops, L);
    eom_order1(ops, L, t);
    Eigen::VectorXd r0 = residual_order0(ops, t), r1 = residual_order1(ops, t);
    Eigen::VectorXd f0 = stacked_forces(f, 0), f1 = stacked_forces(f, 1);
    worst0 = std::max(worst0, maxabs(r0 - f0) / (1 + f0.norm()));
    worst1 = std::max(worst1, maxabs(r1 - f1) / (1 + f1.norm()));
  }
  CHECK(worst0 <= 1e-10);
  CHECK(worst1 <= 1e-10);
}

TEST_CASE("order-1 residual needs second-order kinematics") {
  RobotModel m = build_tilthex();
  TiltHexTrajectory traj;
  auto c = forward_kinematics(m, traj.eval(1.0, 1), 1);
  auto ops = assemble_operators(m, c);
  CHECK(ops.nuddot.size() == 0);
  auto t = eom_order0(ops, {});
  eom_order1(ops, {}, t);
  CHECK_THROWS_AS(residual_order1(ops, t), DimensionError);
}

TEST_CASE("pose tangent derivatives") {
  // C⁽ᵏ⁾ against finite differences of the trajectory pose.
  RobotModel m = build_tilthex();
  TiltHexTrajectory traj;
  const double t = 6.6;
  MotionInput in = traj.eval(t, 3);
  std::vector<Vec6> V(in.base_twist.cols());
  for (int k = 0; k < static_cast<int>(V.size()); ++k) V[k] = in.base_twist.col(k);
  auto D = pose_tangent_derivs(in.base_pose, V, 3);
  CHECK(maxabs(D[0] - in.base_pose.matrix()) == 0.0);
  for (int k = 1; k <= 2; ++k) {
    std::function<Mat4(double, int)> dn = [&](double s, int j) -> Mat4 {
      if (j == 0) return traj.eval(s, 0).base_pose.matrix();
      return oracle::derivative([&](double u) -> Mat4 { return dn(u, j - 1); }, s, 0.1);
    };
    CHECK(oracle::rel(maxabs(dn(t, k) - D[k]), maxabs(D[k])) <= 1e-6);
  }
}
