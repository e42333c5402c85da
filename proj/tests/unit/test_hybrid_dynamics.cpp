#include "fbd/audit.hpp"
#include "fbd/hybrid_dynamics.hpp"
#include "fbd/tilthex.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace fbd;

namespace {

double maxabs(const auto& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Case {
  MotionInput motion;  // kinematic order r+1
  LoadInput loads;
  HybridState state;
};

Case random_case(const RobotModel& m, int r, std::mt19937_64& rng) {
  Case c;
  c.motion.base_pose = oracle::random_pose(rng);
  c.motion.base_twist.resize(6, r + 2);
  c.motion.q.resize(m.n, r + 3);
  oracle::fill_uniform(c.motion.base_twist, rng);
  oracle::fill_uniform(c.motion.q, rng);
  c.loads = synthetic_loads(m, std::uniform_real_distribution<double>(0, 10)(rng), r);
  c.state.base_pose = c.motion.base_pose;
  c.state.base_twist = c.motion.base_twist.col(0);
  c.state.q = c.motion.q.col(0);
  c.state.qdot = c.motion.q.col(1);
  return c;
}

std::vector<int> all_joints(const RobotModel& m) {
  std::vector<int> ids;
  for (int b = 2; b <= m.N; ++b) ids.push_back(b);
  return ids;
}

double tol(const auto& ref) { return 1e-10 * (1 + maxabs(ref)); }

}  // namespace

TEST_CASE("all joints torque-driven with a given wrench is forward dynamics") {
  std::mt19937_64 rng(51);
  RobotModel m = build_tilthex();
  for (int r = 0; r <= 5; ++r) {
    for (int i = 0; i < 5; ++i) {
      Case c = random_case(m, r, rng);
      auto f = inverse_dynamics(m, c.motion, c.loads, r);
      ForwardDynamicsInput in;
      in.base_pose = c.state.base_pose;
      in.base_twist = c.state.base_twist;
      in.q = c.state.q;
      in.qdot = c.state.qdot;
      in.base_wrench = f.Q1;
      in.tau = f.tau;
      in.loads = c.loads;
      auto fd = hgabi(m, in, r);

      HybridSpec spec;
      spec.Jtau = all_joints(m);
      spec.base_wrench = f.Q1;
      spec.tau = f.tau;
      auto h = hghyb(m, c.state, spec, c.loads, r);
      INFO("order " << r);
      CHECK(maxabs(h.V1 - fd.V1) <= tol(fd.V1));
      CHECK(maxabs(h.qdd - fd.qdd) <= tol(fd.qdd));
      CHECK(maxabs(h.base_wrench - f.Q1) == 0.0);
      CHECK(maxabs(h.tau - f.tau) == 0.0);
    }
  }
}

TEST_CASE("all joints motion-driven with a given twist is inverse dynamics") {
  std::mt19937_64 rng(52);
  RobotModel m = build_tilthex();
  for (int r = 0; r <= 5; ++r) {
    for (int i = 0; i < 5; ++i) {
      Case c = random_case(m, r, rng);
      auto f = inverse_dynamics(m, c.motion, c.loads, r);
      HybridSpec spec;
      spec.Jq = all_joints(m);
      spec.base_mode = BaseMode::TwistGiven;
      spec.base_accel = c.motion.base_twist.middleCols(1, r + 1);
      spec.qdd = c.motion.q.middleCols(2, r + 1);
      auto h = hghyb(m, c.state, spec, c.loads, r);
      INFO("order " << r);
      CHECK(maxabs(h.base_wrench - f.Q1) <= tol(f.Q1));
      CHECK(maxabs(h.tau - f.tau) <= tol(f.tau));
      CHECK(maxabs(h.qdd - spec.qdd) == 0.0);
      CHECK(maxabs(h.V1 - spec.base_accel) == 0.0);
    }
  }
}

TEST_CASE("mixed partitions reproduce the motion they were cut from") {
  // Each partition takes its half of the data from one random motion and its
  // inverse dynamics; the other half must come back.
  std::mt19937_64 rng(53);
  RobotModel m = build_tilthex();
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> parts{
      {{2, 3, 4}, {5, 6, 7}}, {{5}, {2, 3, 4, 6, 7}}, {{3, 6}, {2, 4, 5, 7}}, {{2, 4, 6, 7}, {3, 5}}};
  for (auto [Jq, Jtau] : parts) {
    for (BaseMode mode : {BaseMode::WrenchGiven, BaseMode::TwistGiven}) {
      for (int r = 0; r <= 5; ++r) {
        Case c = random_case(m, r, rng);
        auto f = inverse_dynamics(m, c.motion, c.loads, r);
        Mat6X V1 = c.motion.base_twist.middleCols(1, r + 1);
        Eigen::MatrixXd qdd = c.motion.q.middleCols(2, r + 1);
        HybridSpec spec;
        spec.Jq = Jq;
        spec.Jtau = Jtau;
        spec.base_mode = mode;
        spec.qdd = Eigen::MatrixXd::Zero(m.n, r + 1);
        spec.tau = Eigen::MatrixXd::Zero(m.n, r + 1);
        for (int id : Jq) spec.qdd.row(id - 2) = qdd.row(id - 2);
        for (int id : Jtau) spec.tau.row(id - 2) = f.tau.row(id - 2);
        if (mode == BaseMode::WrenchGiven) spec.base_wrench = f.Q1;
        else spec.base_accel = V1;
        auto h = hghyb(m, c.state, spec, c.loads, r);
        INFO("order " << r);
        for (int k = 0; k <= r; ++k) {
          INFO("stack entry " << k);
          CHECK(maxabs(h.V1.col(k) - V1.col(k)) <= 1e-8 * maxabs(V1.col(k)));
          CHECK(maxabs(h.qdd.col(k) - qdd.col(k)) <= 1e-8 * maxabs(qdd.col(k)));
          CHECK(maxabs(h.base_wrench.col(k) - f.Q1.col(k)) <= 1e-8 * maxabs(f.Q1.col(k)));
          CHECK(maxabs(h.tau.col(k) - f.tau.col(k)) <= 1e-8 * maxabs(f.tau.col(k)));
        }
      }
    }
  }
}

TEST_CASE("static prescribed motion reproduces the equilibrium wrench") {
  RobotModel m = build_tilthex();
  std::mt19937_64 rng(54);
  const int r = 3;
  for (int i = 0; i < 5; ++i) {
    HybridState st;
    st.base_pose = oracle::random_pose(rng);
    st.q = Eigen::VectorXd::Zero(m.n);
    oracle::fill_uniform(st.q, rng);
    st.qdot = Eigen::VectorXd::Zero(m.n);
    HybridSpec spec;
    spec.Jq = all_joints(m);
    spec.base_mode = BaseMode::TwistGiven;
    spec.base_accel = Mat6X::Zero(6, r + 1);
    spec.qdd = Eigen::MatrixXd::Zero(m.n, r + 1);
    auto h = hghyb(m, st, spec, {}, r);
    auto ref = oracle::static_holding(m, st.base_pose.matrix(), st.q);
    CHECK(maxabs(h.base_wrench.col(0) - ref.base) <= 1e-11);
    CHECK(maxabs(h.tau.col(0) - ref.tau) <= 1e-11);
    CHECK(maxabs(h.base_wrench.rightCols(r)) <= 1e-11);
  }
}

TEST_CASE("hybrid articulated inertia is order invariant") {
  std::mt19937_64 rng(55);
  RobotModel m = build_tilthex();
  ForwardDynamicsOptions opt;
  opt.recompute_inertia_each_order = true;
  Case c = random_case(m, 5, rng);
  HybridSpec spec;
  spec.Jq = {2, 5};
  spec.Jtau = {3, 4, 6, 7};
  spec.base_wrench = Mat6X::Zero(6, 6);
  spec.qdd = Eigen::MatrixXd::Zero(m.n, 6);
  spec.tau = Eigen::MatrixXd::Zero(m.n, 6);
  auto h = hghyb(m, c.state, spec, c.loads, 5, opt);
  CHECK(h.inertia_order_drift >= 0.0);
  CHECK(h.inertia_order_drift <= 1e-12);
}

TEST_CASE("partition errors name the joint") {
  RobotModel m = build_tilthex();
  HybridSpec spec;
  spec.Jq = {2, 3, 4};
  spec.Jtau = {5, 6};
  CHECK_THROWS_WITH_AS(check_partition(m, spec), doctest::Contains("joint 7"), std::invalid_argument);
  spec.Jtau = {4, 5, 6, 7};
  CHECK_THROWS_WITH_AS(check_partition(m, spec), doctest::Contains("joint 4"), std::invalid_argument);
  spec.Jtau = {1, 5, 6, 7};
  CHECK_THROWS_WITH_AS(check_partition(m, spec), doctest::Contains("joint id 1"), std::invalid_argument);
  spec.Jtau = {5, 6, 7, 8};
  CHECK_THROWS_AS(check_partition(m, spec), std::invalid_argument);
  spec.Jtau = {5, 6, 7};
  CHECK_NOTHROW(check_partition(m, spec));
}

TEST_CASE("zero-inertia bodies may be motion-driven only") {
  // Two-axis joint built from a massless intermediate body.
  BodySpec base;
  base.inertia = body_inertia(2.0, Mat3::Identity());
  BodySpec mid;
  mid.id = 2;
  mid.parent = 1;
  mid.A_parent_child = Pose::translation(Vec3(0.2, 0, 0));
  mid.inertia = Mat6::Zero();
  mid.joint = JointSpec{JointKind::Revolute, Vec3::UnitZ(), Vec3::Zero()};
  BodySpec tip;
  tip.id = 3;
  tip.parent = 2;
  tip.A_parent_child = Pose::translation(Vec3(0.1, 0, 0));
  tip.inertia = body_inertia(0.5, 0.01 * Mat3::Identity());
  tip.joint = JointSpec{JointKind::Revolute, Vec3::UnitY(), Vec3(-0.1, 0, 0)};
  RobotModel m = build_model({base, mid, tip});

  HybridState st;
  st.q = Eigen::VectorXd::Constant(2, 0.2);
  st.qdot = Eigen::VectorXd::Constant(2, -0.1);
  HybridSpec spec;
  spec.base_wrench = Mat6X::Zero(6, 2);
  spec.qdd = Eigen::MatrixXd::Zero(2, 2);
  spec.tau = Eigen::MatrixXd::Zero(2, 2);
  spec.Jq = {2};
  spec.Jtau = {3};
  CHECK_NOTHROW(hghyb(m, st, spec, {}, 1));
  spec.Jq = {3};
  spec.Jtau = {2};
  CHECK_THROWS_WITH_AS(hghyb(m, st, spec, {}, 1), doctest::Contains("joint 2"), std::invalid_argument);
}

TEST_CASE("hybrid stacks are checked") {
  RobotModel m = build_tilthex();
  HybridState st;
  st.q = Eigen::VectorXd::Zero(m.n);
  st.qdot = st.q;
  HybridSpec spec;
  spec.Jtau = all_joints(m);
  spec.base_wrench = Mat6X::Zero(6, 2);
  spec.tau = Eigen::MatrixXd::Zero(m.n, 2);
  CHECK_NOTHROW(hghyb(m, st, spec, {}, 1));
  CHECK_THROWS_AS(hghyb(m, st, spec, {}, 2), DimensionError);
  spec.base_mode = BaseMode::TwistGiven;
  CHECK_THROWS_AS(hghyb(m, st, spec, {}, 1), DimensionError);
}
