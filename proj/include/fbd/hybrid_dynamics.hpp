#pragma once

#include "fbd/forward_dynamics.hpp"

#include <vector>

namespace fbd {

enum class BaseMode { WrenchGiven, TwistGiven };

// Joint sets hold body ids (2..N). Prescribed stacks are n × (r+1) with rows
// by joint; only the rows of the matching set are read.
struct HybridSpec {
  std::vector<int> Jq, Jtau;
  BaseMode base_mode = BaseMode::WrenchGiven;
  Mat6X base_wrench;                     // orders 0..r, wrench_given
  WrenchFrame base_wrench_frame = WrenchFrame::Spatial;
  Mat6X base_accel;                      // (V⁰₁)⁽¹⁾..⁽ʳ⁺¹⁾, twist_given
  Eigen::MatrixXd qdd;                   // q̄⁽²⁾..q̄⁽ʳ⁺²⁾ on Jq
  Eigen::MatrixXd tau;                   // τ⁽⁰⁾..τ⁽ʳ⁾ on Jtau
};

struct HybridState {
  Pose base_pose;
  Vec6 base_twist = Vec6::Zero();
  Eigen::VectorXd q, qdot;
};

struct HybridOutput {
  Mat6X V1;              // (V⁰₁)⁽¹⁾..⁽ʳ⁺¹⁾ (given or solved)
  Mat6X base_wrench;     // spatial, orders 0..r (given or solved)
  Eigen::MatrixXd qdd;   // all joints, solved on Jtau
  Eigen::MatrixXd tau;   // all joints, solved on Jq
  DerivTable<Vec6> V;    // per-body twists 0..r+1
  double inertia_order_drift = -1.0;
};

// Throws std::invalid_argument naming the offending joint.
void check_partition(const RobotModel& model, const HybridSpec& spec);

HybridOutput hghyb(const RobotModel& model, const HybridState& state, const HybridSpec& spec, const LoadInput& loads, int r,
                   const ForwardDynamicsOptions& opt = {});

}  // namespace fbd
