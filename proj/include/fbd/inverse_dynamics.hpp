#pragma once

#include "fbd/kinematics.hpp"

#include <Eigen/Core>

#include <vector>

namespace fbd {

enum class WrenchFrame { Body, Spatial };

// Applied wrenches per body (6 × (r+1) each, empty vector = none) and
// external joint torques (n × (r+1), empty = none). Joint torques enter with
// the sign τ = Q − τ_ext.
struct LoadInput {
  std::vector<Mat6X> applied;
  WrenchFrame applied_frame = WrenchFrame::Body;
  Eigen::MatrixXd tau_ext;

  bool has_applied() const { return !applied.empty(); }
  bool has_tau_ext() const { return tau_ext.size() > 0; }
};

struct GeneralizedForces {
  Mat6X Q1;             // spatial base (propeller) wrench, orders 0..r
  Eigen::MatrixXd Q;    // n × (r+1) generalized joint forces
  Eigen::MatrixXd tau;  // n × (r+1), Q − τ_ext
  DerivTable<Vec6> W;   // transmitted joint wrenches, by body
};

// Scratch for repeated calls without reallocation.
struct LoadWorkspace {
  DerivTable<Vec6> W_app;  // spatial applied wrench, by body
  DerivTable<Mat6> A;      // (Ad_{C⁻¹}ᵀ)⁽ᵏ⁾ per body
};

void check_loads(const RobotModel& model, const LoadInput& loads, int r);

// Fills ws.W_app(b, k) for one level; needs V⁽⁰..ᵏ⁻¹⁾ of body b.
void applied_wrench_level(const KinematicsCache& cache, const LoadInput& loads, LoadWorkspace& ws, int b, int k);

void hgrne(const RobotModel& model, const KinematicsCache& cache, const LoadInput& loads, int r, GeneralizedForces& out,
           LoadWorkspace& ws);
GeneralizedForces hgrne(const RobotModel& model, const KinematicsCache& cache, const LoadInput& loads, int r);

// Forward kinematics at order r+1 followed by hgrne at order r.
GeneralizedForces inverse_dynamics(const RobotModel& model, const MotionInput& motion, const LoadInput& loads, int r);

// Wᵇ = Ad_Cᵀ Q and its derivatives, inverse of external_wrench_derivs.
Mat6X base_wrench_to_body_frame(const Mat6X& Q1, const Pose& C0_1, const Mat6X& V1, int r);
Mat6X base_wrench_to_spatial_frame(const Mat6X& Wb, const Pose& C0_1, const Mat6X& V1, int r);

}  // namespace fbd
