#pragma once

#include "fbd/inverse_dynamics.hpp"
#include "fbd/kinematics.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>

namespace fbd {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDegenerateJointInertia = 1e-12;

struct ArticulatedState {
  std::vector<Mat6> MA;
  std::vector<Vec6> U;         // M^A S, by body
  std::vector<double> D_inv;   // (Sᵀ M^A S)⁻¹, by body (entry 0 unused)
  DerivTable<Vec6> WA;         // (W^A)⁽ᵏ⁾
  DerivTable<Vec6> W;          // transmitted wrench M^A V⁽ᵏ⁺¹⁾ + (W^A)⁽ᵏ⁾
  std::vector<double> q_tilde;
};

// Post-order accumulation of articulated inertias from the order-0 cache.
void articulated_inertia(const RobotModel& model, const KinematicsCache& cache, ArticulatedState& art);
ArticulatedState articulated_inertia(const RobotModel& model, const KinematicsCache& cache);

struct ForwardDynamicsInput {
  Pose base_pose;
  Vec6 base_twist = Vec6::Zero();
  Eigen::VectorXd q, qdot;
  Mat6X base_wrench;                               // orders 0..r
  WrenchFrame base_wrench_frame = WrenchFrame::Spatial;
  Eigen::MatrixXd tau;                             // n × (r+1)
  LoadInput loads;
};

struct AccelOutput {
  Mat6X V1;             // (V⁰₁)⁽¹⁾..⁽ʳ⁺¹⁾
  Eigen::MatrixXd qdd;  // q⁽²⁾..q⁽ʳ⁺²⁾, n × (r+1)
  DerivTable<Vec6> V;   // per-body twists, orders 0..r+1
  double base_residual = 0.0;        // max_k ‖M^A₁x + W^A₁ − W_prop‖ / max(1, ‖W_prop‖)
  double inertia_order_drift = -1.0; // set when recomputation per order is requested
};

struct ForwardDynamicsOptions {
  bool recompute_inertia_each_order = false;
};

struct ForwardDynamicsWorkspace {
  MotionInput motion;
  KinematicsCache cache;
  ArticulatedState art;
  ArticulatedState scratch;
  LoadWorkspace loads;
  Eigen::LDLT<Mat6> ldlt;
  std::vector<Mat6> base_A;
  Mat6X base_wrench;
};

void hgabi(const RobotModel& model, const ForwardDynamicsInput& in, int r, ForwardDynamicsWorkspace& ws, AccelOutput& out,
           const ForwardDynamicsOptions& opt = {});
AccelOutput hgabi(const RobotModel& model, const ForwardDynamicsInput& in, int r, const ForwardDynamicsOptions& opt = {});

// Shared pieces of the order loop, also used by the hybrid solver.
void set_state_motion(const RobotModel& model, const Pose& C, const Vec6& V1, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& qdot, int r, MotionInput& motion);
void base_wrench_level(const Mat6X& given, WrenchFrame frame, const KinematicsCache& cache, std::vector<Mat6>& A, Mat6X& spatial,
                       int k);

}  // namespace fbd
