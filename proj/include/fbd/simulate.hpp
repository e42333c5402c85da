#pragma once

#include "fbd/forward_dynamics.hpp"

namespace fbd {

struct SimState {
  double t = 0.0;
  Pose base_pose;
  Vec6 base_twist = Vec6::Zero();  // spatial
  Eigen::VectorXd q, qdot;
};

// One fourth-order Runge–Kutta–Munthe-Kaas step with constant spatial base
// wrench and joint torques.
SimState rk4_step(const RobotModel& model, const SimState& s, double dt, const Vec6& base_wrench, const Eigen::VectorXd& tau,
                  ForwardDynamicsWorkspace& ws);

// Kinetic plus gravitational potential energy.
double mechanical_energy(const RobotModel& model, const SimState& s);

}  // namespace fbd
