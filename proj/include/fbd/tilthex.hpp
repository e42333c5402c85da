#pragma once

#include "fbd/kinematics.hpp"
#include "fbd/model.hpp"

#include <array>
#include <numbers>

namespace fbd {

struct TiltHexParams {
  double b = 0.10, c = 0.18, d = 0.06;
  double m_base = 2.5, m_link = 0.25;
  Mat3 J_base = Vec3(0.03, 0.03, 0.05).asDiagonal();
  Mat3 J_link = Vec3(0.002, 0.002, 0.001).asDiagonal();
  double gravity = 9.81;
  // Propeller geometry; not tabulated, these are artifact defaults.
  double alpha = 20.0 * std::numbers::pi / 180.0;
  double beta = 10.0 * std::numbers::pi / 180.0;
  double a = 0.3;
  double c_f = 1e-3;
  double c_d = 1e-5;
};

RobotModel build_tilthex(const TiltHexParams& p = {});

// 6 × 6 map from squared rotor speeds to the body-frame base wrench.
Mat6 propeller_allocation(const TiltHexParams& p = {});

// Five branches of `bodies_per_branch` links on a TiltHex-like base, link
// parameters and axis pattern reused from the TiltHex arms.
RobotModel build_branched_tree(int bodies_per_branch, const TiltHexParams& p = {});

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual double duration() const = 0;
  // Kinematics input of order r: base twist orders 0..r, joint orders 0..r+1.
  // Order-r inverse dynamics needs eval(t, r + 1).
  virtual MotionInput eval(double t, int r) const = 0;
};

struct TiltHexTrajectoryParams {
  double radius = 1.0;
  double circle_rate = 2.0 * std::numbers::pi / 20.0;
  double yaw_amplitude = 25.0 * std::numbers::pi / 180.0;
  double yaw_rate = 2.0 * std::numbers::pi / 30.0;
  double T = 30.0;
  std::array<double, 6> q0_deg{10, -5, 15, -10, 7, -12};
  std::array<double, 6> eta_deg{60, 50, 40, 55, 45, 35};
  double time_scale = 1.0;  // evaluates the path at time_scale·t
};

class TiltHexTrajectory : public Trajectory {
 public:
  explicit TiltHexTrajectory(TiltHexTrajectoryParams p = {}) : p_(p) {}
  double duration() const override { return p_.T / p_.time_scale; }
  MotionInput eval(double t, int r) const override;
  const TiltHexTrajectoryParams& params() const { return p_; }

 private:
  TiltHexTrajectoryParams p_;
};

// Base at identity and joints fixed at q, all rates zero.
class RestTrajectory : public Trajectory {
 public:
  RestTrajectory(Eigen::VectorXd q, double T = 30.0) : q_(std::move(q)), T_(T) {}
  double duration() const override { return T_; }
  MotionInput eval(double t, int r) const override;

 private:
  Eigen::VectorXd q_;
  double T_;
};

}  // namespace fbd
