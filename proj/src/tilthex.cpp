#include "fbd/tilthex.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbd {

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

Mat3 rot(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

BodySpec link(int id, int parent, const Pose& A, const Vec3& axis, const TiltHexParams& p) {
  BodySpec s;
  s.id = id;
  s.parent = parent;
  s.A_parent_child = A;
  s.inertia = body_inertia(p.m_link, p.J_link);
  s.joint = JointSpec{JointKind::Revolute, axis, Vec3(0, 0, p.d)};
  return s;
}

BodySpec base(const TiltHexParams& p) {
  BodySpec s;
  s.id = 1;
  s.parent = 0;
  s.inertia = body_inertia(p.m_base, p.J_base);
  return s;
}

// d^k/dt^k of cos(a t + φ) and sin(a t + φ).
double dcos(double a, double t, int k) { return std::pow(a, k) * std::cos(a * t + k * kPi / 2); }
double dsin(double a, double t, int k) { return std::pow(a, k) * std::sin(a * t + k * kPi / 2); }

}  // namespace

RobotModel build_tilthex(const TiltHexParams& p) {
  const Vec3 ey = Vec3::UnitY(), ex = Vec3::UnitX(), ez = Vec3::UnitZ();
  std::vector<BodySpec> specs{base(p)};
  const Pose down = Pose::translation(Vec3(0, 0, -2 * p.d));
  for (int i : {2, 5}) {
    double sgn = (i % 2 == 0) ? 1.0 : -1.0;
    Pose A = Pose::translation(Vec3(0, 0, -p.b - p.d)) * Pose::translation(Vec3(sgn * p.c / 2, 0, 0));
    specs.push_back(link(i, 1, A, ey, p));
    specs.push_back(link(i + 1, i, down, ex, p));
    specs.push_back(link(i + 2, i + 1, down, ez, p));
  }
  return build_model(specs, p.gravity);
}

RobotModel build_branched_tree(int per_branch, const TiltHexParams& p) {
  if (per_branch < 1) throw std::invalid_argument("bodies per branch must be at least 1");
  const std::array<Vec3, 3> axes{Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ()};
  const Pose down = Pose::translation(Vec3(0, 0, -2 * p.d));
  std::vector<BodySpec> specs{base(p)};
  int id = 2;
  for (int br = 0; br < 5; ++br) {
    double th = 2 * kPi * br / 5;
    Pose A = Pose::translation(Vec3(p.c / 2 * std::cos(th), p.c / 2 * std::sin(th), -p.b - p.d));
    int parent = 1;
    for (int k = 0; k < per_branch; ++k) {
      specs.push_back(link(id, parent, k == 0 ? A : down, axes[k % 3], p));
      parent = id++;
    }
  }
  return build_model(specs, p.gravity);
}

Mat6 propeller_allocation(const TiltHexParams& p) {
  Mat6 A;
  for (int i = 1; i <= 6; ++i) {
    // Neighbouring rotors tilt and spin in opposite senses.
    const double sgn = i % 2 ? 1.0 : -1.0;
    Vec6 w;
    w << 0, 0, sgn * p.c_d, 0, 0, p.c_f;
    Pose C = Pose::rotation(rot(Vec3::UnitZ(), (2 - i) * kPi / 3)) * Pose::translation(Vec3(p.a, 0, 0)) *
             Pose::rotation(rot(Vec3::UnitX(), sgn * p.alpha)) * Pose::rotation(rot(Vec3::UnitY(), p.beta));
    A.col(i - 1) = adjoint(C.inverse()).transpose() * w;
  }
  return A;
}

MotionInput TiltHexTrajectory::eval(double t, int r) const {
  if (r < 0) throw std::invalid_argument("order must be non-negative");
  if (!(t >= 0.0 && t <= duration())) throw std::out_of_range("trajectory time " + std::to_string(t) + " outside [0, " + std::to_string(duration()) + "]");
  const double s = p_.time_scale;
  const double wc = p_.circle_rate * s, wy = p_.yaw_rate * s, wq = kPi / p_.T * s;

  // Position derivatives 0..r+1 and yaw derivatives 0..r+1.
  std::vector<Vec3> x(r + 2), w(r + 1);
  std::vector<double> psi(r + 2);
  for (int k = 0; k <= r + 1; ++k) {
    x[k] = Vec3(p_.radius * dcos(wc, t, k), p_.radius * dsin(wc, t, k), 0.0);
    psi[k] = p_.yaw_amplitude * dsin(wy, t, k);
  }
  for (int k = 0; k <= r; ++k) w[k] = Vec3(0, 0, psi[k + 1]);

  MotionInput m;
  m.base_pose = Pose(rot(Vec3::UnitZ(), psi[0]), x[0]);
  m.base_twist.resize(6, r + 1);
  for (int k = 0; k <= r; ++k) {
    Vec3 v = x[k + 1];
    for (int i = 0; i <= k; ++i) v -= binomd(k, i) * w[i].cross(x[k - i]);
    m.base_twist.col(k) = make_twist(w[k], v);
  }
  m.q.resize(6, r + 2);
  for (int j = 0; j < 6; ++j) {
    double q0 = deg(p_.q0_deg[j]), eta = deg(p_.eta_deg[j]);
    m.q(j, 0) = q0 + eta / 2 * (1 - std::cos(wq * t));
    for (int k = 1; k <= r + 1; ++k) m.q(j, k) = -eta / 2 * dcos(wq, t, k);
  }
  return m;
}

MotionInput RestTrajectory::eval(double t, int r) const {
  if (r < 0) throw std::invalid_argument("order must be non-negative");
  if (!(t >= 0.0 && t <= T_)) throw std::out_of_range("trajectory time outside the horizon");
  MotionInput m;
  m.base_twist = Mat6X::Zero(6, r + 1);
  m.q = Eigen::MatrixXd::Zero(q_.size(), r + 2);
  m.q.col(0) = q_;
  return m;
}

}  // namespace fbd
