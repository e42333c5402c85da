#include "fbd/simulate.hpp"

namespace fbd {

namespace {

struct Rate {
  Vec6 Vdot;
  Eigen::VectorXd qddot;
};

Rate rate(const RobotModel& model, const Pose& C, const Vec6& V, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
          const Vec6& W, const Eigen::VectorXd& tau, ForwardDynamicsWorkspace& ws) {
  ForwardDynamicsInput in;
  in.base_pose = C;
  in.base_twist = V;
  in.q = q;
  in.qdot = qd;
  in.base_wrench = W;
  in.tau = tau;
  AccelOutput out;
  hgabi(model, in, 0, ws, out);
  return {out.V1.col(0), out.qdd.col(0)};
}

// dexp⁻¹ truncated after the third term, enough for a fourth-order method.
Vec6 dexp_inv(const Vec6& u, const Vec6& v) {
  Vec6 uv = bracket(u, v);
  return v - 0.5 * uv + bracket(u, uv) / 12.0;
}

}  // namespace

SimState rk4_step(const RobotModel& model, const SimState& s, double dt, const Vec6& W, const Eigen::VectorXd& tau,
                  ForwardDynamicsWorkspace& ws) {
  static constexpr double a[4] = {0.0, 0.5, 0.5, 1.0};
  static constexpr double w[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  Vec6 ku[4], kV[4];
  Eigen::VectorXd kq[4], kqd[4];
  for (int i = 0; i < 4; ++i) {
    Vec6 u = Vec6::Zero(), V = s.base_twist;
    Eigen::VectorXd q = s.q, qd = s.qdot;
    if (i > 0) {
      u = a[i] * dt * ku[i - 1];
      V += a[i] * dt * kV[i - 1];
      q += a[i] * dt * kq[i - 1];
      qd += a[i] * dt * kqd[i - 1];
    }
    Pose C = exp_se3(u) * s.base_pose;
    Rate f = rate(model, C, V, q, qd, W, tau, ws);
    ku[i] = dexp_inv(u, V);
    kV[i] = f.Vdot;
    kq[i] = qd;
    kqd[i] = f.qddot;
  }
  SimState n = s;
  Vec6 u = Vec6::Zero();
  for (int i = 0; i < 4; ++i) {
    u += dt * w[i] * ku[i];
    n.base_twist += dt * w[i] * kV[i];
    n.q += dt * w[i] * kq[i];
    n.qdot += dt * w[i] * kqd[i];
  }
  n.base_pose = exp_se3(u) * s.base_pose;
  n.t = s.t + dt;
  return n;
}

double mechanical_energy(const RobotModel& model, const SimState& s) {
  MotionInput m;
  m.base_pose = s.base_pose;
  m.base_twist = s.base_twist;
  m.q.resize(model.n, 2);
  if (model.n > 0) {
    m.q.col(0) = s.q;
    m.q.col(1) = s.qdot;
  }
  KinematicsCache c = forward_kinematics(model, m, 0);
  double E = 0.0;
  for (int b = 0; b < model.N; ++b) E += 0.5 * c.V(b, 0).dot(c.Pi(b, 0)) + model.mass[b] * model.gravity * c.C0[b].x().z();
  return E;
}

}  // namespace fbd
