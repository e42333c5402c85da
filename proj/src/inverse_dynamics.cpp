#include "fbd/inverse_dynamics.hpp"

#include "stack_view.hpp"

#include <string>

namespace fbd {

void check_loads(const RobotModel& model, const LoadInput& loads, int r) {
  if (loads.has_applied()) {
    if (static_cast<int>(loads.applied.size()) != model.N)
      throw DimensionError("applied wrenches given for " + std::to_string(loads.applied.size()) + " bodies, model has " +
                           std::to_string(model.N));
    for (int b = 0; b < model.N; ++b)
      if (loads.applied[b].cols() < r + 1)
        throw DimensionError("applied wrench stack of body " + std::to_string(b + 1) + " shorter than order " + std::to_string(r));
  }
  if (loads.has_tau_ext() && (loads.tau_ext.rows() != model.n || loads.tau_ext.cols() < r + 1))
    throw DimensionError("external joint torque stack must be n x (r+1)");
}

void applied_wrench_level(const KinematicsCache& c, const LoadInput& loads, LoadWorkspace& ws, int b, int k) {
  if (loads.applied_frame == WrenchFrame::Spatial) {
    ws.W_app(b, k) = loads.applied[b].col(k);
    return;
  }
  if (k == 0) ws.A(b, 0) = adjoint(c.C0[b].inverse()).transpose();
  else if (k >= 2) ws.A(b, k - 1) = coadjoint_level(ws.A.row(b), c.V.row(b), k - 1);
  ws.W_app(b, k) = external_wrench_level(columns(loads.applied[b]), ws.A.row(b), c.V.row(b), ws.W_app.row(b), k);
}

void hgrne(const RobotModel& model, const KinematicsCache& c, const LoadInput& loads, int r, GeneralizedForces& out,
           LoadWorkspace& ws) {
  if (r < 0) throw DimensionError("order must be non-negative");
  if (c.order < r + 1)
    throw DimensionError("order " + std::to_string(r) + " inverse dynamics needs kinematics of order " + std::to_string(r + 1) +
                         ", cache holds " + std::to_string(c.order));
  check_loads(model, loads, r);
  const bool applied = loads.has_applied();
  const bool text = loads.has_tau_ext();
  out.Q1.resize(6, r + 1);
  out.Q.resize(model.n, r + 1);
  out.tau.resize(model.n, r + 1);
  out.W.resize(model.N, r + 1);
  if (applied) {
    ws.W_app.resize(model.N, r + 1);
    ws.A.resize(model.N, r + 1);
  }

  for (int b : model.postorder) {
    for (int k = 0; k <= r; ++k) {
      Vec6 W = c.Pi(b, k + 1) - c.Wgrav(b, k);
      if (applied) {
        applied_wrench_level(c, loads, ws, b, k);
        W -= ws.W_app(b, k);
      }
      for (int ch : model.children[b]) W += out.W(ch, k);
      out.W(b, k) = W;
    }
    if (b == 0) continue;
    const int j = b - 1;
    for (int k = 0; k <= r; ++k) {
      double Q = 0.0;
      for (int m = 0; m <= k; ++m) Q += binomd(k, m) * c.S(b, k - m).dot(out.W(b, m));
      out.Q(j, k) = Q;
      out.tau(j, k) = text ? Q - loads.tau_ext(j, k) : Q;
    }
  }
  for (int k = 0; k <= r; ++k) out.Q1.col(k) = out.W(0, k);
}

GeneralizedForces hgrne(const RobotModel& model, const KinematicsCache& cache, const LoadInput& loads, int r) {
  GeneralizedForces out;
  LoadWorkspace ws;
  hgrne(model, cache, loads, r, out, ws);
  return out;
}

GeneralizedForces inverse_dynamics(const RobotModel& model, const MotionInput& motion, const LoadInput& loads, int r) {
  KinematicsCache c = forward_kinematics(model, motion, r + 1);
  return hgrne(model, c, loads, r);
}

Mat6X base_wrench_to_body_frame(const Mat6X& Q1, const Pose& C, const Mat6X& V1, int r) {
  if (Q1.cols() < r + 1 || V1.cols() < r) throw DimensionError("base_wrench_to_body_frame: stacks too short");
  std::vector<Mat6> B(r + 1);
  B[0] = adjoint(C).transpose();
  for (int i = 1; i <= r; ++i) {
    B[i].setZero();
    for (int j = 0; j < i; ++j) B[i].noalias() += binomd(i - 1, j) * (B[i - 1 - j] * little_adjoint(V1.col(j)).transpose());
  }
  Mat6X Wb(6, r + 1);
  for (int k = 0; k <= r; ++k) {
    Vec6 w = Vec6::Zero();
    for (int i = 0; i <= k; ++i) w.noalias() += binomd(k, i) * (B[i] * Q1.col(k - i));
    Wb.col(k) = w;
  }
  return Wb;
}

Mat6X base_wrench_to_spatial_frame(const Mat6X& Wb, const Pose& C, const Mat6X& V1, int r) {
  if (Wb.cols() < r + 1 || V1.cols() < r) throw DimensionError("base_wrench_to_spatial_frame: stacks too short");
  auto W0 = external_wrench_derivs(columns(Wb), C, columns(V1), r);
  Mat6X out(6, r + 1);
  for (int k = 0; k <= r; ++k) out.col(k) = W0[k];
  return out;
}

}  // namespace fbd
