#include "fbd/forward_dynamics.hpp"

#include "stack_view.hpp"

#include <string>

namespace fbd {

void articulated_inertia(const RobotModel& model, const KinematicsCache& c, ArticulatedState& art) {
  art.MA.resize(model.N);
  art.U.resize(model.N);
  art.D_inv.resize(model.N);
  for (int b : model.postorder) {
    Mat6 MA = c.M(b, 0);
    for (int ch : model.children[b]) MA.noalias() += art.MA[ch] - art.D_inv[ch] * art.U[ch] * art.U[ch].transpose();
    art.MA[b] = MA;
    if (b == 0) {
      art.U[0].setZero();
      art.D_inv[0] = 0.0;
      continue;
    }
    art.U[b].noalias() = MA * c.S(b, 0);
    double D = c.S(b, 0).dot(art.U[b]);
    if (!(std::abs(D) >= kDegenerateJointInertia))
      throw NumericalError("degenerate joint inertia S^T M^A S = " + std::to_string(D) + " at joint of body " +
                           std::to_string(b + 1));
    art.D_inv[b] = 1.0 / D;
  }
}

ArticulatedState articulated_inertia(const RobotModel& model, const KinematicsCache& cache) {
  ArticulatedState art;
  articulated_inertia(model, cache, art);
  return art;
}

void set_state_motion(const RobotModel& model, const Pose& C, const Vec6& V1, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& qdot, int r, MotionInput& motion) {
  (void)r;
  if (q.size() != model.n || qdot.size() != model.n)
    throw DimensionError("joint state must have " + std::to_string(model.n) + " entries");
  motion.base_pose = C;
  motion.base_twist.resize(6, 1);
  motion.base_twist.col(0) = V1;
  motion.q.resize(model.n, 2);
  motion.q.col(0) = q;
  motion.q.col(1) = qdot;
}

void base_wrench_level(const Mat6X& given, WrenchFrame frame, const KinematicsCache& c, std::vector<Mat6>& A, Mat6X& spatial,
                       int k) {
  if (frame == WrenchFrame::Spatial) {
    spatial.col(k) = given.col(k);
    return;
  }
  if (k == 0) A[0] = adjoint(c.C0[0].inverse()).transpose();
  else if (k >= 2) A[k - 1] = coadjoint_level(A, c.V.row(0), k - 1);
  spatial.col(k) = external_wrench_level(columns(given), A, c.V.row(0), columns(spatial), k);
}

namespace {

double max_inertia_drift(const ArticulatedState& a, const ArticulatedState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.MA.size(); ++i) d = std::max(d, (a.MA[i] - b.MA[i]).cwiseAbs().maxCoeff());
  for (std::size_t i = 1; i < a.D_inv.size(); ++i) d = std::max(d, std::abs(a.D_inv[i] - b.D_inv[i]));
  return d;
}

}  // namespace

void hgabi(const RobotModel& model, const ForwardDynamicsInput& in, int r, ForwardDynamicsWorkspace& ws, AccelOutput& out,
           const ForwardDynamicsOptions& opt) {
  if (r < 0) throw DimensionError("order must be non-negative");
  if (in.base_wrench.cols() < r + 1)
    throw DimensionError("base wrench stack shorter than order " + std::to_string(r));
  if (in.tau.rows() != model.n || in.tau.cols() < r + 1)
    throw DimensionError("joint torque stack must be " + std::to_string(model.n) + " x " + std::to_string(r + 1) + " or longer");
  check_loads(model, in.loads, r);

  KinematicsCache& c = ws.cache;
  ArticulatedState& art = ws.art;
  c.reserve(model, r);
  set_state_motion(model, in.base_pose, in.base_twist, in.q, in.qdot, r, ws.motion);
  forward_kinematics(model, ws.motion, 0, c);
  articulated_inertia(model, c, art);
  ws.ldlt.compute(art.MA[0]);
  if (ws.ldlt.info() != Eigen::Success || !(ws.ldlt.rcond() > 1e-14))
    throw NumericalError("base articulated inertia is singular");

  art.WA.resize(model.N, r + 1);
  art.W.resize(model.N, r + 1);
  art.q_tilde.resize(model.N);
  const bool applied = in.loads.has_applied();
  const bool text = in.loads.has_tau_ext();
  if (applied) {
    ws.loads.W_app.resize(model.N, r + 1);
    ws.loads.A.resize(model.N, r + 1);
  }
  ws.base_A.resize(r + 1);
  ws.base_wrench.resize(6, r + 1);
  out.V1.resize(6, r + 1);
  out.qdd.resize(model.n, r + 1);
  out.base_residual = 0.0;
  out.inertia_order_drift = opt.recompute_inertia_each_order ? 0.0 : -1.0;

  for (int k = 0; k <= r; ++k) {
    if (opt.recompute_inertia_each_order) {
      articulated_inertia(model, c, ws.scratch);
      out.inertia_order_drift = std::max(out.inertia_order_drift, max_inertia_drift(art, ws.scratch));
    }
    base_wrench_level(in.base_wrench, in.base_wrench_frame, c, ws.base_A, ws.base_wrench, k);

    for (int b = 0; b < model.N; ++b) {
      Vec6 WA = c.Pibias(b, k + 1) - c.Wgrav(b, k);
      if (applied) {
        applied_wrench_level(c, in.loads, ws.loads, b, k);
        WA -= ws.loads.W_app(b, k);
      }
      art.WA(b, k) = WA;
    }

    for (int b : model.postorder) {
      if (b == 0) continue;
      const int j = b - 1;
      const Vec6& S = c.S(b, 0);
      const Vec6& U = art.U[b];
      double tt = 0.0;
      for (int m = 0; m < k; ++m) tt += binomd(k, m) * c.S(b, k - m).dot(art.W(b, m));
      const Vec6& Vb = c.Vbias(b, k + 1);
      double u = in.tau(j, k) - tt - U.dot(Vb) - S.dot(art.WA(b, k));
      if (text) u += in.loads.tau_ext(j, k);
      double qt = art.D_inv[b] * u;
      art.q_tilde[b] = qt;
      art.WA(model.parent[b], k).noalias() += art.WA(b, k) + U * qt + art.MA[b] * Vb;
    }

    const Vec6 Wprop = ws.base_wrench.col(k);
    Vec6 x = ws.ldlt.solve(Wprop - art.WA(0, k));
    c.V(0, k + 1) = x;
    art.W(0, k).noalias() = art.MA[0] * x + art.WA(0, k);
    out.base_residual = std::max(out.base_residual, (art.W(0, k) - Wprop).norm() / std::max(1.0, Wprop.norm()));

    for (int b : model.preorder) {
      if (b == 0) continue;
      const Vec6& Vp = c.V(model.parent[b], k + 1);
      double qdd = -art.D_inv[b] * art.U[b].dot(Vp) + art.q_tilde[b];
      c.q(b, k + 2) = qdd;
      Vec6 Vb = Vp + c.S(b, 0) * qdd + c.Vbias(b, k + 1);
      c.V(b, k + 1) = Vb;
      art.W(b, k).noalias() = art.MA[b] * Vb + art.WA(b, k);
      out.qdd(b - 1, k) = qdd;
    }
    out.V1.col(k) = x;

    if (k < r) {
      for (int b = 0; b < model.N; ++b) complete_level(model, c, b, k + 1);
      c.order = k + 1;
    }
  }

  out.V.resize(model.N, r + 2);
  for (int b = 0; b < model.N; ++b)
    for (int k = 0; k <= r + 1; ++k) out.V(b, k) = c.V(b, k);
}

AccelOutput hgabi(const RobotModel& model, const ForwardDynamicsInput& in, int r, const ForwardDynamicsOptions& opt) {
  ForwardDynamicsWorkspace ws;
  AccelOutput out;
  hgabi(model, in, r, ws, out, opt);
  return out;
}

}  // namespace fbd
