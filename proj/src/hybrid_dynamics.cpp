#include "fbd/hybrid_dynamics.hpp"

#include <stdexcept>
#include <string>

namespace fbd {

void check_partition(const RobotModel& model, const HybridSpec& spec) {
  std::vector<int> owner(model.N, 0);
  auto mark = [&](const std::vector<int>& set, int tag) {
    for (int id : set) {
      if (id < 2 || id > model.N) throw std::invalid_argument("joint id " + std::to_string(id) + " is not in 2.." + std::to_string(model.N));
      if (owner[id - 1] != 0) throw std::invalid_argument("joint " + std::to_string(id) + " appears in more than one set");
      owner[id - 1] = tag;
    }
  };
  mark(spec.Jq, 1);
  mark(spec.Jtau, 2);
  for (int b = 1; b < model.N; ++b)
    if (owner[b] == 0) throw std::invalid_argument("joint " + std::to_string(b + 1) + " belongs to neither Jq nor Jtau");
  for (int id : spec.Jtau)
    if (model.zero_inertia(id - 1))
      throw std::invalid_argument("joint " + std::to_string(id) + " has a zero-inertia body and cannot be in Jtau");
}

namespace {

struct HybridInertia {
  std::vector<Mat6> MA;
  std::vector<Vec6> U;
  std::vector<double> D_inv;
};

void hybrid_inertia(const RobotModel& model, const KinematicsCache& c, const std::vector<bool>& motion, HybridInertia& h) {
  h.MA.resize(model.N);
  h.U.resize(model.N);
  h.D_inv.assign(model.N, 0.0);
  for (int b : model.postorder) {
    Mat6 MA = c.M(b, 0);
    for (int ch : model.children[b]) {
      MA += h.MA[ch];
      if (!motion[ch]) MA.noalias() -= h.D_inv[ch] * h.U[ch] * h.U[ch].transpose();
    }
    h.MA[b] = MA;
    if (b == 0) continue;
    h.U[b].noalias() = MA * c.S(b, 0);
    if (motion[b]) continue;
    double D = c.S(b, 0).dot(h.U[b]);
    if (!(std::abs(D) >= kDegenerateJointInertia))
      throw NumericalError("degenerate joint inertia S^T M^A S = " + std::to_string(D) + " at torque-driven joint of body " +
                           std::to_string(b + 1));
    h.D_inv[b] = 1.0 / D;
  }
}

double drift(const HybridInertia& a, const HybridInertia& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.MA.size(); ++i) d = std::max(d, (a.MA[i] - b.MA[i]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

HybridOutput hghyb(const RobotModel& model, const HybridState& st, const HybridSpec& spec, const LoadInput& loads, int r,
                   const ForwardDynamicsOptions& opt) {
  if (r < 0) throw DimensionError("order must be non-negative");
  check_partition(model, spec);
  check_loads(model, loads, r);
  const bool twist_given = spec.base_mode == BaseMode::TwistGiven;
  if (twist_given && spec.base_accel.cols() < r + 1) throw DimensionError("base twist derivative stack shorter than order r+1");
  if (!twist_given && spec.base_wrench.cols() < r + 1) throw DimensionError("base wrench stack shorter than order r");
  if (!spec.Jq.empty() && (spec.qdd.rows() != model.n || spec.qdd.cols() < r + 1))
    throw DimensionError("prescribed joint acceleration stack must be n x (r+1)");
  if (!spec.Jtau.empty() && (spec.tau.rows() != model.n || spec.tau.cols() < r + 1))
    throw DimensionError("prescribed joint torque stack must be n x (r+1)");

  std::vector<bool> motion(model.N, false);
  for (int id : spec.Jq) motion[id - 1] = true;

  MotionInput mi;
  KinematicsCache c;
  c.reserve(model, r);
  set_state_motion(model, st.base_pose, st.base_twist, st.q, st.qdot, r, mi);
  forward_kinematics(model, mi, 0, c);
  HybridInertia h, scratch;
  hybrid_inertia(model, c, motion, h);
  Eigen::LDLT<Mat6> ldlt;
  if (!twist_given) {
    ldlt.compute(h.MA[0]);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) throw NumericalError("base articulated inertia is singular");
  }

  const bool applied = loads.has_applied();
  const bool text = loads.has_tau_ext();
  LoadWorkspace lw;
  if (applied) {
    lw.W_app.resize(model.N, r + 1);
    lw.A.resize(model.N, r + 1);
  }
  DerivTable<Vec6> WA(model.N, r + 1), W(model.N, r + 1);
  std::vector<double> qt(model.N, 0.0), tt(model.N, 0.0);
  std::vector<Mat6> baseA(r + 1);

  HybridOutput out;
  out.V1.resize(6, r + 1);
  out.base_wrench.resize(6, r + 1);
  out.qdd.resize(model.n, r + 1);
  out.tau.resize(model.n, r + 1);
  out.inertia_order_drift = opt.recompute_inertia_each_order ? 0.0 : -1.0;

  for (int k = 0; k <= r; ++k) {
    if (opt.recompute_inertia_each_order) {
      hybrid_inertia(model, c, motion, scratch);
      out.inertia_order_drift = std::max(out.inertia_order_drift, drift(h, scratch));
    }
    for (int b = 0; b < model.N; ++b) {
      Vec6 w = c.Pibias(b, k + 1) - c.Wgrav(b, k);
      if (applied) {
        applied_wrench_level(c, loads, lw, b, k);
        w -= lw.W_app(b, k);
      }
      WA(b, k) = w;
    }

    for (int b : model.postorder) {
      if (b == 0) continue;
      const int j = b - 1;
      double s = 0.0;
      for (int m = 0; m < k; ++m) s += binomd(k, m) * c.S(b, k - m).dot(W(b, m));
      tt[b] = s;
      const Vec6& Vb = c.Vbias(b, k + 1);
      double qb;
      if (motion[b]) {
        qb = spec.qdd(j, k);
      } else {
        double u = spec.tau(j, k) - s - h.U[b].dot(Vb) - c.S(b, 0).dot(WA(b, k));
        if (text) u += loads.tau_ext(j, k);
        qb = h.D_inv[b] * u;
        qt[b] = qb;
      }
      WA(model.parent[b], k).noalias() += WA(b, k) + h.U[b] * qb + h.MA[b] * Vb;
    }

    Vec6 V1;
    if (twist_given) {
      V1 = spec.base_accel.col(k);
      out.base_wrench.col(k) = h.MA[0] * V1 + WA(0, k);
    } else {
      base_wrench_level(spec.base_wrench, spec.base_wrench_frame, c, baseA, out.base_wrench, k);
      V1 = ldlt.solve(out.base_wrench.col(k) - WA(0, k));
    }
    c.V(0, k + 1) = V1;
    W(0, k).noalias() = h.MA[0] * V1 + WA(0, k);
    out.V1.col(k) = V1;

    for (int b : model.preorder) {
      if (b == 0) continue;
      const int j = b - 1;
      const Vec6& Vp = c.V(model.parent[b], k + 1);
      double qdd = motion[b] ? spec.qdd(j, k) : -h.D_inv[b] * h.U[b].dot(Vp) + qt[b];
      c.q(b, k + 2) = qdd;
      Vec6 Vb = Vp + c.S(b, 0) * qdd + c.Vbias(b, k + 1);
      c.V(b, k + 1) = Vb;
      W(b, k).noalias() = h.MA[b] * Vb + WA(b, k);
      out.qdd(j, k) = qdd;
      if (motion[b]) {
        double Q = c.S(b, 0).dot(W(b, k)) + tt[b];
        out.tau(j, k) = text ? Q - loads.tau_ext(j, k) : Q;
      } else {
        out.tau(j, k) = spec.tau(j, k);
      }
    }

    if (k < r) {
      for (int b = 0; b < model.N; ++b) complete_level(model, c, b, k + 1);
      c.order = k + 1;
    }
  }

  out.V.resize(model.N, r + 2);
  for (int b = 0; b < model.N; ++b)
    for (int k = 0; k <= r + 1; ++k) out.V(b, k) = c.V(b, k);
  return out;
}

}  // namespace fbd
