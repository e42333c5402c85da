#include "fbd/kinematics.hpp"

#include <string>

namespace fbd {

void KinematicsCache::reserve(const RobotModel& model, int max_order) {
  if (max_order + 3 > kMaxBinom) throw DimensionError("derivative order exceeds the binomial table");
  int cap = std::max(capacity, max_order);
  if (C0.size() == static_cast<std::size_t>(model.N) && cap == capacity) return;
  capacity = cap;
  C0.assign(model.N, Pose::identity());
  F.assign(model.N, Pose::identity());
  S.resize(model.N, cap + 2);
  V.resize(model.N, cap + 2);
  Pi.resize(model.N, cap + 2);
  Vbias.resize(model.N, cap + 2);
  Pibias.resize(model.N, cap + 2);
  Wgrav.resize(model.N, cap + 2);
  M.resize(model.N, cap + 2);
  q.resize(model.N, cap + 3);
}

Vec6 screw_level(std::span<const Vec6> S, std::span<const Vec6> V, int k) {
  Vec6 out = Vec6::Zero();
  for (int i = 0; i < k; ++i) out += binomd(k - 1, i) * bracket(V[i], S[k - 1 - i]);
  return out;
}

Mat6 inertia_level(std::span<const Mat6> M, std::span<const Vec6> V, int k) {
  Mat6 X = Mat6::Zero();
  for (int i = 0; i < k; ++i) X.noalias() += binomd(k - 1, i) * (M[k - 1 - i] * little_adjoint(V[i]));
  // M symmetric, so adᵀ M = (M ad)ᵀ.
  return -(X + X.transpose());
}

Vec6 momentum_level(std::span<const Mat6> M, std::span<const Vec6> V, int k) {
  Vec6 out = Vec6::Zero();
  for (int i = 0; i <= k; ++i) out.noalias() += binomd(k, i) * (M[k - i] * V[i]);
  return out;
}

Vec6 bias_twist_level(std::span<const Vec6> S, std::span<const double> q, int k) {
  Vec6 out = Vec6::Zero();
  for (int i = 1; i <= k; ++i) out += (binomd(k, i) * q[k - i + 1]) * S[i];
  return out;
}

Vec6 bias_momentum_level(std::span<const Mat6> M, std::span<const Vec6> V, int k) {
  Vec6 out = Vec6::Zero();
  for (int i = 0; i < k; ++i) out.noalias() += binomd(k, i) * (M[k - i] * V[i]);
  return out;
}

Vec6 external_wrench_level(std::span<const Vec6> Wb, std::span<const Mat6> A, std::span<const Vec6> V,
                           std::span<const Vec6> W0, int k) {
  if (k == 0) return A[0] * Wb[0];
  Vec6 out = Vec6::Zero();
  for (int i = 0; i < k; ++i) {
    double c = binomd(k - 1, i);
    out -= c * cobracket(V[i], W0[k - 1 - i]);
    out.noalias() += c * (A[i] * Wb[k - i]);
  }
  return out;
}

void complete_level(const RobotModel& model, KinematicsCache& c, int b, int k) {
  const Vec6 G = gravity_vector(model.gravity);
  auto Vr = c.V.row(b);
  auto Mr = c.M.row(b);
  if (b != 0) c.S(b, k + 1) = screw_level(c.S.row(b), Vr, k + 1);
  c.M(b, k + 1) = inertia_level(Mr, Vr, k + 1);
  c.Wgrav(b, k + 1) = c.M(b, k + 1) * G;
  c.Vbias(b, k + 1) = b != 0 ? bias_twist_level(c.S.row(b), c.q.row(b), k + 1) : Vec6::Zero();
  c.Pibias(b, k + 1) = bias_momentum_level(Mr, Vr, k + 1);
  c.Pi(b, k) = c.M(b, 0) * c.V(b, k) + c.Pibias(b, k);
}

void forward_kinematics(const RobotModel& model, const MotionInput& in, int r, KinematicsCache& c) {
  if (r < 0) throw DimensionError("order must be non-negative");
  if (in.base_twist.cols() < r + 1)
    throw DimensionError("base twist stack has " + std::to_string(in.base_twist.cols()) + " orders, order " +
                         std::to_string(r) + " kinematics needs " + std::to_string(r + 1));
  if (in.q.rows() != model.n)
    throw DimensionError("joint stack has " + std::to_string(in.q.rows()) + " rows, model has " + std::to_string(model.n) +
                         " joints");
  if (in.q.cols() < r + 2)
    throw DimensionError("joint stack has " + std::to_string(in.q.cols()) + " orders, order " + std::to_string(r) +
                         " kinematics needs " + std::to_string(r + 2));
  c.reserve(model, r);
  c.order = r;
  const Vec6 G = gravity_vector(model.gravity);

  for (int b : model.preorder) {
    if (b == 0) {
      c.F[0] = in.base_pose;
      c.C0[0] = in.base_pose;
      c.S(0, 0).setZero();
      for (int k = 0; k <= r + 1; ++k) c.q(0, k) = 0.0;
    } else {
      int p = model.parent[b];
      for (int k = 0; k <= r + 1; ++k) c.q(b, k) = in.q(b - 1, k);
      c.F[b] = c.F[p] * exp_se3(model.Y[b], c.q(b, 0));
      c.C0[b] = c.F[b] * model.A0[b];
      c.S(b, 0) = adjoint_apply(c.F[b], model.Y[b]);
    }
    Mat6 Ainv = adjoint(c.C0[b].inverse());
    c.M(b, 0).noalias() = Ainv.transpose() * model.Mb[b] * Ainv;
    c.Wgrav(b, 0) = c.M(b, 0) * G;
    c.Vbias(b, 0).setZero();
    c.Pibias(b, 0).setZero();

    for (int m = 0; m <= r; ++m) {
      if (b == 0) {
        c.V(0, m) = in.base_twist.col(m);
      } else {
        c.V(b, m) = c.V(model.parent[b], m) + c.S(b, 0) * c.q(b, m + 1) + c.Vbias(b, m);
      }
      complete_level(model, c, b, m);
    }
  }
}

KinematicsCache forward_kinematics(const RobotModel& model, const MotionInput& input, int r) {
  KinematicsCache c;
  forward_kinematics(model, input, r, c);
  return c;
}

namespace {
void need(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}
}  // namespace

std::vector<Mat6> spatial_inertia_derivs(const Mat6& M_body, const Pose& C0, std::span<const Vec6> V, int r) {
  need(r >= 0 && static_cast<int>(V.size()) >= r, "spatial_inertia_derivs: need twist orders 0..r-1");
  std::vector<Mat6> M(r + 1);
  Mat6 Ainv = adjoint(C0.inverse());
  M[0] = Ainv.transpose() * M_body * Ainv;
  for (int k = 1; k <= r; ++k) M[k] = inertia_level(M, V, k);
  return M;
}

std::vector<Vec6> momentum_derivs(std::span<const Mat6> M, std::span<const Vec6> V, int r) {
  need(r >= 0 && static_cast<int>(M.size()) > r && static_cast<int>(V.size()) > r, "momentum_derivs: stacks shorter than r+1");
  std::vector<Vec6> P(r + 1);
  for (int k = 0; k <= r; ++k) P[k] = momentum_level(M, V, k);
  return P;
}

std::vector<Vec6> gravity_wrench_derivs(std::span<const Mat6> M, double g, int r) {
  need(r >= 0 && static_cast<int>(M.size()) > r, "gravity_wrench_derivs: inertia stack shorter than r+1");
  std::vector<Vec6> W(r + 1);
  Vec6 G = gravity_vector(g);
  for (int k = 0; k <= r; ++k) W[k] = M[k] * G;
  return W;
}

std::vector<Vec6> external_wrench_derivs(std::span<const Vec6> Wb, const Pose& C0, std::span<const Vec6> V, int r) {
  need(r >= 0 && static_cast<int>(Wb.size()) > r, "external_wrench_derivs: body wrench stack shorter than r+1");
  need(static_cast<int>(V.size()) >= r, "external_wrench_derivs: need twist orders 0..r-1");
  std::vector<Mat6> A = adjoint_inv_transpose_derivs(C0, V, std::max(r - 1, 0));
  std::vector<Vec6> W0(r + 1);
  for (int k = 0; k <= r; ++k) W0[k] = external_wrench_level(Wb, A, V, W0, k);
  return W0;
}

std::vector<Vec6> bias_twist_derivs(std::span<const Vec6> S, std::span<const double> q, int r) {
  need(r >= 0 && static_cast<int>(S.size()) > r && static_cast<int>(q.size()) > r, "bias_twist_derivs: stacks shorter than r+1");
  std::vector<Vec6> out(r + 1);
  for (int k = 0; k <= r; ++k) out[k] = bias_twist_level(S, q, k);
  return out;
}

std::vector<Vec6> bias_momentum_derivs(std::span<const Mat6> M, std::span<const Vec6> V, int r) {
  need(r >= 0 && static_cast<int>(M.size()) > r && static_cast<int>(V.size()) >= r,
       "bias_momentum_derivs: stacks shorter than required");
  std::vector<Vec6> out(r + 1);
  for (int k = 0; k <= r; ++k) out[k] = bias_momentum_level(M, V, k);
  return out;
}

}  // namespace fbd
