#include "fbd/closed_form.hpp"

#include "stack_view.hpp"

namespace fbd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

StackedOperators assemble_operators(const RobotModel& model, const KinematicsCache& c) {
  if (c.order < 1) throw DimensionError("assemble_operators needs kinematics of order 1 or more");
  const int N = model.N, n = model.n, D = 6 * N, G = 6 + n;
  StackedOperators o;
  o.N = N;
  o.n = n;
  o.Gp = MatrixXd::Zero(D, D);
  for (int i = 0; i < N; ++i)
    for (int j = i; j != -1; j = model.parent[j]) o.Gp.block<6, 6>(6 * i, 6 * j).setIdentity();
  o.Gc = o.Gp.transpose();

  o.S = MatrixXd::Zero(D, G);
  o.S.topLeftCorner<6, 6>().setIdentity();
  o.M = MatrixXd::Zero(D, D);
  o.AdinvT = MatrixXd::Zero(D, D);
  o.G = VectorXd::Zero(D);
  for (int b = 0; b < N; ++b) {
    if (b > 0) o.S.block<6, 1>(6 * b, 5 + b) = c.S(b, 0);
    Mat6 Ainv = adjoint(c.C0[b].inverse());
    o.M.block<6, 6>(6 * b, 6 * b) = Ainv.transpose() * model.Mb[b] * Ainv;
    o.AdinvT.block<6, 6>(6 * b, 6 * b) = Ainv.transpose();
    o.G.segment<6>(6 * b) = gravity_vector(model.gravity);
  }

  auto gen = [&](int k) {
    VectorXd v(G);
    v.head<6>() = c.V(0, k);
    for (int b = 1; b < N; ++b) v[5 + b] = c.q(b, k + 1);
    return v;
  };
  o.nu = gen(0);
  o.nudot = gen(1);
  if (c.order >= 2) o.nuddot = gen(2);

  o.V = o.Gp * o.S * o.nu;
  o.adV = MatrixXd::Zero(D, D);
  for (int b = 0; b < N; ++b) o.adV.block<6, 6>(6 * b, 6 * b) = little_adjoint(o.V.segment<6>(6 * b));
  o.Sdot = o.adV * o.S;
  o.Sdot.topLeftCorner<6, 6>().setZero();
  o.Mdot = -(o.M * o.adV + o.adV.transpose() * o.M);
  return o;
}

namespace {

VectorXd stacked_body_wrench(const StackedOperators& o, const LoadInput& loads, int k) {
  VectorXd W = VectorXd::Zero(6 * o.N);
  if (!loads.has_applied()) return W;
  if (loads.applied_frame != WrenchFrame::Body) throw DimensionError("closed-form loads must be body-frame wrenches");
  for (int b = 0; b < o.N; ++b) {
    if (loads.applied[b].cols() <= k) throw DimensionError("applied wrench stack too short for the closed form");
    W.segment<6>(6 * b) = loads.applied[b].col(k);
  }
  return W;
}

}  // namespace

MatrixXd coriolis_matrix(const StackedOperators& o) {
  MatrixXd A = o.Gc * o.M * o.Gp;
  return o.S.transpose() * A * o.Sdot - o.S.transpose() * o.Gc * o.adV.transpose() * o.M * o.Gp * o.S;
}

MatrixXd mass_matrix_derivative(const StackedOperators& o) {
  MatrixXd A = o.Gc * o.M * o.Gp;
  return o.Sdot.transpose() * A * o.S + o.S.transpose() * o.Gc * o.Mdot * o.Gp * o.S + o.S.transpose() * A * o.Sdot;
}

EomTerms eom_order0(const StackedOperators& o, const LoadInput& loads) {
  EomTerms t;
  MatrixXd A = o.Gc * o.M * o.Gp;
  MatrixXd St = o.S.transpose();
  t.Mbar = St * A * o.S;
  t.h = St * A * o.Sdot * o.nu - St * o.Gc * o.adV.transpose() * o.M * o.V;
  t.g = -St * o.Gc * o.M * o.G;
  t.tau_ext = -St * o.Gc * o.AdinvT * stacked_body_wrench(o, loads, 0);
  t.C = coriolis_matrix(o);
  t.Mbar_dot = mass_matrix_derivative(o);
  return t;
}

void eom_order1(const StackedOperators& o, const LoadInput& loads, EomTerms& t) {
  MatrixXd St = o.S.transpose();
  MatrixXd Sdt = o.Sdot.transpose();
  MatrixXd adT = o.adV.transpose();
  const int N = o.N;

  VectorXd Vd = o.Gp * (o.S * o.nudot + o.Sdot * o.nu);
  MatrixXd adVd = MatrixXd::Zero(6 * N, 6 * N);
  for (int b = 0; b < N; ++b) adVd.block<6, 6>(6 * b, 6 * b) = little_adjoint(Vd.segment<6>(6 * b));
  MatrixXd Sddot = (adVd + o.adV * o.adV) * o.S;
  Sddot.leftCols<6>().setZero();
  // V̈ without its Gp S ν̈ part.
  VectorXd Vdd_rest = o.Gp * (2.0 * o.Sdot * o.nudot + Sddot * o.nu);
  VectorXd Pi = o.M * o.V;
  VectorXd Pid = o.M * Vd - adT * Pi;
  VectorXd Pidd_rest = o.M * (Vdd_rest - o.adV * Vd) - 2.0 * adT * Pid - (adVd + o.adV * o.adV).transpose() * Pi;
  VectorXd Pidd_tilde = o.Gc * Pidd_rest;

  t.hdot_bar = Sdt * (o.Gc * o.M * o.Gp * o.S * o.nudot + o.Gc * o.M * o.Gp * o.Sdot * o.nu - o.Gc * adT * o.M * o.V) +
               St * Pidd_tilde;
  t.gdot = -Sdt * o.Gc * o.M * o.G + St * o.Gc * (o.M * o.adV + adT * o.M) * o.G;
  VectorXd Wb = stacked_body_wrench(o, loads, 0);
  VectorXd Wbd = stacked_body_wrench(o, loads, 1);
  VectorXd W0 = o.AdinvT * Wb;
  t.tau_ext_dot = -Sdt * o.Gc * W0 + St * o.Gc * adT * W0 - St * o.Gc * o.AdinvT * Wbd;
}

VectorXd residual_order0(const StackedOperators& o, const EomTerms& t) { return t.Mbar * o.nudot + t.h + t.g + t.tau_ext; }

VectorXd residual_order1(const StackedOperators& o, const EomTerms& t) {
  if (o.nuddot.size() == 0) throw DimensionError("order-1 residual needs kinematics of order 2");
  return t.Mbar * o.nuddot + t.hdot_bar + t.gdot + t.tau_ext_dot;
}

VectorXd stacked_forces(const GeneralizedForces& f, int k) {
  VectorXd v(6 + f.Q.rows());
  v.head<6>() = f.Q1.col(k);
  v.tail(f.Q.rows()) = f.Q.col(k);
  return v;
}

std::vector<Mat4> pose_tangent_derivs(const Pose& C, std::span<const Vec6> V, int r) {
  if (r < 0 || static_cast<int>(V.size()) < r) throw DimensionError("pose_tangent_derivs: need twist orders 0..r-1");
  std::vector<Mat4> out(r + 1);
  out[0] = C.matrix();
  for (int k = 1; k <= r; ++k) {
    Mat4 s = Mat4::Zero();
    for (int i = 0; i < k; ++i) {
      Mat4 X = Mat4::Zero();
      X.topLeftCorner<3, 3>() = hat(V[i].head<3>());
      X.topRightCorner<3, 1>() = V[i].tail<3>();
      s += binomd(k - 1, i) * X * out[k - 1 - i];
    }
    out[k] = s;
  }
  return out;
}

}  // namespace fbd
