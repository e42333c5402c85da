#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fbd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat4 = Eigen::Matrix4d;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Twists and wrenches are ordered (angular; linear) / (moment; force).
using Twist = Vec6;
using Wrench = Vec6;

inline Vec3 angular(const Vec6& g) { return g.head<3>(); }
inline Vec3 linear(const Vec6& g) { return g.tail<3>(); }

inline Vec6 make_twist(const Vec3& w, const Vec3& v) {
  Vec6 g;
  g << w, v;
  return g;
}

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

class Pose {
 public:
  Pose() : R_(Mat3::Identity()), x_(Vec3::Zero()) {}
  Pose(const Mat3& R, const Vec3& x) : R_(R), x_(x) {}

  static Pose identity() { return {}; }
  static Pose translation(const Vec3& x) { return {Mat3::Identity(), x}; }
  static Pose rotation(const Mat3& R) { return {R, Vec3::Zero()}; }
  static Pose from_matrix(const Mat4& T) {
    return {T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>()};
  }

  const Mat3& R() const { return R_; }
  const Vec3& x() const { return x_; }

  Pose operator*(const Pose& o) const { return {R_ * o.R_, R_ * o.x_ + x_}; }
  Vec3 act(const Vec3& p) const { return R_ * p + x_; }
  Pose inverse() const {
    Mat3 Rt = R_.transpose();
    return {Rt, -(Rt * x_)};
  }

  Mat4 matrix() const {
    Mat4 T = Mat4::Identity();
    T.topLeftCorner<3, 3>() = R_;
    T.topRightCorner<3, 1>() = x_;
    return T;
  }

  // Largest deviation of R from SO(3): max(|RᵀR − I|, |det R − 1|).
  double orthonormality_error() const {
    double e = (R_.transpose() * R_ - Mat3::Identity()).cwiseAbs().maxCoeff();
    return std::max(e, std::abs(R_.determinant() - 1.0));
  }

 private:
  Mat3 R_;
  Vec3 x_;
};

// exp([g]·scale) by Rodrigues, with a Taylor series near the identity.
inline Pose exp_se3(const Vec6& g, double scale = 1.0) {
  Vec3 w = g.head<3>() * scale;
  Vec3 v = g.tail<3>() * scale;
  double th2 = w.squaredNorm();
  double th = std::sqrt(th2);
  double a, b, c;
  if (th < 1e-8) {
    double th4 = th2 * th2, th6 = th4 * th2;
    a = 1.0 - th2 / 6.0 + th4 / 120.0 - th6 / 5040.0;
    b = 0.5 - th2 / 24.0 + th4 / 720.0 - th6 / 40320.0;
    c = 1.0 / 6.0 - th2 / 120.0 + th4 / 5040.0 - th6 / 362880.0;
  } else {
    double s = std::sin(th), co = std::cos(th);
    a = s / th;
    b = (1.0 - co) / th2;
    c = (th - s) / (th2 * th);
  }
  Mat3 W = hat(w);
  Mat3 W2 = W * W;
  Mat3 R = Mat3::Identity() + a * W + b * W2;
  Mat3 Vm = Mat3::Identity() + b * W + c * W2;
  return {R, Vm * v};
}

// Ad_C = [[R, 0], [[x]R, R]]
inline Mat6 adjoint(const Pose& C) {
  Mat6 A;
  A.topLeftCorner<3, 3>() = C.R();
  A.topRightCorner<3, 3>().setZero();
  A.bottomLeftCorner<3, 3>() = hat(C.x()) * C.R();
  A.bottomRightCorner<3, 3>() = C.R();
  return A;
}

// ad_g = [[[w], 0], [[v], [w]]]
inline Mat6 little_adjoint(const Vec6& g) {
  Mat6 A;
  Mat3 W = hat(g.head<3>());
  A.topLeftCorner<3, 3>() = W;
  A.topRightCorner<3, 3>().setZero();
  A.bottomLeftCorner<3, 3>() = hat(g.tail<3>());
  A.bottomRightCorner<3, 3>() = W;
  return A;
}

// Ad_C g without forming the matrix.
inline Vec6 adjoint_apply(const Pose& C, const Vec6& g) {
  Vec3 w = C.R() * g.head<3>();
  return make_twist(w, C.x().cross(w) + C.R() * g.tail<3>());
}

// ad_a b
inline Vec6 bracket(const Vec6& a, const Vec6& b) {
  Vec3 wa = a.head<3>(), va = a.tail<3>();
  Vec3 wb = b.head<3>(), vb = b.tail<3>();
  return make_twist(wa.cross(wb), va.cross(wb) + wa.cross(vb));
}

// adᵀ_V W
inline Vec6 cobracket(const Vec6& V, const Vec6& W) {
  Vec3 w = V.head<3>(), v = V.tail<3>();
  Vec3 m = W.head<3>(), f = W.tail<3>();
  return make_twist(m.cross(w) + f.cross(v), f.cross(w));
}

// Exact binomial coefficients from a Pascal table, 0 ≤ k ≤ n ≤ 40.
inline constexpr int kMaxBinom = 40;

namespace detail {
struct Pascal {
  std::array<std::array<std::int64_t, kMaxBinom + 1>, kMaxBinom + 1> v{};
  std::array<std::array<double, kMaxBinom + 1>, kMaxBinom + 1> d{};
  constexpr Pascal() {
    for (int n = 0; n <= kMaxBinom; ++n) {
      v[n][0] = 1;
      for (int k = 1; k <= n; ++k) v[n][k] = v[n - 1][k - 1] + (k < n ? v[n - 1][k] : 0);
      for (int k = 0; k <= n; ++k) d[n][k] = static_cast<double>(v[n][k]);
    }
  }
};
inline constexpr Pascal kPascal{};
}  // namespace detail

inline std::int64_t binom(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > kMaxBinom) throw std::out_of_range("binom: arguments out of range");
  return detail::kPascal.v[n][k];
}

// Unchecked floating-point variant for inner loops.
inline double binomd(int n, int k) { return detail::kPascal.d[n][k]; }

// (Ad_{C⁻¹}ᵀ)⁽ᵏ⁾ given (Ad_{C⁻¹}ᵀ)⁽⁰..ᵏ⁻¹⁾ and V⁽⁰..ᵏ⁻¹⁾.
inline Mat6 coadjoint_level(std::span<const Mat6> A, std::span<const Vec6> V, int k) {
  Mat6 out = Mat6::Zero();
  for (int i = 0; i < k; ++i) out.noalias() -= binomd(k - 1, i) * (little_adjoint(V[i]).transpose() * A[k - 1 - i]);
  return out;
}

inline std::vector<Mat6> adjoint_inv_transpose_derivs(const Pose& C, std::span<const Vec6> V_derivs, int r) {
  if (r < 0 || static_cast<int>(V_derivs.size()) < r)
    throw std::invalid_argument("adjoint_inv_transpose_derivs: need twist derivatives of orders 0..r-1");
  std::vector<Mat6> A(r + 1);
  A[0] = adjoint(C.inverse()).transpose();
  for (int k = 1; k <= r; ++k) A[k] = coadjoint_level(A, V_derivs, k);
  return A;
}

}  // namespace fbd
