#include "fbd/liegroup.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace fbd;

namespace {

double maxabs(const auto& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hat is skew and reproduces the cross product") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Vec3 w = oracle::random_vec6(rng).head<3>(), u = oracle::random_vec6(rng).head<3>();
    Mat3 W = hat(w);
    CHECK(maxabs(W + W.transpose()) == 0.0);
    CHECK(maxabs(W * u - w.cross(u)) < 1e-15);
  }
}

TEST_CASE("pose group operations") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    Pose A = oracle::random_pose(rng), B = oracle::random_pose(rng);
    CHECK(maxabs((A * B).matrix() - A.matrix() * B.matrix()) < 1e-14);
    CHECK(maxabs((A * A.inverse()).matrix() - Mat4::Identity()) < 1e-14);
    CHECK(A.orthonormality_error() < 1e-12);
    Vec3 p(0.3, -0.2, 0.5);
    CHECK(maxabs(A.act(p) - (A.matrix() * p.homogeneous()).head<3>()) < 1e-14);
  }
}

TEST_CASE("exp_se3 agrees with the matrix exponential") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    Vec6 g = oracle::random_vec6(rng, 3.0);
    CHECK(maxabs(exp_se3(g).matrix() - oracle::expm(g)) < 1e-11);
  }
  SUBCASE("scale argument") {
    Vec6 g = oracle::random_vec6(rng);
    CHECK(maxabs(exp_se3(g, 0.7).matrix() - exp_se3(0.7 * g).matrix()) < 1e-15);
  }
}

TEST_CASE("exp_se3 is continuous across the small-angle switch") {
  Vec6 dir;
  dir << 0.6, -0.8, 0.0, 1.0, 2.0, -0.5;
  for (double th : {1e-12, 1e-9, 0.99e-8, 1.01e-8, 1e-7, 1e-5}) {
    Vec6 g = dir * th;
    CHECK(maxabs(exp_se3(g).matrix() - oracle::expm(g)) < 1e-15);
  }
}

TEST_CASE("exp_se3 output stays on SE(3) for large twists") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec6 g = oracle::random_vec6(rng);
    g *= U(rng) / g.norm();
    worst = std::max(worst, exp_se3(g).orthonormality_error());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("adjoint block structure and identities") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    Pose C = oracle::random_pose(rng), D = oracle::random_pose(rng);
    Mat6 A = adjoint(C);
    CHECK(maxabs(A.topRightCorner<3, 3>()) == 0.0);
    CHECK(maxabs(A.topLeftCorner<3, 3>() - C.R()) == 0.0);
    CHECK(maxabs(A.bottomLeftCorner<3, 3>() - hat(C.x()) * C.R()) < 1e-15);
    CHECK(maxabs(adjoint(C * D) - A * adjoint(D)) < 1e-12);
    CHECK(maxabs(A.inverse() - adjoint(C.inverse())) < 1e-12);
    Vec6 g = oracle::random_vec6(rng);
    CHECK(maxabs(adjoint_apply(C, g) - A * g) < 1e-14);
    // Ad_C g is the twist of C exp(g) C⁻¹.
    Mat4 X = C.matrix() * oracle::twist_matrix(g) * C.inverse().matrix();
    CHECK(maxabs(oracle::untwist(X) - A * g) < 1e-13);
  }
}

TEST_CASE("little adjoint and brackets") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) {
    Vec6 a = oracle::random_vec6(rng), b = oracle::random_vec6(rng), c = oracle::random_vec6(rng);
    CHECK(maxabs(little_adjoint(a) * a) < 1e-15);
    CHECK(maxabs(bracket(a, b) - little_adjoint(a) * b) < 1e-15);
    CHECK(maxabs(cobracket(a, b) - little_adjoint(a).transpose() * b) < 1e-15);
    // Matrix commutator of the 4×4 representations.
    Mat4 A = oracle::twist_matrix(a), B = oracle::twist_matrix(b);
    CHECK(maxabs(oracle::untwist(A * B - B * A) - bracket(a, b)) < 1e-14);
    Vec6 jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
    CHECK(maxabs(jac) < 1e-14);
  }
}

TEST_CASE("binomial table") {
  CHECK(binom(0, 0) == 1);
  CHECK(binom(5, 2) == 10);
  CHECK(binom(40, 20) == 137846528820LL);
  CHECK(binomd(7, 3) == 35.0);
  CHECK_THROWS_AS(binom(41, 1), std::out_of_range);
  CHECK_THROWS_AS(binom(3, 4), std::out_of_range);
  for (int n = 1; n <= kMaxBinom; ++n)
    for (int k = 1; k < n; ++k) CHECK(binom(n, k) == binom(n - 1, k - 1) + binom(n - 1, k));
}

TEST_CASE("adjoint-inverse-transpose derivatives match finite differences") {
  // C(t) = exp(t a) exp(t b) C0 has spatial twist V = a + Ad_{exp(ta)} b
  // and V⁽ᵏ⁾ = ad_aᵏ Ad_{exp(ta)} b for k ≥ 1.
  std::mt19937_64 rng(17);
  Vec6 a = oracle::random_vec6(rng, 0.8), b = oracle::random_vec6(rng, 0.8);
  Pose C0 = oracle::random_pose(rng);
  auto pose = [&](double t) { return exp_se3(a, t) * exp_se3(b, t) * C0; };
  auto twist_derivs = [&](double t, int r) {
    std::vector<Vec6> V(r + 1);
    Vec6 base = adjoint(exp_se3(a, t)) * b;
    V[0] = a + base;
    Vec6 cur = base;
    for (int k = 1; k <= r; ++k) V[k] = cur = little_adjoint(a) * cur;
    return V;
  };
  for (double t : {0.0, 0.4, 1.3}) {
    // The twist formula itself, against Ċ C⁻¹.
    Mat4 Cd = oracle::derivative([&](double s) -> Mat4 { return pose(s).matrix(); }, t, 1e-3);
    CHECK(maxabs(oracle::untwist(Cd * pose(t).inverse().matrix()) - twist_derivs(t, 0)[0]) < 1e-9);

    const int r = 3;
    auto A = adjoint_inv_transpose_derivs(pose(t), twist_derivs(t, r), r);
    for (int k = 1; k <= r; ++k) {
      Mat6 fd = oracle::derivative(
          [&](double s) -> Mat6 { return adjoint_inv_transpose_derivs(pose(s), twist_derivs(s, r), k - 1)[k - 1]; }, t, 1e-3);
      CHECK(oracle::rel(maxabs(fd - A[k]), maxabs(A[k])) <= 1e-5);
    }
  }
  CHECK_THROWS_AS(adjoint_inv_transpose_derivs(C0, std::vector<Vec6>(1), 3), std::invalid_argument);
}

TEST_CASE("co-adjoint is the transpose of the adjoint") {
  std::mt19937_64 rng(18);
  Pose C = oracle::random_pose(rng);
  Vec6 V = oracle::random_vec6(rng), W = oracle::random_vec6(rng);
  // Power pairing is invariant: (Ad_C V)·(Ad_{C⁻¹}ᵀ W) = V·W.
  CHECK(std::abs((adjoint(C) * V).dot(adjoint(C.inverse()).transpose() * W) - V.dot(W)) < 1e-13);
}
