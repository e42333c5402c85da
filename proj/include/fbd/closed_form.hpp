#pragma once

#include "fbd/inverse_dynamics.hpp"
#include "fbd/kinematics.hpp"

#include <Eigen/Core>

#include <vector>

namespace fbd {

// Dense stacked operators for one state. Block rows/columns follow body
// index; the first 6 generalized coordinates are the spatial base twist.
struct StackedOperators {
  int N = 0, n = 0;
  Eigen::MatrixXd Gp, Gc;      // 6N × 6N
  Eigen::MatrixXd S, Sdot;     // 6N × (6+n)
  Eigen::MatrixXd M, Mdot;     // 6N × 6N block-diagonal
  Eigen::MatrixXd adV;         // blockdiag ad_{Vⱼ}
  Eigen::MatrixXd AdinvT;      // blockdiag Ad_{C⁻¹ⱼ}ᵀ
  Eigen::VectorXd G;           // stacked gravity twist
  Eigen::VectorXd nu, nudot, nuddot;  // nuddot empty below cache order 2
  Eigen::VectorXd V;           // Gp S ν
};

struct EomTerms {
  Eigen::MatrixXd Mbar, C, Mbar_dot;
  Eigen::VectorXd h, g, tau_ext;
  Eigen::VectorXd hdot_bar, gdot, tau_ext_dot;  // order 1
};

StackedOperators assemble_operators(const RobotModel& model, const KinematicsCache& cache);

// Loads use body-frame applied wrenches, orders 0 (and 1 for eom_order1).
EomTerms eom_order0(const StackedOperators& ops, const LoadInput& loads);
void eom_order1(const StackedOperators& ops, const LoadInput& loads, EomTerms& terms);

Eigen::MatrixXd coriolis_matrix(const StackedOperators& ops);
Eigen::MatrixXd mass_matrix_derivative(const StackedOperators& ops);

// M̄ν̇ + h + g + τ_ext and M̄ν̈ + ḣ̄ + ġ + τ̇_ext.
Eigen::VectorXd residual_order0(const StackedOperators& ops, const EomTerms& t);
Eigen::VectorXd residual_order1(const StackedOperators& ops, const EomTerms& t);

// (Q₁⁽ᵏ⁾; Q⁽ᵏ⁾) from the recursive inverse dynamics.
Eigen::VectorXd stacked_forces(const GeneralizedForces& f, int k);

// C⁽ʳ⁾ = Σ binom(r−1,k) [V⁽ᵏ⁾] C⁽ʳ⁻¹⁻ᵏ⁾ as 4×4 matrices, orders 0..r.
std::vector<Mat4> pose_tangent_derivs(const Pose& C, std::span<const Vec6> V_derivs, int r);

}  // namespace fbd
