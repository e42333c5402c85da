#pragma once

#include "fbd/liegroup.hpp"
#include "fbd/model.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

namespace fbd {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-per-item table of derivative stacks, stored contiguously.
template <class T>
class DerivTable {
 public:
  DerivTable() = default;
  DerivTable(int items, int depth) { resize(items, depth); }

  // Keeps storage when the shape is unchanged.
  void resize(int items, int depth) {
    if (items == items_ && depth == depth_) return;
    items_ = items;
    depth_ = depth;
    data_.assign(static_cast<std::size_t>(items) * depth, zero());
  }
  void set_zero() { std::fill(data_.begin(), data_.end(), zero()); }

  int items() const { return items_; }
  int depth() const { return depth_; }

  T& operator()(int i, int k) { return data_[static_cast<std::size_t>(i) * depth_ + k]; }
  const T& operator()(int i, int k) const { return data_[static_cast<std::size_t>(i) * depth_ + k]; }

  std::span<T> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * depth_, static_cast<std::size_t>(depth_)}; }
  std::span<const T> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * depth_, static_cast<std::size_t>(depth_)};
  }

 private:
  static T zero() {
    if constexpr (std::is_arithmetic_v<T>) return T(0);
    else return T::Zero();
  }
  std::vector<T> data_;
  int items_ = 0, depth_ = 0;
};

// Base pose, base twist derivatives (columns 0..L−1) and joint derivatives
// q⁽⁰⁾..q⁽ᴸ⁾ (n rows, L+1 columns). Kinematics of order r reads L ≥ r+1.
struct MotionInput {
  Pose base_pose;
  Mat6X base_twist;
  Eigen::MatrixXd q;

  int max_order() const { return static_cast<int>(base_twist.cols()) - 1; }
};

// Everything the forward kinematics produces for one state. "order" is the
// highest twist derivative filled; every stack holds one level more where the
// formulas allow it (S, M, bias terms, gravity wrench), and the twist stack
// has a spare slot for the level forward dynamics solves next.
struct KinematicsCache {
  int order = -1;
  int capacity = -1;
  std::vector<Pose> C0, F;
  DerivTable<Vec6> S, V, Pi, Vbias, Pibias, Wgrav;
  DerivTable<Mat6> M;
  DerivTable<double> q;  // q(b, k), rows by body

  void reserve(const RobotModel& model, int max_order);
};

void forward_kinematics(const RobotModel& model, const MotionInput& input, int r, KinematicsCache& cache);
KinematicsCache forward_kinematics(const RobotModel& model, const MotionInput& input, int r);

// Completes level k of body b (S, M, bias and gravity at k+1, Π at k) once
// V⁽ᵏ⁾ and q⁽ᵏ⁺¹⁾ are stored. Used to extend a cache one order at a time.
void complete_level(const RobotModel& model, KinematicsCache& cache, int b, int k);

// Single-level recursions; stacks hold the lower orders they read.
Vec6 screw_level(std::span<const Vec6> S, std::span<const Vec6> V, int k);
Mat6 inertia_level(std::span<const Mat6> M, std::span<const Vec6> V, int k);
Vec6 momentum_level(std::span<const Mat6> M, std::span<const Vec6> V, int k);
Vec6 bias_twist_level(std::span<const Vec6> S, std::span<const double> q, int k);
Vec6 bias_momentum_level(std::span<const Mat6> M, std::span<const Vec6> V, int k);
// (W⁰)⁽ᵏ⁾ from body-frame Wᵇ⁽⁰..ᵏ⁾, (Ad_{C⁻¹}ᵀ)⁽⁰..ᵏ⁻¹⁾, V⁽⁰..ᵏ⁻¹⁾ and (W⁰)⁽⁰..ᵏ⁻¹⁾.
Vec6 external_wrench_level(std::span<const Vec6> Wb, std::span<const Mat6> A, std::span<const Vec6> V,
                           std::span<const Vec6> W0, int k);

inline Vec6 gravity_vector(double g) {
  Vec6 G = Vec6::Zero();
  G[5] = -g;
  return G;
}

std::vector<Mat6> spatial_inertia_derivs(const Mat6& M_body, const Pose& C0, std::span<const Vec6> V_derivs, int r);
std::vector<Vec6> momentum_derivs(std::span<const Mat6> M_derivs, std::span<const Vec6> V_derivs, int r);
std::vector<Vec6> gravity_wrench_derivs(std::span<const Mat6> M_derivs, double g, int r);
std::vector<Vec6> external_wrench_derivs(std::span<const Vec6> W_body_derivs, const Pose& C0, std::span<const Vec6> V_derivs,
                                         int r);
std::vector<Vec6> bias_twist_derivs(std::span<const Vec6> S_derivs, std::span<const double> q_derivs, int r);
std::vector<Vec6> bias_momentum_derivs(std::span<const Mat6> M_derivs, std::span<const Vec6> V_derivs, int r);

}  // namespace fbd
