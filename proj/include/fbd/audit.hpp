#pragma once

#include "fbd/forward_dynamics.hpp"
#include "fbd/inverse_dynamics.hpp"
#include "fbd/io.hpp"
#include "fbd/tilthex.hpp"

#include <string>
#include <type_traits>
#include <vector>

namespace fbd {

// Smooth body-frame applied wrenches and joint torques with analytic
// derivatives, orders 0..r. Deterministic per body/joint.
LoadInput synthetic_loads(const RobotModel& model, double t, int r, double amplitude = 0.5);

// Relative error against a reference scale; absolute when the reference is
// identically zero.
inline double relative_error(double max_diff, double ref_scale) { return ref_scale > 0.0 ? max_diff / ref_scale : max_diff; }

struct GivenForces {
  Mat6X Q1;
  Eigen::MatrixXd tau;
};

struct RoundTripReport {
  int order = 0;
  int steps = 0;
  std::vector<double> err_V1, err_q, err;  // per order k
  double worst = 0.0;
  int first_failing_order = -1;
  double threshold = 1e-6;
  double seconds = 0.0;
  bool pass() const { return first_failing_order < 0; }
};

// Inverse dynamics along the samples (or the given forces), forward dynamics
// on the result, and comparison with the sampled (V⁰₁)⁽ᵏ⁺¹⁾ and q⁽ᵏ⁺²⁾.
RoundTripReport roundtrip(const RobotModel& model, const std::vector<MotionSample>& samples, int r, double threshold = 1e-6,
                          const std::vector<GivenForces>* given = nullptr);

std::vector<MotionSample> sample_trajectory(const Trajectory& traj, int kin_order, double dt, int steps);

struct FdCheckEntry {
  std::string quantity;
  int order = 0;
  double err = 0.0;
};

struct FdCheckReport {
  std::vector<FdCheckEntry> entries;
  double worst = 0.0;
  double threshold = 1e-4;
  double step = 1e-3;
  bool pass() const { return worst <= threshold; }
  double worst_of(const std::string& quantity) const;
};

// Sixth-order central difference of f at t with step h, refined once by
// Richardson extrapolation against step h/2.
template <class F>
auto central_difference(F&& f, double t, double h) {
  using R = std::decay_t<decltype(f(t))>;
  auto d = [&](double s) -> R {
    R out = ((f(t + 3 * s) - f(t - 3 * s)) - 9.0 * (f(t + 2 * s) - f(t - 2 * s)) + 45.0 * (f(t + s) - f(t - s))) / (60.0 * s);
    return out;
  };
  R coarse = d(h);
  R fine = d(h / 2);
  R out = (64.0 * fine - coarse) / 63.0;
  return out;
}

// Compares every exported derivative stack of order k = 1..r with central
// differences of order k−1 at `samples` interior times.
FdCheckReport fdcheck(const RobotModel& model, const Trajectory& traj, int r, double step, int samples = 12,
                      double threshold = 1e-4);

}  // namespace fbd
