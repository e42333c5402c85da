#include "fbd/audit.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace fbd {

namespace {

// d^k/dt^k of amp·sin(w t + φ).
double dsin(double amp, double w, double phi, double t, int k) {
  return amp * std::pow(w, k) * std::sin(w * t + phi + k * std::numbers::pi / 2);
}

}  // namespace

LoadInput synthetic_loads(const RobotModel& model, double t, int r, double amplitude) {
  LoadInput L;
  L.applied_frame = WrenchFrame::Body;
  L.applied.assign(model.N, Mat6X::Zero(6, r + 1));
  for (int b = 0; b < model.N; ++b)
    for (int c = 0; c < 6; ++c) {
      double w = 0.3 + 0.05 * ((b * 7 + c * 3) % 9);
      double phi = 0.7 * b + 1.3 * c;
      for (int k = 0; k <= r; ++k) L.applied[b](c, k) = dsin(amplitude, w, phi, t, k);
    }
  L.tau_ext = Eigen::MatrixXd::Zero(model.n, r + 1);
  for (int j = 0; j < model.n; ++j) {
    double w = 0.25 + 0.07 * (j % 5);
    for (int k = 0; k <= r; ++k) L.tau_ext(j, k) = dsin(0.1 * amplitude, w, 0.4 * j, t, k);
  }
  return L;
}

std::vector<MotionSample> sample_trajectory(const Trajectory& traj, int kin_order, double dt, int steps) {
  std::vector<MotionSample> out;
  out.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    double t = std::min(i * dt, traj.duration());
    out.push_back({t, traj.eval(t, kin_order)});
  }
  return out;
}

RoundTripReport roundtrip(const RobotModel& model, const std::vector<MotionSample>& samples, int r, double threshold,
                          const std::vector<GivenForces>* given) {
  auto t0 = std::chrono::steady_clock::now();
  if (given && given->size() != samples.size()) throw DimensionError("given forces do not match the number of samples");
  RoundTripReport rep;
  rep.order = r;
  rep.steps = static_cast<int>(samples.size());
  rep.threshold = threshold;
  std::vector<double> dV(r + 1, 0.0), sV(r + 1, 0.0), dq(r + 1, 0.0), sq(r + 1, 0.0);

  KinematicsCache cache;
  GeneralizedForces gf;
  LoadWorkspace lw;
  ForwardDynamicsWorkspace ws;
  AccelOutput acc;
  ForwardDynamicsInput in;
  LoadInput none;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const MotionInput& m = samples[i].motion;
    if (m.max_order() < r + 1) throw DimensionError("trajectory samples hold fewer derivatives than order r needs");
    in.base_pose = m.base_pose;
    in.base_twist = m.base_twist.col(0);
    in.q = m.q.col(0);
    in.qdot = m.q.col(1);
    if (given) {
      in.base_wrench = (*given)[i].Q1;
      in.tau = (*given)[i].tau;
    } else {
      forward_kinematics(model, m, r + 1, cache);
      hgrne(model, cache, none, r, gf, lw);
      in.base_wrench = gf.Q1;
      in.tau = gf.tau;
    }
    hgabi(model, in, r, ws, acc);
    for (int k = 0; k <= r; ++k) {
      Vec6 ref = m.base_twist.col(k + 1);
      dV[k] = std::max(dV[k], (acc.V1.col(k) - ref).cwiseAbs().maxCoeff());
      sV[k] = std::max(sV[k], ref.cwiseAbs().maxCoeff());
      if (model.n > 0) {
        Eigen::VectorXd qref = m.q.col(k + 2);
        dq[k] = std::max(dq[k], (acc.qdd.col(k) - qref).cwiseAbs().maxCoeff());
        sq[k] = std::max(sq[k], qref.cwiseAbs().maxCoeff());
      }
    }
  }
  for (int k = 0; k <= r; ++k) {
    rep.err_V1.push_back(relative_error(dV[k], sV[k]));
    rep.err_q.push_back(relative_error(dq[k], sq[k]));
    double e = std::max(rep.err_V1.back(), rep.err_q.back());
    if (!std::isfinite(e)) e = std::numeric_limits<double>::infinity();
    rep.err.push_back(e);
    rep.worst = std::max(rep.worst, e);
    if (rep.first_failing_order < 0 && !(e <= threshold)) rep.first_failing_order = k;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

double FdCheckReport::worst_of(const std::string& q) const {
  double w = 0.0;
  for (const auto& e : entries)
    if (e.quantity == q) w = std::max(w, e.err);
  return w;
}

namespace {

struct Block {
  std::string name;
  int rows;
};

struct Snapshot {
  std::vector<Block> blocks;
  Eigen::MatrixXd data;  // stacked block rows × orders 0..r
};

Snapshot snapshot(const RobotModel& model, const Trajectory& traj, double t, int r) {
  MotionInput m = traj.eval(t, r + 1);
  LoadInput loads = synthetic_loads(model, t, r);
  KinematicsCache c = forward_kinematics(model, m, r + 1);
  GeneralizedForces gf;
  LoadWorkspace lw;
  hgrne(model, c, loads, r, gf, lw);

  ForwardDynamicsInput in;
  in.base_pose = m.base_pose;
  in.base_twist = m.base_twist.col(0);
  in.q = m.q.col(0);
  in.qdot = m.q.col(1);
  in.base_wrench = gf.Q1;
  in.tau = gf.tau;
  in.loads = loads;
  AccelOutput acc = hgabi(model, in, r);

  const int N = model.N, n = model.n;
  Snapshot s;
  s.blocks = {{"S", 6 * n},  {"V", 6 * N},   {"M", 36 * N}, {"Pi", 6 * N},   {"W_grav", 6 * N},
              {"W_ext", 6 * N}, {"Q", 6 + n}, {"tau", n},    {"qdd", n},       {"V1dot", 6}};
  int rows = 0;
  for (const auto& b : s.blocks) rows += b.rows;
  s.data.resize(rows, r + 1);
  for (int k = 0; k <= r; ++k) {
    Eigen::VectorXd col(rows);
    int o = 0;
    for (int b = 1; b < N; ++b, o += 6) col.segment<6>(o) = c.S(b, k);
    for (int b = 0; b < N; ++b, o += 6) col.segment<6>(o) = c.V(b, k);
    for (int b = 0; b < N; ++b, o += 36) col.segment<36>(o) = c.M(b, k).reshaped();
    for (int b = 0; b < N; ++b, o += 6) col.segment<6>(o) = c.Pi(b, k);
    for (int b = 0; b < N; ++b, o += 6) col.segment<6>(o) = c.Wgrav(b, k);
    for (int b = 0; b < N; ++b, o += 6) col.segment<6>(o) = lw.W_app(b, k);
    col.segment<6>(o) = gf.Q1.col(k);
    o += 6;
    col.segment(o, n) = gf.Q.col(k);
    o += n;
    col.segment(o, n) = gf.tau.col(k);
    o += n;
    col.segment(o, n) = acc.qdd.col(k);
    o += n;
    col.segment<6>(o) = acc.V1.col(k);
    s.data.col(k) = col;
  }
  return s;
}

}  // namespace

FdCheckReport fdcheck(const RobotModel& model, const Trajectory& traj, int r, double step, int samples, double threshold) {
  if (r < 1) throw DimensionError("fdcheck needs order 1 or more");
  if (!(step > 0.0)) throw DimensionError("step must be positive");
  const double T = traj.duration();
  const double margin = 3.0 * step * 1.01;
  if (T <= 2 * margin) throw DimensionError("step too large for the trajectory horizon");

  Snapshot probe = snapshot(model, traj, T / 2, r);
  // Per block and order: max |FD − analytic| and max |analytic|.
  const int nb = static_cast<int>(probe.blocks.size());
  Eigen::MatrixXd bdiff = Eigen::MatrixXd::Zero(nb, r + 1), bscale = Eigen::MatrixXd::Zero(nb, r + 1);

  for (int s = 0; s < samples; ++s) {
    double t = samples == 1 ? T / 2 : margin + (T - 2 * margin) * s / (samples - 1);
    Snapshot here = snapshot(model, traj, t, r);
    auto f = [&](double tt) -> Eigen::MatrixXd { return snapshot(model, traj, tt, r).data; };
    Eigen::MatrixXd d = central_difference(f, t, step);
    int o = 0;
    for (int b = 0; b < nb; ++b) {
      int br = probe.blocks[b].rows;
      for (int k = 0; k <= r; ++k) {
        if (br == 0) continue;
        bscale(b, k) = std::max(bscale(b, k), here.data.block(o, k, br, 1).cwiseAbs().maxCoeff());
        if (k >= 1) bdiff(b, k) = std::max(bdiff(b, k), (d.block(o, k - 1, br, 1) - here.data.block(o, k, br, 1)).cwiseAbs().maxCoeff());
      }
      o += br;
    }
  }

  FdCheckReport rep;
  rep.threshold = threshold;
  rep.step = step;
  for (int b = 0; b < nb; ++b) {
    if (probe.blocks[b].rows == 0) continue;
    for (int k = 1; k <= r; ++k) {
      double e = relative_error(bdiff(b, k), bscale(b, k));
      if (!std::isfinite(e)) e = std::numeric_limits<double>::infinity();
      rep.entries.push_back({probe.blocks[b].name, k, e});
      rep.worst = std::max(rep.worst, e);
    }
  }
  return rep;
}

}  // namespace fbd
