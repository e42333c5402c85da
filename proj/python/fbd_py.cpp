#include "fbd/audit.hpp"
#include "fbd/closed_form.hpp"
#include "fbd/forward_dynamics.hpp"
#include "fbd/hybrid_dynamics.hpp"
#include "fbd/io.hpp"
#include "fbd/tilthex.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fbd;

namespace {

Pose to_pose(const Mat4& T) {
  if (!T.bottomRows<1>().isApprox(Eigen::RowVector4d(0, 0, 0, 1), 1e-12)) throw std::invalid_argument("pose must be homogeneous");
  Mat3 R = T.topLeftCorner<3, 3>();
  if (!(R.transpose() * R).isApprox(Mat3::Identity(), 1e-9) || R.determinant() < 0)
    throw std::invalid_argument("pose rotation is not orthonormal");
  return Pose::from_matrix(T);
}

WrenchFrame frame_of(const std::string& s) {
  if (s == "spatial") return WrenchFrame::Spatial;
  if (s == "body") return WrenchFrame::Body;
  throw std::invalid_argument("frame must be 'spatial' or 'body', got '" + s + "'");
}

LoadInput make_loads(const RobotModel& m, const std::optional<std::vector<Mat6X>>& applied, const std::string& frame,
                     const std::optional<Eigen::MatrixXd>& tau_ext) {
  LoadInput L;
  if (applied) {
    if (static_cast<int>(applied->size()) != m.N) throw std::invalid_argument("applied needs one 6×(r+1) array per body");
    L.applied = *applied;
  }
  L.applied_frame = frame_of(frame);
  if (tau_ext) L.tau_ext = *tau_ext;
  return L;
}

MotionInput make_motion(const Mat4& base_pose, const Mat6X& base_twist, const Eigen::MatrixXd& q) {
  MotionInput in;
  in.base_pose = to_pose(base_pose);
  in.base_twist = base_twist;
  in.q = q;
  return in;
}

py::dict motion_dict(const MotionInput& in) {
  py::dict d;
  d["base_pose"] = in.base_pose.matrix();
  d["base_twist"] = in.base_twist;
  d["q"] = in.q;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fbd, mod) {
  mod.doc() = "Higher-order floating-base rigid-body dynamics";

  py::register_exception<ModelError>(mod, "ModelError", PyExc_ValueError);
  py::register_exception<DimensionError>(mod, "DimensionError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

  py::class_<RobotModel>(mod, "RobotModel")
      .def_readonly("N", &RobotModel::N)
      .def_readonly("n", &RobotModel::n)
      .def_readonly("gravity", &RobotModel::gravity)
      .def_readonly("parent", &RobotModel::parent)
      .def_readonly("mass", &RobotModel::mass)
      .def("total_mass", &RobotModel::total_mass)
      .def("__repr__", [](const RobotModel& m) {
        return "<RobotModel N=" + std::to_string(m.N) + " n=" + std::to_string(m.n) + ">";
      });

  mod.def("build_tilthex", [] { return build_tilthex(); });
  mod.def("build_branched_tree", [](int per_branch) { return build_branched_tree(per_branch); }, py::arg("per_branch"));
  mod.def("load_model", &load_model, py::arg("path"));
  mod.def("parse_model", &parse_model, py::arg("text"), py::arg("source") = "<string>");
  mod.def("serialize_model", &serialize_model, py::arg("model"));
  mod.def("validate", &validate, py::arg("model"));
  mod.def("propeller_allocation", [] { return propeller_allocation(); });

  py::class_<TiltHexTrajectory>(mod, "TiltHexTrajectory")
      .def(py::init([](double time_scale) {
             TiltHexTrajectoryParams p;
             p.time_scale = time_scale;
             return TiltHexTrajectory(p);
           }),
           py::arg("time_scale") = 1.0)
      .def("duration", &TiltHexTrajectory::duration)
      .def("eval", [](const TiltHexTrajectory& t, double s, int order) { return motion_dict(t.eval(s, order)); },
           py::arg("t"), py::arg("order"));

  mod.def(
      "inverse_dynamics",
      [](const RobotModel& m, const Mat4& base_pose, const Mat6X& base_twist, const Eigen::MatrixXd& q, int r,
         const std::optional<std::vector<Mat6X>>& applied, const std::string& applied_frame,
         const std::optional<Eigen::MatrixXd>& tau_ext) {
        auto f = inverse_dynamics(m, make_motion(base_pose, base_twist, q), make_loads(m, applied, applied_frame, tau_ext), r);
        py::dict d;
        d["Q1"] = f.Q1;
        d["Q"] = f.Q;
        d["tau"] = f.tau;
        return d;
      },
      py::arg("model"), py::arg("base_pose"), py::arg("base_twist"), py::arg("q"), py::arg("order"),
      py::arg("applied") = py::none(), py::arg("applied_frame") = "body", py::arg("tau_ext") = py::none());

  mod.def(
      "forward_dynamics",
      [](const RobotModel& m, const Mat4& base_pose, const Vec6& base_twist, const Eigen::VectorXd& q,
         const Eigen::VectorXd& qdot, const Mat6X& base_wrench, const Eigen::MatrixXd& tau, int r,
         const std::string& wrench_frame, const std::optional<std::vector<Mat6X>>& applied,
         const std::string& applied_frame, const std::optional<Eigen::MatrixXd>& tau_ext) {
        ForwardDynamicsInput in;
        in.base_pose = to_pose(base_pose);
        in.base_twist = base_twist;
        in.q = q;
        in.qdot = qdot;
        in.base_wrench = base_wrench;
        in.base_wrench_frame = frame_of(wrench_frame);
        in.tau = tau;
        in.loads = make_loads(m, applied, applied_frame, tau_ext);
        auto out = hgabi(m, in, r);
        py::dict d;
        d["V1"] = out.V1;
        d["qdd"] = out.qdd;
        d["base_residual"] = out.base_residual;
        return d;
      },
      py::arg("model"), py::arg("base_pose"), py::arg("base_twist"), py::arg("q"), py::arg("qdot"), py::arg("base_wrench"),
      py::arg("tau"), py::arg("order"), py::arg("wrench_frame") = "spatial", py::arg("applied") = py::none(),
      py::arg("applied_frame") = "body", py::arg("tau_ext") = py::none());

  mod.def(
      "hybrid_dynamics",
      [](const RobotModel& m, const Mat4& base_pose, const Vec6& base_twist, const Eigen::VectorXd& q,
         const Eigen::VectorXd& qdot, int r, const std::vector<int>& jq, const std::vector<int>& jtau,
         const std::string& base, const std::optional<Mat6X>& base_wrench, const std::optional<Mat6X>& base_accel,
         const std::optional<Eigen::MatrixXd>& qdd, const std::optional<Eigen::MatrixXd>& tau) {
        HybridState st{to_pose(base_pose), base_twist, q, qdot};
        HybridSpec spec;
        spec.Jq = jq;
        spec.Jtau = jtau;
        if (base == "wrench") spec.base_mode = BaseMode::WrenchGiven;
        else if (base == "twist") spec.base_mode = BaseMode::TwistGiven;
        else throw std::invalid_argument("base must be 'wrench' or 'twist', got '" + base + "'");
        if (base_wrench) spec.base_wrench = *base_wrench;
        if (base_accel) spec.base_accel = *base_accel;
        if (qdd) spec.qdd = *qdd;
        if (tau) spec.tau = *tau;
        auto h = hghyb(m, st, spec, {}, r);
        py::dict d;
        d["V1"] = h.V1;
        d["base_wrench"] = h.base_wrench;
        d["qdd"] = h.qdd;
        d["tau"] = h.tau;
        return d;
      },
      py::arg("model"), py::arg("base_pose"), py::arg("base_twist"), py::arg("q"), py::arg("qdot"), py::arg("order"),
      py::arg("jq"), py::arg("jtau"), py::arg("base") = "wrench", py::arg("base_wrench") = py::none(),
      py::arg("base_accel") = py::none(), py::arg("qdd") = py::none(), py::arg("tau") = py::none());

  mod.def(
      "equations_of_motion",
      [](const RobotModel& m, const Mat4& base_pose, const Vec6& base_twist, const Eigen::VectorXd& q,
         const Eigen::VectorXd& qdot) {
        MotionInput in;
        in.base_pose = to_pose(base_pose);
        in.base_twist = Mat6X::Zero(6, 2);
        in.base_twist.col(0) = base_twist;
        in.q = Eigen::MatrixXd::Zero(m.n, 3);  // accelerations do not enter M, C, h or g
        in.q.col(0) = q;
        in.q.col(1) = qdot;
        auto ops = assemble_operators(m, forward_kinematics(m, in, 1));
        auto t = eom_order0(ops, {});
        py::dict d;
        d["M"] = t.Mbar;
        d["C"] = t.C;
        d["Mdot"] = t.Mbar_dot;
        d["h"] = t.h;
        d["g"] = t.g;
        return d;
      },
      py::arg("model"), py::arg("base_pose"), py::arg("base_twist"), py::arg("q"), py::arg("qdot"));

  mod.def(
      "roundtrip",
      [](const RobotModel& m, int r, int steps, double threshold) {
        TiltHexTrajectory traj;
        double dt = traj.duration() / steps;
        auto rep = roundtrip(m, sample_trajectory(traj, r + 1, dt, steps + 1), r, threshold);
        py::dict d;
        d["err"] = rep.err;
        d["worst"] = rep.worst;
        d["first_failing_order"] = rep.first_failing_order;
        d["pass"] = rep.pass();
        return d;
      },
      py::arg("model"), py::arg("order"), py::arg("steps") = 300, py::arg("threshold") = 1e-6);
}
