#pragma once

#include "fbd/liegroup.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbd {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JointKind { Revolute, Prismatic };

struct JointSpec {
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();   // child body frame at home
  Vec3 point = Vec3::Zero();   // child body frame at home, unused for prismatic
};

struct BodySpec {
  int id = 1;
  int parent = 0;              // 0 = world (base only)
  Pose A_parent_child;         // home transform relative to the parent body
  Mat6 inertia = Mat6::Identity();  // body-frame spatial inertia at the CoM
  std::optional<JointSpec> joint;
};

Mat6 body_inertia(double mass, const Mat3& J);

// Bodies are stored by index b = id − 1; body 0 is the floating base.
// Joint quantities are indexed by body as well (row 0 unused); the
// generalized coordinate of body b ≥ 1 is q[b − 1].
class RobotModel {
 public:
  int N = 0;
  int n = 0;  // joint count, N − 1
  double gravity = 9.81;
  std::vector<BodySpec> bodies;
  std::vector<int> parent;  // −1 for the base
  std::vector<std::vector<int>> children;
  std::vector<int> preorder, postorder;
  std::vector<Pose> A0;
  std::vector<Vec6> Y;      // zero for the base
  std::vector<Mat6> Mb;
  std::vector<double> mass;

  double total_mass() const;
  bool zero_inertia(int b) const { return mass[b] == 0.0 && Mb[b].isZero(0.0); }
};

RobotModel build_model(const std::vector<BodySpec>& specs, double gravity = 9.81);

struct ModelSpecs {
  double gravity = 9.81;
  std::vector<BodySpec> bodies;
};

// Every problem build_model would reject, without stopping at the first.
std::vector<std::string> check_specs(const ModelSpecs& specs);

// All invariant violations, empty when the model is consistent.
std::vector<std::string> validate(const RobotModel& model);

// Parse errors throw ModelError with the line/column or field path.
ModelSpecs parse_specs(const std::string& text, const std::string& source = "<string>");
ModelSpecs load_specs(const std::string& path);
RobotModel load_model(const std::string& path);
RobotModel parse_model(const std::string& text, const std::string& source = "<string>");
std::string serialize_model(const RobotModel& model);
void save_model(const RobotModel& model, const std::string& path);

}  // namespace fbd
