#include "fbd/model.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace fbd {

using json = nlohmann::ordered_json;

Mat6 body_inertia(double mass, const Mat3& J) {
  Mat6 M = Mat6::Zero();
  M.topLeftCorner<3, 3>() = J;
  M.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return M;
}

double RobotModel::total_mass() const {
  double m = 0.0;
  for (double mi : mass) m += mi;
  return m;
}

namespace {

bool is_spd(const Mat6& M) {
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<Mat6> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

std::string body_label(int id) { return "body " + std::to_string(id); }

}  // namespace

RobotModel build_model(const std::vector<BodySpec>& specs, double gravity) {
  const int N = static_cast<int>(specs.size());
  if (N == 0) throw ModelError("model has no bodies");
  if (!(gravity >= 0.0) || !std::isfinite(gravity)) throw ModelError("gravity must be a finite non-negative magnitude");

  RobotModel m;
  m.N = N;
  m.n = N - 1;
  m.gravity = gravity;
  m.bodies.resize(N);
  std::vector<bool> seen(N, false);
  for (const auto& s : specs) {
    if (s.id < 1 || s.id > N) throw ModelError(body_label(s.id) + ": id outside 1.." + std::to_string(N));
    if (seen[s.id - 1]) throw ModelError("duplicated body id " + std::to_string(s.id));
    seen[s.id - 1] = true;
    m.bodies[s.id - 1] = s;
  }

  m.parent.assign(N, -1);
  m.children.assign(N, {});
  for (int b = 0; b < N; ++b) {
    const auto& s = m.bodies[b];
    if (b == 0) {
      if (s.parent != 0) throw ModelError("body 1 must be the base with parent 0");
      if (s.joint) throw ModelError("base body 1 must not have a joint");
      continue;
    }
    if (s.parent == 0) throw ModelError(body_label(s.id) + ": only body 1 may attach to the world");
    if (s.parent < 1 || s.parent > N) throw ModelError(body_label(s.id) + ": dangling parent " + std::to_string(s.parent));
    if (s.parent == s.id) throw ModelError(body_label(s.id) + ": cycle detected (self parent)");
    if (!s.joint) throw ModelError(body_label(s.id) + ": non-base body needs a joint");
    m.parent[b] = s.parent - 1;
    m.children[s.parent - 1].push_back(b);
  }

  // Every body must reach the base without revisiting a node.
  for (int b = 1; b < N; ++b) {
    int steps = 0;
    for (int a = b; a != 0; a = m.parent[a])
      if (++steps > N) throw ModelError(body_label(b + 1) + ": cycle detected");
  }

  for (auto& c : m.children) std::sort(c.begin(), c.end());

  std::vector<int> stack{0};
  while (!stack.empty()) {
    int b = stack.back();
    stack.pop_back();
    m.preorder.push_back(b);
    for (auto it = m.children[b].rbegin(); it != m.children[b].rend(); ++it) stack.push_back(*it);
  }
  // Post-order: children (in id order) before parents.
  std::vector<std::pair<int, std::size_t>> st{{0, 0}};
  while (!st.empty()) {
    auto& [b, i] = st.back();
    if (i < m.children[b].size()) {
      int c = m.children[b][i++];
      st.push_back({c, 0});
    } else {
      m.postorder.push_back(b);
      st.pop_back();
    }
  }

  m.A0.assign(N, Pose::identity());
  m.Y.assign(N, Vec6::Zero());
  m.Mb.resize(N);
  m.mass.resize(N);
  for (int b : m.preorder) {
    const auto& s = m.bodies[b];
    if (b != 0) m.A0[b] = m.A0[m.parent[b]] * s.A_parent_child;
    if (s.A_parent_child.orthonormality_error() > 1e-9) throw ModelError(body_label(s.id) + ": home transform rotation is not orthonormal");

    const Mat6& M = s.inertia;
    if (!M.allFinite()) throw ModelError(body_label(s.id) + ": inertia is not finite");
    double mass = M(3, 3);
    bool zero = M.isZero(0.0);
    if (zero) {
      if (b == 0) throw ModelError("body 1: the base needs positive inertia");
      if (m.children[b].size() != 1) throw ModelError(body_label(s.id) + ": zero-inertia bodies need exactly one child");
    } else {
      if (!is_spd(M)) throw ModelError(body_label(s.id) + ": inertia is not symmetric positive-definite");
      if ((M.bottomRightCorner<3, 3>() - mass * Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
          !M.topRightCorner<3, 3>().isZero(0.0) || !M.bottomLeftCorner<3, 3>().isZero(0.0))
        throw ModelError(body_label(s.id) + ": inertia must be [[J,0],[0,mI]] at the CoM");
    }
    m.Mb[b] = M;
    m.mass[b] = zero ? 0.0 : mass;

    if (b == 0) continue;
    const JointSpec& j = *s.joint;
    if (!j.axis.allFinite() || std::abs(j.axis.norm() - 1.0) > 1e-9) throw ModelError(body_label(s.id) + ": joint axis is not a unit vector");
    Vec3 e = m.A0[b].R() * j.axis;
    if (j.kind == JointKind::Revolute) {
      Vec3 p = m.A0[b].act(j.point);
      m.Y[b] = make_twist(e, p.cross(e));
    } else {
      m.Y[b] = make_twist(Vec3::Zero(), e);
    }
  }
  return m;
}

std::vector<std::string> check_specs(const ModelSpecs& ms) {
  std::vector<std::string> out;
  const auto& specs = ms.bodies;
  const int N = static_cast<int>(specs.size());
  if (N == 0) out.push_back("model has no bodies");
  if (!(ms.gravity >= 0.0) || !std::isfinite(ms.gravity)) out.push_back("gravity must be a finite non-negative magnitude");

  std::map<int, const BodySpec*> by_id;
  std::map<int, int> nchild;
  for (const auto& s : specs) {
    if (s.id < 1 || s.id > N) out.push_back(body_label(s.id) + ": id outside 1.." + std::to_string(N));
    if (!by_id.emplace(s.id, &s).second) out.push_back("duplicated body id " + std::to_string(s.id));
    ++nchild[s.parent];
  }
  for (const auto& s : specs) {
    std::string tag = body_label(s.id) + ": ";
    if (s.id == 1) {
      if (s.parent != 0) out.push_back("body 1 must be the base with parent 0");
      if (s.joint) out.push_back("base body 1 must not have a joint");
    } else {
      if (s.parent == 0) out.push_back(tag + "only body 1 may attach to the world");
      else if (!by_id.count(s.parent)) out.push_back(tag + "dangling parent " + std::to_string(s.parent));
      if (!s.joint) out.push_back(tag + "non-base body needs a joint");
      int steps = 0;
      for (int a = s.id; a != 1; ++steps) {
        auto it = by_id.find(a);
        if (it == by_id.end() || it->second->parent == 0 || steps > N) {
          if (steps > N) out.push_back(tag + "cycle detected");
          break;
        }
        a = it->second->parent;
      }
    }
    if (s.A_parent_child.orthonormality_error() > 1e-9) out.push_back(tag + "home transform rotation is not orthonormal");
    const Mat6& M = s.inertia;
    if (!M.allFinite()) {
      out.push_back(tag + "inertia is not finite");
    } else if (M.isZero(0.0)) {
      if (s.id == 1) out.push_back("body 1: the base needs positive inertia");
      else if (nchild[s.id] != 1) out.push_back(tag + "zero-inertia bodies need exactly one child");
    } else if (!is_spd(M)) {
      out.push_back(tag + "inertia is not symmetric positive-definite");
    } else if ((M.bottomRightCorner<3, 3>() - M(3, 3) * Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
      out.push_back(tag + "inertia must be [[J,0],[0,mI]] at the CoM");
    }
    if (s.joint && (!s.joint->axis.allFinite() || std::abs(s.joint->axis.norm() - 1.0) > 1e-9))
      out.push_back(tag + "joint axis is not a unit vector");
  }
  return out;
}

std::vector<std::string> validate(const RobotModel& m) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& s) { out.push_back(s); };
  if (m.N < 1) {
    fail("model has no bodies");
    return out;
  }
  if (m.n != m.N - 1) fail("joint count differs from N-1");
  const auto NN = static_cast<std::size_t>(m.N);
  if (m.parent.size() != NN || m.children.size() != NN || m.A0.size() != NN || m.Y.size() != NN || m.Mb.size() != NN ||
      m.bodies.size() != NN || m.mass.size() != NN) {
    fail("per-body arrays do not have N entries");
    return out;
  }
  if (m.preorder.size() != NN || m.postorder.size() != NN) fail("traversal lengths differ from N");
  if (m.preorder.empty() || m.preorder.front() != 0) fail("preorder does not start at the base");
  std::vector<int> pre_pos(m.N, -1), post_pos(m.N, -1);
  for (std::size_t i = 0; i < m.preorder.size(); ++i) pre_pos[m.preorder[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < m.postorder.size(); ++i) post_pos[m.postorder[i]] = static_cast<int>(i);
  if (m.parent[0] != -1) fail("body 1 has a parent");
  if (m.A0[0].orthonormality_error() > 1e-12 || m.A0[0].x().norm() > 0.0 ||
      (m.A0[0].R() - Mat3::Identity()).cwiseAbs().maxCoeff() > 0.0)
    fail("body 1 home pose is not the identity");
  for (int b = 0; b < m.N; ++b) {
    std::string tag = body_label(b + 1) + ": ";
    if (pre_pos[b] < 0 || post_pos[b] < 0) fail(tag + "missing from a traversal");
    const Mat6& M = m.Mb[b];
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(tag + "inertia not symmetric");
    if (!m.zero_inertia(b) && !is_spd(M)) fail(tag + "inertia not positive-definite");
    if (m.zero_inertia(b) && m.children[b].size() != 1) fail(tag + "zero-inertia body without exactly one child");
    if (m.A0[b].orthonormality_error() > 1e-9) fail(tag + "accumulated home rotation not orthonormal");
    if (b == 0) continue;
    int p = m.parent[b];
    if (p < 0 || p >= m.N) {
      fail(tag + "dangling parent");
      continue;
    }
    if (pre_pos[b] >= 0 && pre_pos[p] >= 0 && pre_pos[b] < pre_pos[p]) fail(tag + "precedes its parent in preorder");
    if (post_pos[b] >= 0 && post_pos[p] >= 0 && post_pos[b] > post_pos[p]) fail(tag + "follows its parent in postorder");
    if (std::find(m.children[p].begin(), m.children[p].end(), b) == m.children[p].end()) fail(tag + "not listed among its parent's children");
    const auto& joint = m.bodies[b].joint;
    if (!joint) {
      fail(tag + "no joint");
      continue;
    }
    double na = joint->kind == JointKind::Revolute ? m.Y[b].head<3>().norm() : m.Y[b].tail<3>().norm();
    if (std::abs(na - 1.0) > 1e-9) fail(tag + "home screw axis block is not unit");
    if (joint->kind == JointKind::Prismatic && !m.Y[b].head<3>().isZero(0.0)) fail(tag + "prismatic screw has angular part");
  }
  return out;
}

namespace {

struct Loc {
  std::string source;
  std::string where(const std::string& field) const { return source + ": field '" + field + "'"; }
};

const json& need(const json& j, const char* key, const Loc& loc, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ModelError(loc.where(path + "." + key) + " is missing");
  return j.at(key);
}

double number(const json& j, const Loc& loc, const std::string& path) {
  if (!j.is_number()) throw ModelError(loc.where(path) + " must be a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const Loc& loc, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ModelError(loc.where(path) + " must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = number(j[i], loc, path + "[" + std::to_string(i) + "]");
  return v;
}

Mat3 mat3(const json& j, const Loc& loc, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ModelError(loc.where(path) + " must be a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3(j[r], loc, path + "[" + std::to_string(r) + "]").transpose();
  return m;
}

Mat3 rpy_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) a.push_back(to_json(Vec3(m.row(r).transpose())));
  return a;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ModelSpecs parse_specs(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(source + ": parse error at " + line_col(text, e.byte) + ": " + e.what());
  }
  Loc loc{source};
  if (!doc.is_object()) throw ModelError(source + ": top level must be an object");
  double g = 9.81;
  if (doc.contains("gravity")) g = number(doc["gravity"], loc, "gravity");
  const json& bodies = need(doc, "bodies", loc, "");
  if (!bodies.is_array()) throw ModelError(loc.where("bodies") + " must be an array");

  std::vector<BodySpec> specs;
  std::map<int, std::size_t> ids;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const json& jb = bodies[i];
    std::string path = "bodies[" + std::to_string(i) + "]";
    BodySpec s;
    const json& jid = need(jb, "id", loc, path);
    if (!jid.is_number_integer()) throw ModelError(loc.where(path + ".id") + " must be an integer");
    s.id = jid.get<int>();
    if (auto [it, fresh] = ids.emplace(s.id, i); !fresh)
      throw ModelError(source + ": duplicated body id " + std::to_string(s.id) + " in " + path + " (first seen in bodies[" +
                       std::to_string(it->second) + "])");
    const json& jp = need(jb, "parent", loc, path);
    if (!jp.is_number_integer()) throw ModelError(loc.where(path + ".parent") + " must be an integer");
    s.parent = jp.get<int>();

    if (jb.contains("joint")) {
      const json& jj = jb["joint"];
      std::string jpath = path + ".joint";
      JointSpec js;
      const json& kind = need(jj, "kind", loc, jpath);
      if (kind == "revolute") js.kind = JointKind::Revolute;
      else if (kind == "prismatic") js.kind = JointKind::Prismatic;
      else throw ModelError(loc.where(jpath + ".kind") + " must be \"revolute\" or \"prismatic\"");
      js.axis = vec3(need(jj, "axis", loc, jpath), loc, jpath + ".axis");
      if (jj.contains("point")) js.point = vec3(jj["point"], loc, jpath + ".point");
      s.joint = js;
    }

    if (jb.contains("A")) {
      const json& ja = jb["A"];
      std::string apath = path + ".A";
      Mat3 R = Mat3::Identity();
      if (ja.contains("rotmat") && ja.contains("rpy")) throw ModelError(loc.where(apath) + " has both rpy and rotmat");
      if (ja.contains("rotmat")) R = mat3(ja["rotmat"], loc, apath + ".rotmat");
      if (ja.contains("rpy")) R = rpy_matrix(vec3(ja["rpy"], loc, apath + ".rpy"));
      Vec3 x = ja.contains("xyz") ? vec3(ja["xyz"], loc, apath + ".xyz") : Vec3::Zero();
      s.A_parent_child = Pose(R, x);
    }

    const json& ji = need(jb, "inertia", loc, path);
    std::string ipath = path + ".inertia";
    double mass = number(need(ji, "mass", loc, ipath), loc, ipath + ".mass");
    if (ji.contains("com_offset")) {
      Vec3 off = vec3(ji["com_offset"], loc, ipath + ".com_offset");
      if (!off.isZero(0.0)) throw ModelError(loc.where(ipath + ".com_offset") + " must be zero (frames sit at the CoM)");
    }
    s.inertia = body_inertia(mass, mat3(need(ji, "J", loc, ipath), loc, ipath + ".J"));
    specs.push_back(s);
  }
  return {g, specs};
}

RobotModel parse_model(const std::string& text, const std::string& source) {
  ModelSpecs ms = parse_specs(text, source);
  try {
    return build_model(ms.bodies, ms.gravity);
  } catch (const ModelError& e) {
    throw ModelError(source + ": " + e.what());
  }
}

static std::string read_model_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RobotModel load_model(const std::string& path) { return parse_model(read_model_text(path), path); }

ModelSpecs load_specs(const std::string& path) { return parse_specs(read_model_text(path), path); }

std::string serialize_model(const RobotModel& m) {
  json doc;
  doc["gravity"] = m.gravity;
  json bodies = json::array();
  for (int b = 0; b < m.N; ++b) {
    const BodySpec& s = m.bodies[b];
    json jb;
    jb["id"] = s.id;
    jb["parent"] = s.parent;
    if (s.joint) {
      json jj;
      jj["kind"] = s.joint->kind == JointKind::Revolute ? "revolute" : "prismatic";
      jj["axis"] = to_json(s.joint->axis);
      jj["point"] = to_json(s.joint->point);
      jb["joint"] = jj;
    }
    jb["A"] = {{"rotmat", to_json(s.A_parent_child.R())}, {"xyz", to_json(s.A_parent_child.x())}};
    jb["inertia"] = {{"mass", m.mass[b]},
                     {"com_offset", to_json(Vec3(Vec3::Zero()))},
                     {"J", to_json(Mat3(s.inertia.topLeftCorner<3, 3>()))}};
    bodies.push_back(jb);
  }
  doc["bodies"] = bodies;
  return doc.dump(2) + "\n";
}

void save_model(const RobotModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << serialize_model(m);
}

}  // namespace fbd
