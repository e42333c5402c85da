#include "fbd/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fbd {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

int CsvTable::require(const std::string& name) const {
  int c = column(name);
  if (c < 0) throw IoError("missing column '" + name + "'");
  return c;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto a = cell.find_first_not_of(" \t\r");
    auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto a = line.find_first_not_of("# ");
      if (t.header.empty()) t.comments.push_back(a == std::string::npos ? std::string() : line.substr(a));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IoError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                    std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      errno = 0;
      row[i] = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || *end != '\0' || errno == ERANGE)
        throw IoError(source + ":" + std::to_string(lineno) + ": column '" + t.header[i] + "' is not a number: '" + cells[i] + "'");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError(source + ": no header line");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << '\n'; }

void CsvWriter::header(const std::vector<std::string>& names) {
  width_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& v) {
  if (v.size() != width_) throw IoError("CSV row width differs from the header");
  for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << format_double(v[i]);
  out_ << '\n';
}

std::vector<std::string> motion_header(const RobotModel& model, int K) {
  std::vector<std::string> h{"t"};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) h.push_back("C_R" + std::to_string(r) + std::to_string(c));
  for (const char* a : {"C_x", "C_y", "C_z"}) h.emplace_back(a);
  for (int k = 0; k <= K; ++k)
    for (int c = 0; c < 6; ++c) h.push_back("V1_" + std::to_string(k) + "_" + std::to_string(c));
  for (int b = 1; b < model.N; ++b)
    for (int k = 0; k <= K + 1; ++k) h.push_back("q" + std::to_string(b + 1) + "_" + std::to_string(k));
  return h;
}

std::vector<double> motion_row(double t, const MotionInput& m, int K) {
  std::vector<double> v{t};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v.push_back(m.base_pose.R()(r, c));
  for (int i = 0; i < 3; ++i) v.push_back(m.base_pose.x()[i]);
  for (int k = 0; k <= K; ++k)
    for (int c = 0; c < 6; ++c) v.push_back(m.base_twist(c, k));
  for (int j = 0; j < m.q.rows(); ++j)
    for (int k = 0; k <= K + 1; ++k) v.push_back(m.q(j, k));
  return v;
}

void write_motion_csv(std::ostream& out, const RobotModel& model, const std::vector<MotionSample>& samples, int K) {
  CsvWriter w(out);
  w.header(motion_header(model, K));
  for (const auto& s : samples) w.row(motion_row(s.t, s.motion, K));
}

std::vector<MotionSample> read_motion_csv(const std::string& path, const RobotModel& model, int K) {
  CsvTable t = read_csv(path);
  try {
    int ct = t.require("t");
    std::vector<int> cR, cx, cV, cq;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cR.push_back(t.require("C_R" + std::to_string(r) + std::to_string(c)));
    for (const char* a : {"C_x", "C_y", "C_z"}) cx.push_back(t.require(a));
    for (int k = 0; k <= K; ++k)
      for (int c = 0; c < 6; ++c) cV.push_back(t.require("V1_" + std::to_string(k) + "_" + std::to_string(c)));
    for (int b = 1; b < model.N; ++b)
      for (int k = 0; k <= K + 1; ++k) cq.push_back(t.require("q" + std::to_string(b + 1) + "_" + std::to_string(k)));

    std::vector<MotionSample> out;
    for (const auto& row : t.rows) {
      MotionSample s;
      s.t = row[ct];
      Mat3 R;
      for (int i = 0; i < 9; ++i) R(i / 3, i % 3) = row[cR[i]];
      Vec3 x(row[cx[0]], row[cx[1]], row[cx[2]]);
      s.motion.base_pose = Pose(R, x);
      if (s.motion.base_pose.orthonormality_error() > 1e-9) throw IoError("base rotation at t=" + format_double(s.t) + " is not orthonormal");
      s.motion.base_twist.resize(6, K + 1);
      for (int k = 0; k <= K; ++k)
        for (int c = 0; c < 6; ++c) s.motion.base_twist(c, k) = row[cV[k * 6 + c]];
      s.motion.q.resize(model.n, K + 2);
      for (int j = 0; j < model.n; ++j)
        for (int k = 0; k <= K + 1; ++k) s.motion.q(j, k) = row[cq[j * (K + 2) + k]];
      out.push_back(std::move(s));
    }
    return out;
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::vector<std::string> force_header(const RobotModel& model, int r) {
  std::vector<std::string> h{"t"};
  for (int k = 0; k <= r; ++k)
    for (int c = 0; c < 6; ++c) h.push_back("Q1_" + std::to_string(k) + "_" + std::to_string(c));
  for (int b = 1; b < model.N; ++b)
    for (int k = 0; k <= r; ++k) h.push_back("tau" + std::to_string(b + 1) + "_" + std::to_string(k));
  return h;
}

std::vector<double> force_row(double t, const Mat6X& Q1, const Eigen::MatrixXd& tau, int r) {
  std::vector<double> v{t};
  for (int k = 0; k <= r; ++k)
    for (int c = 0; c < 6; ++c) v.push_back(Q1(c, k));
  for (int j = 0; j < tau.rows(); ++j)
    for (int k = 0; k <= r; ++k) v.push_back(tau(j, k));
  return v;
}

std::vector<ForceSample> read_force_csv(const std::string& path, const RobotModel& model, int r) {
  CsvTable t = read_csv(path);
  try {
    int ct = t.require("t");
    std::vector<int> cQ, ctau;
    for (int k = 0; k <= r; ++k)
      for (int c = 0; c < 6; ++c) cQ.push_back(t.require("Q1_" + std::to_string(k) + "_" + std::to_string(c)));
    for (int b = 1; b < model.N; ++b)
      for (int k = 0; k <= r; ++k) ctau.push_back(t.require("tau" + std::to_string(b + 1) + "_" + std::to_string(k)));
    std::vector<ForceSample> out;
    for (const auto& row : t.rows) {
      ForceSample f;
      f.t = row[ct];
      f.Q1.resize(6, r + 1);
      for (int k = 0; k <= r; ++k)
        for (int c = 0; c < 6; ++c) f.Q1(c, k) = row[cQ[k * 6 + c]];
      f.tau.resize(model.n, r + 1);
      for (int j = 0; j < model.n; ++j)
        for (int k = 0; k <= r; ++k) f.tau(j, k) = row[ctau[j * (r + 1) + k]];
      out.push_back(std::move(f));
    }
    return out;
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace fbd
