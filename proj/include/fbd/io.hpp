#pragma once

#include "fbd/kinematics.hpp"
#include "fbd/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbd {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> comments;  // leading '#' lines, without the marker
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // −1 when absent
  int require(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& source);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void comment(const std::string& line);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_ = 0;
};

std::string format_double(double v);

struct MotionSample {
  double t = 0.0;
  MotionInput motion;
};

// Trajectory CSV: t, base pose (C_R00..C_R22, C_x, C_y, C_z), V1_{k}_{c} for
// k = 0..K, then q{id}_{k} for k = 0..K+1 per joint body id.
std::vector<std::string> motion_header(const RobotModel& model, int K);
std::vector<double> motion_row(double t, const MotionInput& m, int K);
void write_motion_csv(std::ostream& out, const RobotModel& model, const std::vector<MotionSample>& samples, int K);
// Reads samples holding at least kinematic order K.
std::vector<MotionSample> read_motion_csv(const std::string& path, const RobotModel& model, int K);

struct ForceSample {
  double t = 0.0;
  Mat6X Q1;             // spatial base wrench, orders 0..r
  Eigen::MatrixXd tau;  // n × (r+1)
};

// Force CSV: t, Q1_{k}_{c} for k = 0..r, then tau{id}_{k} per joint body id.
// Extra columns are ignored on read.
std::vector<std::string> force_header(const RobotModel& model, int r);
std::vector<double> force_row(double t, const Mat6X& Q1, const Eigen::MatrixXd& tau, int r);
std::vector<ForceSample> read_force_csv(const std::string& path, const RobotModel& model, int r);

}  // namespace fbd
