#include "fbd/audit.hpp"
#include "fbd/io.hpp"
#include "fbd/tilthex.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fbd;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("fbd_test_io_" + name);
  std::ofstream(p) << text;
  return p.string();
}

std::string contents_of(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  CsvWriter w(out);
  w.header(header);
  for (const auto& r : rows) w.row(r);
  return out.str();
}

}  // namespace

TEST_CASE("doubles survive text formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("CSV parsing") {
  std::istringstream in("# first\n#second\nt, a ,b\n\n0,1,2\r\n1e-3, -4 ,5\n");
  CsvTable t = parse_csv(in, "x.csv");
  CHECK(t.comments == std::vector<std::string>{"first", "second"});
  CHECK(t.header == std::vector<std::string>{"t", "a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == -4.0);
  CHECK(t.column("b") == 2);
  CHECK(t.column("c") == -1);
  CHECK_THROWS_WITH_AS(t.require("c"), doctest::Contains("missing column 'c'"), IoError);
}

TEST_CASE("CSV errors carry the line number") {
  std::istringstream short_row("t,a\n0,1\n1\n");
  CHECK_THROWS_WITH_AS(parse_csv(short_row, "x.csv"), doctest::Contains("x.csv:3: expected 2 fields, got 1"), IoError);
  std::istringstream bad("t,a\n0,abc\n");
  CHECK_THROWS_WITH_AS(parse_csv(bad, "x.csv"), doctest::Contains("x.csv:2: column 'a' is not a number"), IoError);
  std::istringstream empty_cell("t,a\n0,\n");
  CHECK_THROWS_AS(parse_csv(empty_cell, "x.csv"), IoError);
  std::istringstream none("# only comments\n");
  CHECK_THROWS_WITH_AS(parse_csv(none, "x.csv"), doctest::Contains("no header"), IoError);
  CHECK_THROWS_WITH_AS(read_csv("/nonexistent/in.csv"), doctest::Contains("/nonexistent/in.csv"), IoError);
}

TEST_CASE("writer rejects ragged rows") {
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"a", "b"});
  CHECK_THROWS_AS(w.row({1.0}), IoError);
}

TEST_CASE("motion CSV round trip") {
  RobotModel m = build_tilthex();
  TiltHexTrajectory traj;
  const int K = 3;
  auto samples = sample_trajectory(traj, K, 0.37, 20);
  std::ostringstream out;
  write_motion_csv(out, m, samples, K);
  std::string path = temp_file("motion.csv", out.str());

  auto back = read_motion_csv(path, m, K);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(back[i].t == samples[i].t);
    CHECK(back[i].motion.base_pose.matrix() == samples[i].motion.base_pose.matrix());
    CHECK(back[i].motion.base_twist == samples[i].motion.base_twist);
    CHECK(back[i].motion.q == samples[i].motion.q);
  }
  // Fewer orders can be read from a richer file.
  auto low = read_motion_csv(path, m, 1);
  CHECK(low[3].motion.base_twist == samples[3].motion.base_twist.leftCols(2));
  // More cannot.
  CHECK_THROWS_WITH_AS(read_motion_csv(path, m, 4), doctest::Contains("missing column 'V1_4_0'"), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("motion CSV rejects a bad rotation") {
  RobotModel m = build_tilthex();
  RestTrajectory rest(Eigen::VectorXd::Zero(m.n));
  auto samples = sample_trajectory(rest, 0, 1.0, 2);
  samples[1].motion.base_pose = Pose(2.0 * Mat3::Identity(), Vec3::Zero());
  std::ostringstream out;
  write_motion_csv(out, m, samples, 0);
  std::string path = temp_file("badrot.csv", out.str());
  CHECK_THROWS_WITH_AS(read_motion_csv(path, m, 0), doctest::Contains("not orthonormal"), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("force CSV round trip") {
  RobotModel m = build_tilthex();
  TiltHexTrajectory traj;
  const int r = 2;
  std::vector<std::vector<double>> rows;
  std::vector<GeneralizedForces> ref;
  for (double t : {0.0, 1.5, 3.0}) {
    ref.push_back(inverse_dynamics(m, traj.eval(t, r + 1), {}, r));
    rows.push_back(force_row(t, ref.back().Q1, ref.back().tau, r));
  }
  auto header = force_header(m, r);
  CHECK(header[1] == "Q1_0_0");
  CHECK(header[7] == "Q1_1_0");
  CHECK(header[6 * (r + 1) + 1] == "tau2_0");
  std::string path = temp_file("force.csv", contents_of(header, rows));
  auto back = read_force_csv(path, m, r);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].Q1 == ref[i].Q1);
    CHECK(back[i].tau == ref[i].tau);
  }
  CHECK_THROWS_WITH_AS(read_force_csv(path, m, 3), doctest::Contains("missing column"), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("force CSV ignores extra columns") {
  RobotModel m = build_tilthex();
  auto header = force_header(m, 0);
  header.push_back("note");
  std::vector<double> row(header.size(), 1.0);
  std::string path = temp_file("extra.csv", contents_of(header, {row}));
  auto back = read_force_csv(path, m, 0);
  REQUIRE(back.size() == 1);
  CHECK(back[0].tau.rows() == m.n);
  std::filesystem::remove(path);
}
