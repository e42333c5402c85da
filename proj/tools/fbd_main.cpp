#include "fbd/audit.hpp"
#include "fbd/bench.hpp"
#include "fbd/hybrid_dynamics.hpp"
#include "fbd/io.hpp"
#include "fbd/simulate.hpp"
#include "fbd/tilthex.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

using namespace fbd;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;

struct Common {
  std::string model = "builtin:tilthex";
  std::string traj = "builtin:tilthex";
  std::string out;
  std::string inputs;
  int order = 3;
  double dt = 0.01;
  int steps = 3000;
  double time_scale = 1.0;
};

RobotModel get_model(const std::string& spec) {
  if (spec == "builtin:tilthex") return build_tilthex();
  return load_model(spec);
}

std::unique_ptr<Trajectory> builtin_trajectory(const RobotModel& model, const Common& o) {
  if (o.traj == "builtin:tilthex") {
    if (model.n != 6) throw std::invalid_argument("builtin:tilthex trajectory drives 6 joints, model has " + std::to_string(model.n));
    TiltHexTrajectoryParams p;
    p.time_scale = o.time_scale;
    return std::make_unique<TiltHexTrajectory>(p);
  }
  if (o.traj == "builtin:rest") return std::make_unique<RestTrajectory>(Eigen::VectorXd::Zero(model.n));
  return nullptr;
}

// Samples with kinematic order K (base twist 0..K, joints 0..K+1).
std::vector<MotionSample> get_samples(const RobotModel& model, const Common& o, int K) {
  if (auto traj = builtin_trajectory(model, o)) {
    if (!(o.dt > 0.0) || o.steps < 1) throw std::invalid_argument("--dt must be positive and --steps at least 1");
    return sample_trajectory(*traj, K, o.dt, o.steps);
  }
  if (o.traj.rfind("builtin:", 0) == 0) throw std::invalid_argument("unknown builtin trajectory '" + o.traj + "'");
  return read_motion_csv(o.traj, model, K);
}

std::vector<GivenForces> get_forces(const RobotModel& model, const Common& o, const std::vector<MotionSample>& samples, int r) {
  std::vector<GivenForces> out;
  out.reserve(samples.size());
  if (!o.inputs.empty()) {
    auto f = read_force_csv(o.inputs, model, r);
    if (f.size() != samples.size())
      throw IoError(o.inputs + ": " + std::to_string(f.size()) + " force rows for " + std::to_string(samples.size()) + " trajectory rows");
    for (auto& s : f) out.push_back({std::move(s.Q1), std::move(s.tau)});
    return out;
  }
  KinematicsCache cache;
  GeneralizedForces gf;
  LoadWorkspace lw;
  LoadInput none;
  for (const auto& s : samples) {
    forward_kinematics(model, s.motion, r + 1, cache);
    hgrne(model, cache, none, r, gf, lw);
    out.push_back({gf.Q1, gf.tau});
  }
  return out;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void add_model(CLI::App* c, Common& o) { c->add_option("--model", o.model, "model file or builtin:tilthex")->capture_default_str(); }

void add_traj(CLI::App* c, Common& o) {
  c->add_option("--traj", o.traj, "trajectory CSV, builtin:tilthex or builtin:rest")->capture_default_str();
  c->add_option("--dt", o.dt, "sample period for builtin trajectories (s)")->capture_default_str();
  c->add_option("--steps", o.steps, "sample count for builtin trajectories")->capture_default_str();
  c->add_option("--time-scale", o.time_scale, "speed factor for builtin:tilthex")->capture_default_str();
}

void add_order(CLI::App* c, Common& o) {
  c->add_option("--order", o.order, "derivative order r")->capture_default_str()->check(CLI::Range(0, kMaxBinom - 4));
}

void add_out(CLI::App* c, Common& o) { c->add_option("--out", o.out, "output CSV (default stdout)"); }

std::string order_col(const std::string& stem, int k) { return stem + "_" + std::to_string(k); }

int cmd_validate(const Common& o) {
  if (o.model == "builtin:tilthex") {
    auto v = validate(build_tilthex());
    for (const auto& s : v) std::cout << "violation: " << s << "\n";
    if (v.empty()) std::cout << "OK\n";
    return v.empty() ? 0 : kExitCheckFailed;
  }
  ModelSpecs specs = load_specs(o.model);
  auto v = check_specs(specs);
  if (v.empty()) {
    RobotModel m = build_model(specs.bodies, specs.gravity);
    v = validate(m);
    if (v.empty()) {
      std::cout << "OK: " << m.N << " bodies, " << m.n << " joints, total mass " << m.total_mass() << " kg\n";
      return 0;
    }
  }
  for (const auto& s : v) std::cout << "violation: " << s << "\n";
  std::cout << v.size() << " violation(s) in " << o.model << "\n";
  return kExitCheckFailed;
}

int cmd_id(const Common& o, bool body_frame) {
  RobotModel model = get_model(o.model);
  const int r = o.order;
  auto samples = get_samples(model, o, r + 1);
  Output out(o.out);
  CsvWriter w(out.stream());
  auto h = force_header(model, r);
  if (body_frame)
    for (int k = 0; k <= r; ++k)
      for (int c = 0; c < 6; ++c) h.push_back("Wb_" + std::to_string(k) + "_" + std::to_string(c));
  w.header(h);
  KinematicsCache cache;
  GeneralizedForces gf;
  LoadWorkspace lw;
  LoadInput none;
  for (const auto& s : samples) {
    forward_kinematics(model, s.motion, r + 1, cache);
    hgrne(model, cache, none, r, gf, lw);
    auto row = force_row(s.t, gf.Q1, gf.tau, r);
    if (body_frame) {
      Mat6X Wb = base_wrench_to_body_frame(gf.Q1, s.motion.base_pose, s.motion.base_twist, r);
      for (int k = 0; k <= r; ++k)
        for (int c = 0; c < 6; ++c) row.push_back(Wb(c, k));
    }
    w.row(row);
  }
  return 0;
}

std::vector<std::string> accel_header(const RobotModel& model, int r) {
  std::vector<std::string> h{"t"};
  for (int k = 1; k <= r + 1; ++k)
    for (int c = 0; c < 6; ++c) h.push_back("V1_" + std::to_string(k) + "_" + std::to_string(c));
  for (int b = 1; b < model.N; ++b)
    for (int k = 2; k <= r + 2; ++k) h.push_back(order_col("q" + std::to_string(b + 1), k));
  return h;
}

void append_accel(std::vector<double>& row, const Mat6X& V1, const Eigen::MatrixXd& qdd, int r) {
  for (int k = 0; k <= r; ++k)
    for (int c = 0; c < 6; ++c) row.push_back(V1(c, k));
  for (int j = 0; j < qdd.rows(); ++j)
    for (int k = 0; k <= r; ++k) row.push_back(qdd(j, k));
}

int cmd_fd(const Common& o) {
  RobotModel model = get_model(o.model);
  const int r = o.order;
  auto samples = get_samples(model, o, r + 1);
  auto forces = get_forces(model, o, samples, r);
  Output out(o.out);
  CsvWriter w(out.stream());
  w.header(accel_header(model, r));
  ForwardDynamicsWorkspace ws;
  AccelOutput acc;
  ForwardDynamicsInput in;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = samples[i].motion;
    in.base_pose = m.base_pose;
    in.base_twist = m.base_twist.col(0);
    in.q = m.q.col(0);
    in.qdot = m.q.col(1);
    in.base_wrench = forces[i].Q1;
    in.tau = forces[i].tau;
    hgabi(model, in, r, ws, acc);
    std::vector<double> row{samples[i].t};
    append_accel(row, acc.V1, acc.qdd, r);
    w.row(row);
  }
  return 0;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    int v = std::stoi(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad integer '" + item + "'");
    ids.push_back(v);
  }
  return ids;
}

int cmd_hybrid(const Common& o, const std::string& jq, const std::string& base) {
  RobotModel model = get_model(o.model);
  const int r = o.order;
  if (base != "wrench" && base != "twist") throw std::invalid_argument("--base must be 'wrench' or 'twist'");
  HybridSpec spec;
  spec.Jq = parse_id_list(jq);
  for (int b = 2; b <= model.N; ++b)
    if (std::find(spec.Jq.begin(), spec.Jq.end(), b) == spec.Jq.end()) spec.Jtau.push_back(b);
  spec.base_mode = base == "wrench" ? BaseMode::WrenchGiven : BaseMode::TwistGiven;
  check_partition(model, spec);

  auto samples = get_samples(model, o, r + 1);
  auto forces = get_forces(model, o, samples, r);
  Output out(o.out);
  CsvWriter w(out.stream());
  auto h = accel_header(model, r);
  for (int k = 0; k <= r; ++k)
    for (int c = 0; c < 6; ++c) h.push_back("Q1_" + std::to_string(k) + "_" + std::to_string(c));
  for (int b = 1; b < model.N; ++b)
    for (int k = 0; k <= r; ++k) h.push_back(order_col("tau" + std::to_string(b + 1), k));
  w.header(h);
  LoadInput none;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = samples[i].motion;
    HybridState st{m.base_pose, m.base_twist.col(0), m.q.col(0), m.q.col(1)};
    spec.base_wrench = forces[i].Q1;
    spec.base_accel = m.base_twist.middleCols(1, r + 1);
    spec.qdd = m.q.middleCols(2, r + 1);
    spec.tau = forces[i].tau;
    HybridOutput ho = hghyb(model, st, spec, none, r);
    std::vector<double> row{samples[i].t};
    append_accel(row, ho.V1, ho.qdd, r);
    for (int k = 0; k <= r; ++k)
      for (int c = 0; c < 6; ++c) row.push_back(ho.base_wrench(c, k));
    for (int j = 0; j < model.n; ++j)
      for (int k = 0; k <= r; ++k) row.push_back(ho.tau(j, k));
    w.row(row);
  }
  return 0;
}

int cmd_roundtrip(const Common& o, double threshold) {
  RobotModel model = get_model(o.model);
  const int r = o.order;
  auto samples = get_samples(model, o, r + 1);
  std::vector<GivenForces> given;
  if (!o.inputs.empty()) given = get_forces(model, o, samples, r);
  RoundTripReport rep = roundtrip(model, samples, r, threshold, o.inputs.empty() ? nullptr : &given);
  std::cout << "round trip: " << rep.steps << " steps, order " << r << ", " << std::setprecision(3) << rep.seconds << " s\n";
  std::cout << "order  rel_err_V1      rel_err_q       worst\n";
  for (int k = 0; k <= r; ++k)
    std::cout << std::setw(5) << k << "  " << std::scientific << std::setprecision(3) << std::setw(14) << rep.err_V1[k] << "  "
              << std::setw(14) << rep.err_q[k] << "  " << std::setw(10) << rep.err[k] << std::defaultfloat << "\n";
  if (rep.pass()) {
    std::cout << "PASS: max relative error " << std::scientific << rep.worst << " <= " << threshold << "\n";
    return 0;
  }
  std::cout << "FAIL at order " << rep.first_failing_order << ": relative error " << std::scientific
            << rep.err[rep.first_failing_order] << " > " << threshold << "\n";
  return kExitCheckFailed;
}

int cmd_fdcheck(const Common& o, double step, int nsamples, double threshold) {
  RobotModel model = get_model(o.model);
  auto traj = builtin_trajectory(model, o);
  if (!traj) throw std::invalid_argument("fdcheck needs a builtin trajectory (builtin:tilthex or builtin:rest)");
  FdCheckReport rep = fdcheck(model, *traj, o.order, step, nsamples, threshold);
  std::vector<std::string> names;
  for (const auto& e : rep.entries)
    if (std::find(names.begin(), names.end(), e.quantity) == names.end()) names.push_back(e.quantity);
  std::cout << "finite-difference audit: order " << o.order << ", step " << step << ", " << nsamples << " sample times\n";
  std::cout << std::left << std::setw(8) << "stack";
  for (int k = 1; k <= o.order; ++k) std::cout << std::setw(11) << ("k=" + std::to_string(k));
  std::cout << "worst\n";
  for (const auto& nm : names) {
    std::cout << std::setw(8) << nm << std::scientific << std::setprecision(2);
    for (const auto& e : rep.entries)
      if (e.quantity == nm) std::cout << std::setw(11) << e.err;
    std::cout << rep.worst_of(nm) << (rep.worst_of(nm) <= threshold ? "" : "  !") << std::defaultfloat << "\n";
  }
  std::cout << std::right << (rep.pass() ? "PASS" : "FAIL") << ": worst relative error " << std::scientific << rep.worst
            << (rep.pass() ? " <= " : " > ") << threshold << "\n";
  return rep.pass() ? 0 : kExitCheckFailed;
}

std::vector<int> parse_int_list(const std::string& text) { return parse_id_list(text); }

int cmd_bench(const Common& o, const std::string& sweep, const std::string& algo, const std::string& nbod,
              const std::string& orders, BenchConfig cfg) {
  if (sweep == "over_N") cfg.sweep = Sweep::OverN;
  else if (sweep == "over_r") cfg.sweep = Sweep::OverR;
  else throw std::invalid_argument("--sweep must be over_N or over_r");
  if (algo == "id") cfg.algo = BenchAlgo::Inverse;
  else if (algo == "fd") cfg.algo = BenchAlgo::Forward;
  else throw std::invalid_argument("--algo must be id or fd");
  if (cfg.sweep == Sweep::OverN) {
    if (!nbod.empty()) cfg.bodies_per_branch = parse_int_list(nbod);
    cfg.orders = {o.order};
  } else {
    cfg.bodies_per_branch = {nbod.empty() ? 20 : parse_int_list(nbod).at(0)};
    cfg.orders = orders.empty() ? std::vector<int>{0, 1, 2, 3, 4, 5} : parse_int_list(orders);
  }
  check_config(cfg);
  auto rows = run_bench(cfg);
  Output out(o.out);
  CsvWriter w(out.stream());
  w.comment("sweep=" + sweep + " algo=" + algo + " reps=" + std::to_string(cfg.reps) + " warmup=" + std::to_string(cfg.warmup) +
            " trials=" + std::to_string(cfg.trials));
  w.comment("random inputs: uniform[-1,1] per component, mt19937_64 seeded with (seed, N, r, algo), seed=" +
            std::to_string(cfg.seed));
  w.header({"N", "r", "mean_s", "std_s"});
  for (const auto& b : rows) w.row({static_cast<double>(b.N), static_cast<double>(b.r), b.mean_s, b.std_s});
  if (cfg.sweep == Sweep::OverN && rows.size() >= 2) std::cerr << "log-log slope of time vs N: " << loglog_slope(rows) << "\n";
  return 0;
}

int cmd_traj(const Common& o) {
  RobotModel model = get_model(o.model);
  auto samples = get_samples(model, o, o.order);
  Output out(o.out);
  write_motion_csv(out.stream(), model, samples, o.order);
  return 0;
}

int cmd_simulate(const Common& o, std::uint64_t seed) {
  RobotModel model = get_model(o.model);
  if (!(o.dt > 0.0) || o.steps < 1) throw std::invalid_argument("--dt must be positive and --steps at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SimState s;
  s.q = Eigen::VectorXd::Zero(model.n);
  s.qdot.resize(model.n);
  for (auto& v : s.qdot) v = U(rng);
  for (int i = 0; i < 6; ++i) s.base_twist[i] = 0.2 * U(rng);
  ForwardDynamicsWorkspace ws;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.n);
  Output out(o.out);
  CsvWriter w(out.stream());
  w.comment("free motion from rest pose, zero base wrench and torques, seed=" + std::to_string(seed));
  w.header({"t", "energy"});
  const double E0 = mechanical_energy(model, s);
  double drift = 0.0;
  w.row({s.t, E0});
  for (int i = 0; i < o.steps; ++i) {
    s = rk4_step(model, s, o.dt, Vec6::Zero(), tau, ws);
    double E = mechanical_energy(model, s);
    drift = std::max(drift, std::abs(E - E0));
    w.row({s.t, E});
  }
  std::cerr << "max energy drift " << drift << " J (relative " << drift / std::max(1.0, std::abs(E0)) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order floating-base dynamics: inverse, forward and hybrid derivative stacks"};
  app.require_subcommand(1);
  Common o;

  auto* validate_cmd = app.add_subcommand("validate", "load a model file and report every invariant violation");
  add_model(validate_cmd, o);

  bool body_frame = false;
  auto* id_cmd = app.add_subcommand("id", "inverse dynamics stacks along a trajectory");
  add_model(id_cmd, o);
  add_traj(id_cmd, o);
  add_order(id_cmd, o);
  add_out(id_cmd, o);
  id_cmd->add_flag("--body-frame", body_frame, "also write the base wrench stack in the base body frame");

  auto* fd_cmd = app.add_subcommand("fd", "forward dynamics stacks from state and forces");
  add_model(fd_cmd, o);
  add_traj(fd_cmd, o);
  add_order(fd_cmd, o);
  add_out(fd_cmd, o);
  fd_cmd->add_option("--inputs", o.inputs, "force CSV as written by 'fbd id' (default: inverse dynamics of --traj)");

  std::string jq, base = "wrench";
  auto* hy_cmd = app.add_subcommand("hybrid", "hybrid dynamics with prescribed motion on --jq and torques elsewhere");
  add_model(hy_cmd, o);
  add_traj(hy_cmd, o);
  add_order(hy_cmd, o);
  add_out(hy_cmd, o);
  hy_cmd->add_option("--inputs", o.inputs, "force CSV as written by 'fbd id' (default: inverse dynamics of --traj)");
  hy_cmd->add_option("--jq", jq, "comma-separated body ids of motion-prescribed joints");
  hy_cmd->add_option("--base", base, "wrench (base wrench given) or twist (base twist derivatives given)")->capture_default_str();

  double rt_threshold = 1e-6;
  auto* rt_cmd = app.add_subcommand("roundtrip", "inverse then forward dynamics, per-order relative error");
  add_model(rt_cmd, o);
  add_traj(rt_cmd, o);
  add_order(rt_cmd, o);
  rt_cmd->add_option("--inputs", o.inputs, "use these forces instead of inverse dynamics");
  rt_cmd->add_option("--threshold", rt_threshold, "pass threshold")->capture_default_str();

  double step = 1e-3, fd_threshold = 1e-4;
  int fd_samples = 12;
  auto* fc_cmd = app.add_subcommand("fdcheck", "finite-difference audit of every derivative stack");
  add_model(fc_cmd, o);
  add_traj(fc_cmd, o);
  add_order(fc_cmd, o);
  fc_cmd->add_option("--step", step, "finite-difference step (s)")->capture_default_str();
  fc_cmd->add_option("--samples", fd_samples, "interior sample times")->capture_default_str()->check(CLI::PositiveNumber);
  fc_cmd->add_option("--threshold", fd_threshold, "pass threshold")->capture_default_str();

  BenchConfig bcfg;
  std::string sweep = "over_N", algo = "id", nbod, orders;
  auto* bench_cmd = app.add_subcommand("bench", "timing sweeps over tree size or derivative order");
  add_order(bench_cmd, o);
  add_out(bench_cmd, o);
  bench_cmd->add_option("--sweep", sweep, "over_N or over_r")->capture_default_str();
  bench_cmd->add_option("--algo", algo, "id or fd")->capture_default_str();
  bench_cmd->add_option("--nbod", nbod, "bodies per branch, comma-separated (N = 1 + 5*N_BOD)");
  bench_cmd->add_option("--orders", orders, "orders for over_r, comma-separated");
  bench_cmd->add_option("--reps", bcfg.reps, "calls per timing")->capture_default_str();
  bench_cmd->add_option("--warmup", bcfg.warmup, "untimed calls first")->capture_default_str();
  bench_cmd->add_option("--trials", bcfg.trials, "timings per point, fastest mean kept")->capture_default_str();
  bench_cmd->add_option("--seed", bcfg.seed, "random input seed")->capture_default_str();

  auto* traj_cmd = app.add_subcommand("traj", "export a builtin trajectory as CSV");
  add_model(traj_cmd, o);
  add_traj(traj_cmd, o);
  add_order(traj_cmd, o);
  add_out(traj_cmd, o);

  std::uint64_t sim_seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "free-motion RK4 run, writes the mechanical energy");
  add_model(sim_cmd, o);
  add_out(sim_cmd, o);
  sim_cmd->add_option("--dt", o.dt, "step (s)")->capture_default_str();
  sim_cmd->add_option("--steps", o.steps, "step count")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "initial velocity seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*validate_cmd) return cmd_validate(o);
    if (*id_cmd) return cmd_id(o, body_frame);
    if (*fd_cmd) return cmd_fd(o);
    if (*hy_cmd) return cmd_hybrid(o, jq, base);
    if (*rt_cmd) return cmd_roundtrip(o, rt_threshold);
    if (*fc_cmd) return cmd_fdcheck(o, step, fd_samples, fd_threshold);
    if (*bench_cmd) return cmd_bench(o, sweep, algo, nbod, orders, bcfg);
    if (*traj_cmd) return cmd_traj(o);
    if (*sim_cmd) return cmd_simulate(o, sim_seed);
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return 0;
}
