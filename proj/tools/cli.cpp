#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "ukfm/examples.hpp"
#include "ukfm/io.hpp"
#include "ukfm/models/models.hpp"

namespace ukfm::cli {

namespace {

struct RunConfig {
  std::string example;
  int steps = 0;  // 0: the example's default
  std::optional<double> dt;
  std::uint64_t seed = 1;
  double alpha = 1e-3;
  int runs = 10;
  std::vector<std::string> retractions;
  std::map<std::string, double> noise;
  std::string out;
  std::string landmarks;
  std::string log;
};

// Raw flag values; only the ones actually given override the config file.
struct Flags {
  std::string example;
  int steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  int runs = 0;
  std::string retractions;
  std::vector<std::string> noise;
  std::string config;
  std::string out;
  std::string landmarks;
  std::string log;
  std::string eps;
  double scale_inverse = 1.0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "example") c.example = v.get<std::string>();
      else if (key == "steps") c.steps = v.get<int>();
      else if (key == "dt") c.dt = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "runs") c.runs = v.get<int>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "landmarks") c.landmarks = v.get<std::string>();
      else if (key == "log") c.log = v.get<std::string>();
      else if (key == "retractions") {
        c.retractions = v.is_string() ? split(v.get<std::string>(), ',') : v.get<std::vector<std::string>>();
      } else if (key == "noise") {
        for (const auto& [name, val] : v.items()) c.noise[name] = val.get<double>();
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config file '" + path + "': " + e.what());
  }
}

struct Options {
  CLI::Option* steps = nullptr;
  CLI::Option* dt = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* retractions = nullptr;
  CLI::Option* noise = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* landmarks = nullptr;
  CLI::Option* log = nullptr;
};

Options add_common(CLI::App* cmd, Flags& f, bool with_runs) {
  Options o;
  cmd->add_option("example", f.example, "Registered example name")->required();
  o.steps = cmd->add_option("--steps", f.steps, "Number of filter steps");
  o.dt = cmd->add_option("--dt", f.dt, "Time step [s]");
  o.seed = cmd->add_option("--seed", f.seed, "Random seed");
  o.alpha = cmd->add_option("--alpha", f.alpha, "Sigma-point spread, in (0, 1]");
  if (with_runs) o.runs = cmd->add_option("--runs", f.runs, "Monte-Carlo runs");
  o.retractions = cmd->add_option("--retractions", f.retractions, "Comma-separated retraction names");
  o.noise = cmd->add_option("--noise", f.noise, "Model parameter override key=value (repeatable)");
  cmd->add_option("--config", f.config, "JSON config file");
  o.out = cmd->add_option("--out", f.out, "Output CSV path");
  o.landmarks = cmd->add_option("--landmarks", f.landmarks, "Landmark CSV file");
  return o;
}

RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig c;
  if (!f.config.empty()) apply_config_file(f.config, c);
  c.example = f.example;
  if (o.steps && o.steps->count()) c.steps = f.steps;
  if (o.dt && o.dt->count()) c.dt = f.dt;
  if (o.seed && o.seed->count()) c.seed = f.seed;
  if (o.alpha && o.alpha->count()) c.alpha = f.alpha;
  if (o.runs && o.runs->count()) c.runs = f.runs;
  if (o.retractions && o.retractions->count()) c.retractions = split(f.retractions, ',');
  if (o.out && o.out->count()) c.out = f.out;
  if (o.landmarks && o.landmarks->count()) c.landmarks = f.landmarks;
  if (o.log && o.log->count()) c.log = f.log;
  if (o.noise) {
    for (const auto& kv : f.noise) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--noise expects key=value, got '" + kv + "'");
      c.noise[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    }
  }
  if (c.steps < 0) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1]");
  if (c.runs < 1) throw Error(ErrorCode::InvalidConfig, "runs must be >= 1");
  if (c.dt && !(*c.dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
  return c;
}

ModelParams model_params(const RunConfig& c) {
  ModelParams p;
  p.values = c.noise;
  p.dt = c.dt;
  if (!c.landmarks.empty()) {
    if (c.example != "inertial_nav" && c.example != "slam2d") {
      throw Error(ErrorCode::InvalidConfig, "example " + c.example + " does not use landmarks");
    }
    std::ifstream in(c.landmarks);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open landmark file '" + c.landmarks + "'");
    try {
      p.landmarks = read_landmarks(in);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, c.landmarks + ": " + e.what());
    }
  }
  return p;
}

std::vector<std::string> select_filters(const RunConfig& c, const ExampleInfo& info, bool all_by_default) {
  std::vector<std::string> filters = c.retractions;
  if (filters.empty()) {
    if (all_by_default) return info.retractions;
    return {info.retractions.front()};
  }
  for (const auto& f : filters) {
    bool known = false;
    for (const auto& r : info.retractions) known = known || r == f;
    if (!known) {
      std::string list;
      for (const auto& r : info.retractions) list += (list.empty() ? "" : ", ") + r;
      throw Error(ErrorCode::InvalidConfig, "example " + info.name + " has no retraction '" + f + "' (available: " +
                                                list + ")");
    }
  }
  return filters;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  out << content;
}

void print_summary(std::ostream& out, const BenchmarkReport& rep) {
  std::vector<std::string> head{"filter"};
  for (const auto& b : rep.error_blocks) head.push_back("rmse_" + b);
  head.insert(head.end(), {"nees", "diverged", "runs"});
  std::vector<std::vector<std::string>> rows{head};
  for (const auto& f : rep.filters) {
    std::vector<std::string> r{f.filter};
    for (Eigen::Index b = 0; b < f.final_rmse.size(); ++b) r.push_back(format_double(f.final_rmse(b)));
    r.push_back(format_double(f.avg_nees));
    r.push_back(std::to_string(f.diverged));
    r.push_back(std::to_string(f.runs));
    rows.push_back(r);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
  }
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      out << (k == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[k])) << r[k]
          << (k + 1 < r.size() ? "  " : "\n");
    }
  }
  out << std::left;
}

void report_failures(std::ostream& err, const std::vector<FilterTrace>& traces) {
  for (const auto& t : traces) {
    if (t.diverged) err << "filter " << t.filter << " diverged: " << t.failure << "\n";
  }
}

int cmd_run_log(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.example != "imu_gnss") throw Error(ErrorCode::InvalidConfig, "--log is only supported by imu_gnss");
  std::ifstream in(c.log);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open log '" + c.log + "'");
  ImuGnssLog log;
  try {
    log = read_imu_gnss_log(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, c.log + ": " + e.what());
  }
  const StandardExample<MixedState> ex(imu_gnss(model_params(c)), 0);
  const ExampleInfo info = ex.info();
  const auto filters = select_filters(c, info, false);
  std::size_t n = log.t.size() - 1;
  if (c.steps > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(c.steps));
  std::vector<Eigen::VectorXd> inputs(log.imu.begin() + 1, log.imu.begin() + 1 + n);
  std::vector<std::optional<Eigen::VectorXd>> meas(log.gnss.begin() + 1, log.gnss.begin() + 1 + n);
  std::vector<double> times, dts;
  for (std::size_t k = 1; k <= n; ++k) {
    times.push_back(log.t[k]);
    dts.push_back(log.t[k] - log.t[k - 1]);
  }
  const FilterTrace tr =
      ex.run_filter(ex.model().retraction(filters.front()), inputs, meas, times, {}, c.alpha, dts);
  if (!c.out.empty()) {
    std::ostringstream csv;
    write_estimate_csv(csv, info, tr);
    write_file(c.out, csv.str());
  }
  if (tr.diverged) {
    report_failures(err, {tr});
    return kDiverged;
  }
  out << "processed " << n << " log rows with filter " << tr.filter << " (no ground truth, NEES not available)\n";
  return kOk;
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.log.empty()) return cmd_run_log(c, out, err);
  const auto ex = make_example(c.example, model_params(c));
  const ExampleInfo info = ex->info();
  const auto filters = select_filters(c, info, false);
  if (filters.size() != 1) throw Error(ErrorCode::InvalidConfig, "run takes a single retraction");
  const int steps = c.steps > 0 ? c.steps : info.default_steps;
  const auto traces = ex->trial(steps, c.seed, 0, filters, c.alpha);
  if (!c.out.empty()) {
    std::ostringstream csv;
    write_estimate_csv(csv, info, traces.front());
    write_file(c.out, csv.str());
  }
  print_summary(out, aggregate(info, {traces}));
  if (traces.front().diverged) {
    report_failures(err, traces);
    return kDiverged;
  }
  return kOk;
}

int cmd_benchmark(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ex = make_example(c.example, model_params(c));
  const ExampleInfo info = ex->info();
  const auto filters = select_filters(c, info, true);
  const int steps = c.steps > 0 ? c.steps : info.default_steps;
  const BenchmarkReport rep = benchmark(*ex, filters, c.runs, steps, c.seed, c.alpha);
  if (!c.out.empty()) {
    std::ostringstream csv;
    write_benchmark_csv(csv, rep);
    write_file(c.out, csv.str());
  }
  print_summary(out, rep);
  out << "runtime_s " << std::fixed << std::setprecision(3) << rep.wall_seconds << std::defaultfloat << "\n";
  for (const auto& f : rep.filters) {
    if (f.diverged == 0) continue;
    err << "filter " << f.filter << " diverged in runs:";
    for (int r : f.diverged_runs) err << ' ' << r;
    err << "\n";
  }
  return kOk;
}

int cmd_check(const RunConfig& c, const Flags& f, std::ostream& out) {
  const auto ex = make_example(c.example, model_params(c));
  std::vector<double> eps;
  for (const auto& s : split(f.eps, ',')) eps.push_back(parse_double(s));
  if (eps.empty()) throw Error(ErrorCode::InvalidConfig, "--eps needs at least one value");
  for (double e : eps) {
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidConfig, "--eps values must be positive");
  }
  const auto reports = ex->check_retractions(eps, c.seed, f.scale_inverse);
  bool all = true;
  for (const auto& [name, rep] : reports) {
    if (!c.retractions.empty() && std::find(c.retractions.begin(), c.retractions.end(), name) == c.retractions.end()) {
      continue;
    }
    out << name << ": phi(ref,0)==ref " << (rep.identity_exact ? "PASS" : "FAIL") << ", phi_inv(ref,ref)==0 "
        << (rep.zero_inverse ? "PASS" : "FAIL") << "\n";
    for (const auto& e : rep.epsilons) {
      out << "  eps " << format_double(e.epsilon) << " residual " << format_double(e.residual) << " ratio "
          << format_double(e.ratio) << " " << (e.pass ? "PASS" : "FAIL") << "\n";
    }
    out << "  jacobian max|J-I| " << format_double(rep.jacobian_error) << " " << (rep.jacobian_pass ? "PASS" : "FAIL")
        << "\n";
    all = all && rep.pass();
  }
  out << (all ? "all retractions pass" : "retraction check failed") << "\n";
  return all ? kOk : kConfigError;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.example != "imu_gnss") throw Error(ErrorCode::InvalidConfig, "simulate only writes imu_gnss logs");
  if (c.out.empty()) throw Error(ErrorCode::InvalidConfig, "simulate needs --out");
  const ModelSpec<MixedState> m = imu_gnss(model_params(c));
  const int steps = c.steps > 0 ? c.steps : 2000;
  const Trajectory<MixedState> traj = simulate(m, steps, c.seed, 0);
  ImuGnssLog log;
  log.t.push_back(0.0);
  log.imu.push_back(traj.inputs.front());
  log.gnss.emplace_back(std::nullopt);
  for (int i = 0; i < steps; ++i) {
    log.t.push_back(traj.times[i]);
    log.imu.push_back(traj.inputs[i]);
    log.gnss.push_back(traj.measurements[i]);
  }
  std::ostringstream csv;
  write_imu_gnss_log(csv, log);
  write_file(c.out, csv.str());
  out << "wrote " << steps + 1 << " rows to " << c.out << "\n";
  return kOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unscented Kalman filtering on manifolds"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "Run one filter on a simulated scenario (or an imu_gnss log)");
  Options run_opts = add_common(run, f, false);
  run_opts.log = run->add_option("--log", f.log, "IMU/GNSS log CSV (imu_gnss only)");

  auto* bench = app.add_subcommand("benchmark", "Monte-Carlo comparison of retractions");
  const Options bench_opts = add_common(bench, f, true);

  auto* check = app.add_subcommand("check-retraction", "Validate the built-in retractions of an example");
  const Options check_opts = add_common(check, f, false);
  f.eps = "1e-1,1e-2,1e-3,1e-4";
  check->add_option("--eps", f.eps, "Comma-separated perturbation sizes");
  check->add_option("--scale-inverse", f.scale_inverse)->group("");

  auto* sim = app.add_subcommand("simulate", "Write a simulated IMU/GNSS log");
  const Options sim_opts = add_common(sim, f, false);

  std::vector<std::string> argv_store{"ukfm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(resolve(f, run_opts), out, err);
    if (bench->parsed()) return cmd_benchmark(resolve(f, bench_opts), out, err);
    if (check->parsed()) return cmd_check(resolve(f, check_opts), f, out);
    if (sim->parsed()) return cmd_simulate(resolve(f, sim_opts), out);
  } catch (const StepError& e) {
    err << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool config = e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::ParseError ||
                        e.code() == ErrorCode::InvalidAlpha;
    return config ? kConfigError : kDiverged;
  }
  return kConfigError;
}

}  // namespace ukfm::cli
