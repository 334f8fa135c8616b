#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ukfm/models/model_spec.hpp"
#include "ukfm/rng.hpp"
#include "ukfm/sigma_core.hpp"

namespace ukfm {

/// Simulated scenario: truth[0] is the initial state, truth[i + 1] the state
/// after inputs[i]; measurements[i] is observed at truth[i + 1].
template <class State>
struct Trajectory {
  std::vector<State> truth;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<std::optional<Eigen::VectorXd>> measurements;
  std::vector<double> times;  ///< times[i] of truth[i + 1]
};

/// Random streams of run r are (seed, 4r + k): k = 0 initial truth,
/// 1 process noise, 2 measurement noise.
inline constexpr std::uint64_t kStreamsPerRun = 4;

template <class State>
Trajectory<State> simulate(const ModelSpec<State>& model, int steps, std::uint64_t seed, std::uint64_t run = 0) {
  if (steps < 1) throw Error(ErrorCode::InvalidConfig, "simulate: steps must be >= 1");
  CounterRng init_rng(seed, kStreamsPerRun * run);
  CounterRng process_rng(seed, kStreamsPerRun * run + 1);
  CounterRng sensor_rng(seed, kStreamsPerRun * run + 2);
  const GaussianSampler w(model.filter.Q);
  const GaussianSampler v(model.filter.R);

  Trajectory<State> out;
  out.inputs = model.inputs(steps);
  out.truth.reserve(steps + 1);
  out.truth.push_back(model.draw_truth0 ? model.draw_truth0(model.truth0, init_rng) : model.truth0);
  out.measurements.resize(steps);
  out.times.resize(steps);
  const int period = model.measurement_period;
  for (int i = 0; i < steps; ++i) {
    out.truth.push_back(model.filter.f(out.truth.back(), out.inputs[i], w.sample(process_rng), model.filter.dt));
    out.times[i] = (i + 1) * model.filter.dt;
    if (period > 0 && (i + 1) % period == 0) {
      out.measurements[i] = (model.filter.h(out.truth.back()) + v.sample(sensor_rng)).eval();
    }
  }
  return out;
}

/// xi^T P^-1 xi. Falls back to the jittered factorization used by the filter,
/// throws SingularCovariance if P still cannot be factored.
double nees(const Eigen::VectorXd& xi, const Eigen::MatrixXd& P);

/// One filter run against its truth.
template <class State>
struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<State> truth;  ///< truth at steps 1..N
  std::vector<Belief<State>> beliefs;
  std::vector<Eigen::VectorXd> errors;  ///< phi_inv(mean_n, truth_n)
};

template <class State>
RunRecord<State> make_record(std::uint64_t seed, const Trajectory<State>& traj, std::vector<Belief<State>> beliefs,
                             const Retraction<State>& retraction) {
  RunRecord<State> rec;
  rec.seed = seed;
  rec.truth.assign(traj.truth.begin() + 1, traj.truth.begin() + 1 + beliefs.size());
  rec.beliefs = std::move(beliefs);
  rec.errors.reserve(rec.beliefs.size());
  for (std::size_t n = 0; n < rec.beliefs.size(); ++n) {
    rec.errors.push_back(retraction.phi_inv(rec.beliefs[n].mean, rec.truth[n]));
  }
  return rec;
}

template <class State>
std::vector<double> nees(const RunRecord<State>& rec) {
  std::vector<double> out(rec.errors.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = nees(rec.errors[n], rec.beliefs[n].cov);
  return out;
}

inline constexpr double kDivergenceNees = 1e6;

/// Model-independent view of one filter run, ready for reporting.
struct FilterTrace {
  std::string filter;
  bool diverged = false;
  std::string failure;          ///< error message when the run aborted
  std::vector<double> t;        ///< per step
  std::vector<std::vector<double>> state;  ///< estimate columns per step
  std::vector<std::vector<double>> cov_diag;
  std::vector<double> nees;
  std::vector<Eigen::VectorXd> block_errors;
};

struct ExampleInfo {
  std::string name;
  std::vector<std::string> retractions;
  std::vector<std::string> state_columns;
  std::vector<std::string> cov_columns;
  std::vector<std::string> error_blocks;
  double dt = 0.0;
  int default_steps = 1000;
};

struct NamedReport {
  std::string filter;
  RetractionReport report;
};

/// A registered example, erased over its state type.
class Example {
 public:
  virtual ~Example() = default;
  virtual ExampleInfo info() const = 0;
  /// Simulates run `run` once and feeds the same data to every filter.
  virtual std::vector<FilterTrace> trial(int steps, std::uint64_t seed, std::uint64_t run,
                                         const std::vector<std::string>& filters, double alpha) const = 0;
  /// Validates every built-in retraction at a few reference states. A
  /// `scale_inverse` other than 1 multiplies phi_inv, for fault injection.
  virtual std::vector<NamedReport> check_retractions(std::span<const double> epsilons, std::uint64_t seed,
                                                     double scale_inverse = 1.0) const = 0;
};

/// Finite-difference Jacobian of xi -> to.phi_inv(ref, from.phi(ref, xi)) at 0.
template <class State>
Eigen::MatrixXd chart_jacobian(const Retraction<State>& from, const Retraction<State>& to, const State& ref) {
  const int n = from.dimension(ref);
  constexpr double h = 1e-6;
  Eigen::MatrixXd J(to.dimension(ref), n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = h;
    J.col(j) = (to.phi_inv(ref, from.phi(ref, e)) - to.phi_inv(ref, from.phi(ref, -e))) / (2.0 * h);
  }
  return J;
}

/// Initial covariance expressed in the coordinates of `r`.
template <class State>
Eigen::MatrixXd initial_covariance(const ModelSpec<State>& model, const Retraction<State>& r) {
  if (r.name == model.chart.name) return model.initial.cov;
  const Eigen::MatrixXd J = chart_jacobian(model.chart, r, model.initial.mean);
  return symmetrize(J * model.initial.cov * J.transpose());
}

template <class State>
Retraction<State> scaled_inverse(Retraction<State> r, double scale) {
  if (scale == 1.0) return r;
  auto inv = r.phi_inv;
  r.phi_inv = [inv, scale](const State& ref, const State& x) { return (scale * inv(ref, x)).eval(); };
  return r;
}

/// Random unit directions (plus the canonical basis) for retraction checks.
Eigen::MatrixXd check_directions(int n, CounterRng& rng, int random_count = 8);

/// Adaptor from a ModelSpec to the Example interface.
template <class State>
class StandardExample : public Example {
 public:
  explicit StandardExample(ModelSpec<State> model, int default_steps) : model_(std::move(model)), steps_(default_steps) {}

  const ModelSpec<State>& model() const { return model_; }

  ExampleInfo info() const override {
    ExampleInfo i;
    i.name = model_.name;
    for (const auto& r : model_.retractions) i.retractions.push_back(r.name);
    i.state_columns = model_.state_columns;
    for (Eigen::Index k = 0; k < model_.initial.cov.rows(); ++k) i.cov_columns.push_back("P_" + std::to_string(k));
    i.error_blocks = model_.error_blocks;
    i.dt = model_.filter.dt;
    i.default_steps = steps_;
    return i;
  }

  /// Runs one filter on given data; never throws on numerical failure.
  FilterTrace run_filter(const Retraction<State>& r, std::span<const Eigen::VectorXd> inputs,
                         std::span<const std::optional<Eigen::VectorXd>> measurements, std::span<const double> times,
                         std::span<const State> truth, double alpha, std::span<const double> dts = {}) const {
    FilterTrace tr;
    tr.filter = r.name;
    tr.t.assign(times.begin(), times.end());
    std::vector<Belief<State>> beliefs;
    try {
      const Belief<State> init{model_.initial.mean, initial_covariance(model_, r)};
      beliefs = filter_run(model_.filter, init, inputs, measurements, r, alpha, dts);
    } catch (const Error& e) {
      tr.diverged = true;
      tr.failure = e.what();
      return tr;
    }
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
      const auto& b = beliefs[n];
      tr.state.push_back(model_.state_values(b.mean));
      tr.cov_diag.emplace_back(b.cov.diagonal().data(), b.cov.diagonal().data() + b.cov.rows());
      if (truth.empty()) {
        tr.nees.push_back(std::nan(""));
        continue;
      }
      try {
        const double e = nees(r.phi_inv(b.mean, truth[n]), b.cov);
        tr.nees.push_back(e);
        if (!(e <= kDivergenceNees)) {
          tr.diverged = true;
          if (tr.failure.empty()) tr.failure = "NEES above divergence threshold at step " + std::to_string(n + 1);
        }
      } catch (const Error& err) {
        tr.nees.push_back(std::nan(""));
        tr.diverged = true;
        if (tr.failure.empty()) tr.failure = "step " + std::to_string(n + 1) + ": " + err.what();
      }
      tr.block_errors.push_back(model_.block_errors(truth[n], b.mean));
    }
    return tr;
  }

  std::vector<FilterTrace> trial(int steps, std::uint64_t seed, std::uint64_t run,
                                 const std::vector<std::string>& filters, double alpha) const override {
    const Trajectory<State> traj = simulate(model_, steps, seed, run);
    const std::span<const State> truth(traj.truth.data() + 1, traj.truth.size() - 1);
    std::vector<FilterTrace> out;
    for (const auto& name : filters) {
      out.push_back(run_filter(model_.retraction(name), traj.inputs, traj.measurements, traj.times, truth, alpha));
    }
    return out;
  }

  std::vector<NamedReport> check_retractions(std::span<const double> epsilons, std::uint64_t seed,
                                             double scale_inverse) const override {
    CounterRng rng(seed, 1u << 20);
    const GaussianSampler spread(model_.initial.cov);
    std::vector<State> refs{model_.initial.mean};
    for (int k = 0; k < 3; ++k) refs.push_back(model_.chart.phi(model_.initial.mean, spread.sample(rng)));
    std::vector<NamedReport> out;
    for (const auto& base : model_.retractions) {
      const Retraction<State> r = scaled_inverse(base, scale_inverse);
      NamedReport worst{r.name, {}};
      bool first = true;
      for (const auto& ref : refs) {
        const Eigen::MatrixXd dirs = check_directions(r.dimension(ref), rng);
        RetractionReport rep = check_retraction(r, ref, epsilons, dirs);
        // Keep the first failure, otherwise the largest Jacobian error.
        if (first || (worst.report.pass() && (!rep.pass() || rep.jacobian_error > worst.report.jacobian_error))) {
          worst.report = rep;
        }
        first = false;
      }
      out.push_back(worst);
    }
    return out;
  }

 private:
  ModelSpec<State> model_;
  int steps_;
};

// ---------------------------------------------------------------------------
// Benchmark.

struct FilterReport {
  std::string filter;
  std::vector<double> t;
  Eigen::MatrixXd rmse;            ///< steps x blocks, over non-diverged runs
  std::vector<double> mean_nees;   ///< per step, over non-diverged runs
  Eigen::VectorXd final_rmse;
  double avg_nees = 0.0;           ///< time average of mean_nees
  int runs = 0;
  int diverged = 0;
  std::vector<int> diverged_runs;
};

struct BenchmarkReport {
  std::string example;
  std::vector<std::string> error_blocks;
  std::vector<FilterReport> filters;
  double wall_seconds = 0.0;  ///< informational, never written to CSV
};

/// Worker count: `requested` if positive, else UKFM_THREADS if set and
/// positive, else the hardware concurrency.
int resolve_threads(int requested = 0);

/// Aggregates trials (trials[run][filter]) in fixed run order.
BenchmarkReport aggregate(const ExampleInfo& info, const std::vector<std::vector<FilterTrace>>& trials);

/// Runs `runs` independent trials concurrently (runs are seeded by index, so
/// the result does not depend on scheduling) and aggregates them.
BenchmarkReport benchmark(const Example& example, const std::vector<std::string>& filters, int runs, int steps,
                          std::uint64_t seed, double alpha, int threads = 0);

}  // namespace ukfm
