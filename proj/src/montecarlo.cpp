#include "ukfm/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <thread>

namespace ukfm {

double nees(const Eigen::VectorXd& xi, const Eigen::MatrixXd& P) {
  if (xi.size() != P.rows() || P.rows() != P.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "nees: error and covariance sizes disagree");
  }
  if (!xi.allFinite() || !P.allFinite()) throw Error(ErrorCode::SingularCovariance, "nees: non-finite input");
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-9 * P.trace() / static_cast<double>(P.rows());
    llt.compute(P + std::max(jitter, 0.0) * Eigen::MatrixXd::Identity(P.rows(), P.cols()));
    if (llt.info() != Eigen::Success || !(jitter > 0.0)) {
      throw Error(ErrorCode::SingularCovariance, "nees: covariance is not positive definite");
    }
  }
  return xi.dot(llt.solve(xi));
}

Eigen::MatrixXd check_directions(int n, CounterRng& rng, int random_count) {
  Eigen::MatrixXd dirs(n, n + random_count);
  dirs.leftCols(n).setIdentity();
  for (int j = 0; j < random_count; ++j) dirs.col(n + j) = rng.normal_vector(n).normalized();
  return dirs;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("UKFM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

BenchmarkReport aggregate(const ExampleInfo& info, const std::vector<std::vector<FilterTrace>>& trials) {
  BenchmarkReport rep;
  rep.example = info.name;
  rep.error_blocks = info.error_blocks;
  if (trials.empty()) return rep;
  const std::size_t nf = trials.front().size();
  const Eigen::Index nb = static_cast<Eigen::Index>(info.error_blocks.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t f = 0; f < nf; ++f) {
    FilterReport fr;
    fr.filter = trials.front()[f].filter;
    fr.runs = static_cast<int>(trials.size());
    std::size_t steps = 0;
    for (std::size_t r = 0; r < trials.size(); ++r) {
      const FilterTrace& tr = trials[r][f];
      steps = std::max(steps, tr.t.size());
      if (tr.diverged) {
        ++fr.diverged;
        fr.diverged_runs.push_back(static_cast<int>(r));
      }
    }
    fr.t = trials.front()[f].t;
    fr.rmse = Eigen::MatrixXd::Zero(steps, nb);
    fr.mean_nees.assign(steps, 0.0);
    const int ok = fr.runs - fr.diverged;
    // Sums run in fixed run order so the result is independent of scheduling.
    for (std::size_t r = 0; r < trials.size(); ++r) {
      const FilterTrace& tr = trials[r][f];
      if (tr.diverged) continue;
      for (std::size_t n = 0; n < steps; ++n) {
        if (n < tr.block_errors.size()) {
          fr.rmse.row(n) += tr.block_errors[n].cwiseAbs2().transpose();
        } else {
          fr.rmse.row(n).setConstant(nan);
        }
        fr.mean_nees[n] += tr.nees[n];
      }
    }
    if (ok > 0) {
      fr.rmse = (fr.rmse / ok).cwiseSqrt();
      for (double& v : fr.mean_nees) v /= ok;
    } else {
      fr.rmse.setConstant(nan);
      for (double& v : fr.mean_nees) v = nan;
    }
    fr.final_rmse = steps > 0 ? Eigen::VectorXd(fr.rmse.row(steps - 1).transpose()) : Eigen::VectorXd::Constant(nb, nan);
    double sum = 0.0;
    for (double v : fr.mean_nees) sum += v;
    fr.avg_nees = steps > 0 ? sum / static_cast<double>(steps) : nan;
    rep.filters.push_back(std::move(fr));
  }
  return rep;
}

BenchmarkReport benchmark(const Example& example, const std::vector<std::string>& filters, int runs, int steps,
                          std::uint64_t seed, double alpha, int threads) {
  if (runs < 1) throw Error(ErrorCode::InvalidConfig, "benchmark: runs must be >= 1");
  if (steps < 1) throw Error(ErrorCode::InvalidConfig, "benchmark: steps must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const int workers = std::min(resolve_threads(threads), runs);

  std::vector<std::vector<FilterTrace>> trials(runs);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(runs);
  const auto work = [&] {
    for (int r = next++; r < runs; r = next++) {
      try {
        trials[r] = example.trial(steps, seed, static_cast<std::uint64_t>(r), filters, alpha);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchmarkReport rep = aggregate(example.info(), trials);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace ukfm
