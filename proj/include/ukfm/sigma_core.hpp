#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ukfm/error.hpp"
#include "ukfm/retraction.hpp"

namespace ukfm {

/// Scaled unscented transform weights (kappa = 0, beta = 2).
struct SigmaWeights {
  int n = 0;
  double lambda = 0.0;
  double w_m = 0.0;   ///< mean weight of the central point
  double w_0c = 0.0;  ///< covariance weight of the central point
  double w_j = 0.0;   ///< common weight of points 1..2n
};

/// Throws InvalidAlpha unless 0 < alpha <= 1 and n >= 1.
SigmaWeights set_weights(int n, double alpha);

/// Lower-triangular Cholesky factor of P. On failure, retries once with
/// 1e-9 * trace(P) / d added to the diagonal, then throws CholeskyFailure.
/// An all-zero matrix yields a zero factor.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& P);

/// Columns 0..d-1 are the columns of chol((lambda + d) P), columns d..2d-1
/// their negatives.
Eigen::MatrixXd sigma_points(const Eigen::MatrixXd& P, double lambda);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& P) { return 0.5 * (P + P.transpose()); }

/// chi ~ N_phi(mean, cov).
template <class State>
struct Belief {
  State mean;
  Eigen::MatrixXd cov;
};

template <class State>
using PropagationFn =
    std::function<State(const State&, const Eigen::VectorXd& omega, const Eigen::VectorXd& w, double dt)>;

template <class State>
using ObservationFn = std::function<Eigen::VectorXd(const State&)>;

/// Intermediate quantities of one update, for inspection in tests.
struct UpdateTrace {
  Eigen::VectorXd y_bar;
  Eigen::MatrixXd P_yy;
  Eigen::MatrixXd P_xi_y;
  Eigen::MatrixXd K;
  Eigen::VectorXd xi_bar;
};

/// Bayesian update with sigma points drawn in the tangent coordinates of the
/// retraction and an additive measurement noise of covariance R.
template <class State>
Belief<State> update(const Belief<State>& belief, const Eigen::VectorXd& y, const ObservationFn<State>& h,
                     const Eigen::MatrixXd& R, const Retraction<State>& retraction, double alpha,
                     UpdateTrace* trace = nullptr) {
  const int d = static_cast<int>(belief.cov.rows());
  const SigmaWeights w = set_weights(d, alpha);
  const Eigen::MatrixXd xis = sigma_points(belief.cov, w.lambda);

  const Eigen::VectorXd y0 = h(belief.mean);
  const Eigen::Index p = y0.size();
  if (y.size() != p || R.rows() != p || R.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "update: measurement, h and R sizes disagree");
  }
  Eigen::MatrixXd ys(p, 2 * d);
  for (int j = 0; j < 2 * d; ++j) ys.col(j) = h(retraction.phi(belief.mean, xis.col(j)));

  // y_bar = w_m y0 + sum_j w_j y_j, written relative to y0 since the weights sum to one.
  const Eigen::VectorXd y_bar = y0 + w.w_j * (ys.colwise() - y0).rowwise().sum();
  const Eigen::MatrixXd dys = ys.colwise() - y_bar;
  const Eigen::VectorXd dy0 = y0 - y_bar;

  Eigen::MatrixXd P_yy = w.w_0c * dy0 * dy0.transpose() + w.w_j * dys * dys.transpose() + R;
  P_yy = symmetrize(P_yy);
  const Eigen::MatrixXd P_xi_y = w.w_j * xis * dys.transpose();

  Eigen::LLT<Eigen::MatrixXd> llt(P_yy);
  if (llt.info() != Eigen::Success || !P_yy.allFinite()) {
    throw Error(ErrorCode::SingularInnovationCovariance, "innovation covariance is not positive definite");
  }
  // K = P_xi_y P_yy^-1, computed as a solve against the factorization.
  const Eigen::MatrixXd K = llt.solve(P_xi_y.transpose()).transpose();
  const Eigen::VectorXd xi_bar = K * (y - y_bar);

  Belief<State> out{retraction.phi(belief.mean, xi_bar), symmetrize(belief.cov - K * P_yy * K.transpose())};
  if (trace) *trace = UpdateTrace{y_bar, P_yy, P_xi_y, K, xi_bar};
  return out;
}

/// Propagation: the mean goes through the noise-free model, the covariance is
/// the sum of the state sigma-point spread and the noise sigma-point spread,
/// both measured with phi_inv at the propagated mean.
template <class State>
Belief<State> propagate(const Belief<State>& belief, const Eigen::VectorXd& omega, const PropagationFn<State>& f,
                        const Eigen::MatrixXd& Q, double dt, const Retraction<State>& retraction, double alpha) {
  const int d = static_cast<int>(belief.cov.rows());
  const int q = static_cast<int>(Q.rows());
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(q);
  State mean = f(belief.mean, omega, w0, dt);

  const SigmaWeights wd = set_weights(d, alpha);
  const Eigen::MatrixXd xis = sigma_points(belief.cov, wd.lambda);
  Eigen::MatrixXd spread(d, 2 * d);
  for (int j = 0; j < 2 * d; ++j) {
    const State chi = f(retraction.phi(belief.mean, xis.col(j)), omega, w0, dt);
    spread.col(j) = retraction.phi_inv(mean, chi);
  }
  Eigen::MatrixXd P = wd.w_j * spread * spread.transpose();

  if (q > 0 && !(Q.array() == 0.0).all()) {
    const SigmaWeights wq = set_weights(q, alpha);
    const Eigen::MatrixXd ws = sigma_points(Q, wq.lambda);
    Eigen::MatrixXd noise(P.rows(), 2 * q);
    for (int j = 0; j < 2 * q; ++j) {
      noise.col(j) = retraction.phi_inv(mean, f(belief.mean, omega, ws.col(j), dt));
    }
    P += wq.w_j * noise * noise.transpose();
  }
  return Belief<State>{std::move(mean), symmetrize(P)};
}

/// Everything the recursion needs from a model.
template <class State>
struct FilterModel {
  PropagationFn<State> f;
  ObservationFn<State> h;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  double dt = 0.0;
  /// Optional re-projection of the mean onto the manifold (e.g. polar
  /// projection of rotations), applied every `normalize_period` steps.
  std::function<void(State&)> normalize;
  int normalize_period = 1000;
};

/// Runs propagate at every step and update whenever a measurement is present.
/// inputs[i] drives the transition to step i + 1 and measurements[i] is
/// observed there; the result holds one belief per step.
/// Failures are rethrown as StepError with the 1-based step index.
template <class State>
std::vector<Belief<State>> filter_run(const FilterModel<State>& model, const Belief<State>& initial,
                                      std::span<const Eigen::VectorXd> inputs,
                                      std::span<const std::optional<Eigen::VectorXd>> measurements,
                                      const Retraction<State>& retraction, double alpha,
                                      std::span<const double> dts = {}) {
  if (!measurements.empty() && measurements.size() != inputs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "filter_run: inputs and measurement schedule lengths differ");
  }
  std::vector<Belief<State>> out;
  out.reserve(inputs.size());
  Belief<State> b = initial;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      const double dt = dts.empty() ? model.dt : dts[i];
      b = propagate(b, inputs[i], model.f, model.Q, dt, retraction, alpha);
      if (!measurements.empty() && measurements[i]) {
        b = update(b, *measurements[i], model.h, model.R, retraction, alpha);
      }
      if (model.normalize && model.normalize_period > 0 && (i + 1) % model.normalize_period == 0) {
        model.normalize(b.mean);
      }
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(e, i + 1);
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace ukfm
