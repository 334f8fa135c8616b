#include "ukfm/examples.hpp"

#include <cmath>

#include "ukfm/models/models.hpp"
#include "ukfm/models/slam2d.hpp"

namespace ukfm {

namespace {

class SlamExample : public Example {
 public:
  explicit SlamExample(SlamModel model) : model_(std::move(model)) {}

  ExampleInfo info() const override {
    ExampleInfo i;
    i.name = "slam2d";
    for (const auto& r : model_.retractions) i.retractions.push_back(r.name);
    i.state_columns = {"theta", "x", "y", "landmarks"};
    i.cov_columns = {"P_0", "P_1", "P_2"};
    i.error_blocks = {"heading", "pos", "landmarks"};
    i.dt = model_.config.dt;
    i.default_steps = 1000;
    return i;
  }

  std::vector<FilterTrace> trial(int steps, std::uint64_t seed, std::uint64_t run,
                                 const std::vector<std::string>& filters, double alpha) const override {
    if (steps < 1) throw Error(ErrorCode::InvalidConfig, "simulate: steps must be >= 1");
    const SlamData data = simulate_slam(model_, steps, seed, run);
    std::vector<FilterTrace> out;
    for (const auto& name : filters) out.push_back(run_one(model_.retraction(name), data, alpha));
    return out;
  }

  std::vector<NamedReport> check_retractions(std::span<const double> epsilons, std::uint64_t seed,
                                             double scale_inverse) const override {
    CounterRng rng(seed, 1u << 20);
    std::vector<MixedState> refs{MixedState{SEk::identity(2, 1), Eigen::VectorXd::Zero(4)}};
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd xi = rng.normal_vector(7);
      refs.push_back(MixedState{exp_sek(xi.head<3>(), 2, 1), 3.0 * xi.tail<4>()});
    }
    std::vector<NamedReport> out;
    for (const auto& base : model_.retractions) {
      const Retraction<MixedState> r = scaled_inverse(base, scale_inverse);
      NamedReport worst{r.name, {}};
      for (std::size_t k = 0; k < refs.size(); ++k) {
        const RetractionReport rep =
            check_retraction(r, refs[k], epsilons, check_directions(r.dimension(refs[k]), rng));
        if (k == 0 || (worst.report.pass() && (!rep.pass() || rep.jacobian_error > worst.report.jacobian_error))) {
          worst.report = rep;
        }
      }
      out.push_back(worst);
    }
    return out;
  }

 private:
  FilterTrace run_one(const Retraction<MixedState>& r, const SlamData& data, double alpha) const {
    FilterTrace tr;
    tr.filter = r.name;
    for (std::size_t n = 0; n < data.odometry.size(); ++n) tr.t.push_back((n + 1) * model_.config.dt);
    std::vector<SlamBelief> beliefs;
    try {
      beliefs = run_slam(model_, data, r, alpha);
    } catch (const Error& e) {
      tr.diverged = true;
      tr.failure = e.what();
      return tr;
    }
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
      const SlamBelief& b = beliefs[n];
      const SEk& pose = b.belief.mean.group;
      tr.state.push_back({std::atan2(pose.rot()(1, 0), pose.rot()(0, 0)), pose.trans()(0, 0), pose.trans()(1, 0),
                          static_cast<double>(b.ids.size())});
      tr.cov_diag.push_back({b.belief.cov(0, 0), b.belief.cov(1, 1), b.belief.cov(2, 2)});
      const MixedState truth = slam_truth_state(model_, data.truth[n + 1], b);
      try {
        const double e = nees(r.phi_inv(b.belief.mean, truth), b.belief.cov);
        tr.nees.push_back(e);
        if (!(e <= kDivergenceNees) && !tr.diverged) {
          tr.diverged = true;
          tr.failure = "NEES above divergence threshold at step " + std::to_string(n + 1);
        }
      } catch (const Error& err) {
        tr.nees.push_back(std::nan(""));
        if (!tr.diverged) tr.failure = "step " + std::to_string(n + 1) + ": " + err.what();
        tr.diverged = true;
      }
      double lm = 0.0;
      for (std::size_t k = 0; k < b.ids.size(); ++k) {
        lm += (b.belief.mean.euclid.segment<2>(2 * k) - truth.euclid.segment<2>(2 * k)).squaredNorm();
      }
      if (!b.ids.empty()) lm = std::sqrt(lm / static_cast<double>(b.ids.size()));
      Eigen::Vector3d e(rotation_angle(pose.rot(), truth.group.rot()),
                        (pose.trans() - truth.group.trans()).norm(), lm);
      tr.block_errors.push_back(e);
    }
    return tr;
  }

  SlamModel model_;
};

template <class State>
std::unique_ptr<Example> standard(ModelSpec<State> m, int steps) {
  return std::make_unique<StandardExample<State>>(std::move(m), steps);
}

}  // namespace

const std::vector<std::string>& registered_examples() {
  static const std::vector<std::string> names{"linear",     "localization2d", "attitude3d", "inertial_nav",
                                              "slam2d",     "imu_gnss",       "pendulum_s2"};
  return names;
}

std::unique_ptr<Example> make_example(const std::string& name, const ModelParams& params) {
  if (name == "linear") return standard(linear_model(params), 200);
  if (name == "localization2d") return standard(localization2d(params), 1000);
  if (name == "attitude3d") return standard(attitude3d(params), 1000);
  if (name == "inertial_nav") return standard(inertial_nav(params), 1000);
  if (name == "slam2d") return std::make_unique<SlamExample>(slam2d(params));
  if (name == "imu_gnss") return standard(imu_gnss(params), 2000);
  if (name == "pendulum_s2") return standard(pendulum_s2(params), 1000);
  std::string list;
  for (const auto& n : registered_examples()) list += (list.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::InvalidConfig, "unknown example '" + name + "'; registered examples: " + list);
}

}  // namespace ukfm
