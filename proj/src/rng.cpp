#include "ukfm/rng.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace ukfm {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(seed ^ splitmix64(stream))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() {
  // 53 random bits mapped onto (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Eigen::VectorXd CounterRng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  factor_ = Eigen::MatrixXd::Zero(n, n);
  if (n == 0 || (cov.array() == 0.0).all()) return;
  zero_ = false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * s.asDiagonal();
}

Eigen::VectorXd GaussianSampler::sample(CounterRng& rng) const {
  const Eigen::VectorXd z = rng.normal_vector(factor_.rows());
  if (zero_) return Eigen::VectorXd::Zero(factor_.rows());
  return factor_ * z;
}

}  // namespace ukfm
