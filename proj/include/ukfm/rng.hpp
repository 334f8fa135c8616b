#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace ukfm {

/// Counter-based generator: the i-th draw of stream (seed, stream) is
/// splitmix64(key + i * golden_gamma), key = splitmix64(seed ^ splitmix64(stream)).
/// Output depends only on (seed, stream, i), so sequences are portable and
/// independent of thread scheduling. Normals use Box-Muller on two uniforms.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Draws from N(0, C) for a symmetric PSD C, using the eigen-decomposition
/// square root so singular covariances are handled.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& cov);

  Eigen::VectorXd sample(CounterRng& rng) const;
  Eigen::Index dim() const { return factor_.rows(); }

 private:
  Eigen::MatrixXd factor_;
  bool zero_ = true;
};

}  // namespace ukfm
