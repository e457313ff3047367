#pragma once

// Seeded sampling. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard; every transform on top of it is implemented
// here so draws are bit-identical across standard libraries.

#include <cstdint>
#include <random>
#include <variant>

#include "fsc/numerics.hpp"

namespace fsc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Gamma with shape `shape` and rate `rate` (mean shape / rate).
  double gamma(double shape, double rate);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// splitmix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

struct GaussianSpec {
  Vector mean;
  Matrix covariance;
};

struct StudentTSpec {
  Vector location;
  Matrix scale;
  double dof = 1.0;
};

struct GammaSpec {
  double shape = 1.0;
  double rate = 1.0;
};

using DistributionSpec = std::variant<GaussianSpec, StudentTSpec, GammaSpec>;

/// n draws as rows of an n×p matrix (p = 1 for gamma). Student-t rows are
/// drawn as μ + L z / √w with w ~ gamma(ν/2, ν/2).
Matrix sample(const DistributionSpec& dist, Eigen::Index n, Rng& rng);

}  // namespace fsc
