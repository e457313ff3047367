#include "fsc/random.hpp"

#include <cmath>
#include <limits>

namespace fsc {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::below: empty range");
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_normal_ = true;
  return u * factor;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("Rng::gamma: shape and rate must be positive and finite");
  }
  if (shape < 1.0) {
    // Boost the shape and rescale: G(a) = G(a + 1) U^{1/a}.
    double u = uniform();
    while (u == 0.0) u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang squeeze/rejection.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

Matrix scale_factor(const Matrix& m) { return factorize_spd(m).lower; }

Matrix standard_normals(Eigen::Index n, Eigen::Index p, Rng& rng) {
  Matrix z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  return z;
}

}  // namespace

Matrix sample(const DistributionSpec& dist, Eigen::Index n, Rng& rng) {
  if (n < 0) throw DomainError("sample: negative count");
  return std::visit(
      [&](const auto& d) -> Matrix {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          if (d.covariance.rows() != d.mean.size()) throw DimensionError("sample: gaussian shape");
          const Matrix l = scale_factor(d.covariance);
          Matrix z = standard_normals(n, d.mean.size(), rng);
          Matrix out = z * l.transpose();
          out.rowwise() += d.mean.transpose();
          return out;
        } else if constexpr (std::is_same_v<T, StudentTSpec>) {
          if (d.scale.rows() != d.location.size()) throw DimensionError("sample: t shape");
          if (!(d.dof > 0.0)) throw DomainError("sample: degrees of freedom must be positive");
          const Matrix l = scale_factor(d.scale);
          const Eigen::Index p = d.location.size();
          Matrix out(n, p);
          for (Eigen::Index i = 0; i < n; ++i) {
            Vector z(p);
            for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
            const double w = rng.gamma(0.5 * d.dof, 0.5 * d.dof);
            out.row(i) = (d.location + l * z / std::sqrt(w)).transpose();
          }
          return out;
        } else {
          Matrix out(n, 1);
          for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = rng.gamma(d.shape, d.rate);
          return out;
        }
      },
      dist);
}

}  // namespace fsc
