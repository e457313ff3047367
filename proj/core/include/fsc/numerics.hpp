#pragma once

#include <Eigen/Dense>

#include <functional>

#include "fsc/errors.hpp"

namespace fsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cholesky factor S = L Lᵀ of a symmetric positive-definite matrix.
struct SpdFactor {
  Matrix lower;
  double log_determinant = 0.0;

  Eigen::Index dim() const { return lower.rows(); }
  Matrix reconstruct() const { return lower * lower.transpose(); }
  Matrix inverse() const;
};

/// Pivots at or below this value are treated as loss of positive definiteness.
inline constexpr double kPivotFloor = 1e-12;

/// Throws NotPositiveDefinite with the failing (0-based) pivot index, or
/// DomainError when `s` is not square/symmetric within 1e-8.
SpdFactor factorize_spd(const Matrix& s);

/// (x − μ)ᵀ Σ⁻¹ (x − μ) through one forward substitution.
double mahalanobis_sq(const Vector& x, const Vector& mu, const SpdFactor& factor);

/// Row-wise squared Mahalanobis distances of `rows` (n×p) to `mu`.
Vector mahalanobis_sq_rows(const Matrix& rows, const Vector& mu, const SpdFactor& factor);

double digamma(double x);
double log_gamma(double x);

struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = 1e-10;
  int max_iterations = 200;

  void validate() const;
};

/// Bracketing root search. Returns x with |f(x)| <= tolerance or with the
/// final bracket narrower than tolerance. Throws NoBracket when f(lo) and
/// f(hi) share a sign and NoConvergence when max_iterations runs out.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket);

/// log Σ exp(v) with max shift; returns -inf for an empty or all -inf input.
double log_sum_exp(const Eigen::Ref<const Vector>& v);

/// Sum in a fixed pairwise order so reductions are reproducible.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace fsc
