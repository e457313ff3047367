#include "fsc/numerics.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace fsc {

Matrix SpdFactor::inverse() const {
  const auto n = dim();
  Matrix identity = Matrix::Identity(n, n);
  Matrix half = lower.triangularView<Eigen::Lower>().solve(identity);
  return half.transpose() * half;
}

SpdFactor factorize_spd(const Matrix& s) {
  if (s.rows() != s.cols()) {
    throw DimensionError("factorize_spd: matrix is " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()));
  }
  const Eigen::Index n = s.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = s(i, j);
      const double b = s(j, i);
      if (!std::isfinite(a) || !std::isfinite(b) ||
          std::abs(a - b) > 1e-8 * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
        throw DomainError("factorize_spd: matrix is not symmetric");
      }
    }
  }

  SpdFactor out;
  out.lower = Matrix::Zero(n, n);
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = s(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= out.lower(j, k) * out.lower(j, k);
    if (!(pivot > kPivotFloor)) {
      throw NotPositiveDefinite(static_cast<int>(j), pivot);
    }
    const double d = std::sqrt(pivot);
    out.lower(j, j) = d;
    log_det += 2.0 * std::log(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= out.lower(i, k) * out.lower(j, k);
      out.lower(i, j) = v / d;
    }
  }
  out.log_determinant = log_det;
  return out;
}

double mahalanobis_sq(const Vector& x, const Vector& mu, const SpdFactor& factor) {
  if (x.size() != mu.size() || x.size() != factor.dim()) {
    throw DimensionError("mahalanobis_sq: dimension mismatch");
  }
  const Vector y = factor.lower.triangularView<Eigen::Lower>().solve(x - mu);
  return y.squaredNorm();
}

Vector mahalanobis_sq_rows(const Matrix& rows, const Vector& mu, const SpdFactor& factor) {
  if (rows.cols() != mu.size() || mu.size() != factor.dim()) {
    throw DimensionError("mahalanobis_sq_rows: dimension mismatch");
  }
  Matrix centred = (rows.rowwise() - mu.transpose()).transpose();
  factor.lower.triangularView<Eigen::Lower>().solveInPlace(centred);
  return centred.colwise().squaredNorm().transpose();
}

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("digamma: argument must be positive and finite, got " + std::to_string(x));
  }
  return boost::math::digamma(x);
}

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  return std::lgamma(x);
}

void RootBracket::validate() const {
  if (!(lo < hi)) throw DomainError("RootBracket: lo must be < hi");
  if (!(tolerance > 0.0)) throw DomainError("RootBracket: tolerance must be positive");
  if (max_iterations < 1) throw DomainError("RootBracket: max_iterations must be >= 1");
}

double find_root(const std::function<double(double)>& f, const RootBracket& bracket) {
  bracket.validate();
  const double flo = f(bracket.lo);
  const double fhi = f(bracket.hi);
  if (std::abs(flo) <= bracket.tolerance) return bracket.lo;
  if (std::abs(fhi) <= bracket.tolerance) return bracket.hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NoBracket("find_root: f(" + std::to_string(bracket.lo) + ") and f(" +
                    std::to_string(bracket.hi) + ") have the same sign");
  }

  const double tol = bracket.tolerance;
  auto narrow_enough = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto evaluate = [&f](double x) { return f(x); };

  std::uintmax_t iterations = static_cast<std::uintmax_t>(bracket.max_iterations);
  const auto [a, b] = boost::math::tools::toms748_solve(evaluate, bracket.lo, bracket.hi, flo,
                                                        fhi, narrow_enough, iterations);
  const double mid = 0.5 * (a + b);
  if (std::abs(b - a) <= tol || std::abs(f(mid)) <= tol) return mid;
  throw NoConvergence("find_root: no convergence after " + std::to_string(bracket.max_iterations) +
                      " iterations");
}

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

}  // namespace fsc
