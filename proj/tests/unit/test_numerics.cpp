#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsc/numerics.hpp"
#include "fsc/random.hpp"
#include "../support/instances.hpp"

using namespace fsc;

TEST_CASE("factorize_spd reconstructs and reports log-determinant") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto p = static_cast<Eigen::Index>(testing::uniform_int(rng, 1, 6));
    const Matrix s = testing::random_spd(rng, p, 3.0);
    const SpdFactor f = factorize_spd(s);
    CHECK((f.reconstruct() - s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f.log_determinant == doctest::Approx(std::log(s.determinant())).epsilon(1e-10));
    CHECK((f.inverse() * s - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("factorize_spd rejects indefinite and asymmetric input") {
  Matrix s(2, 2);
  s << 1, 2, 2, 1;
  try {
    factorize_spd(s);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 1);
  }
  Matrix a(2, 2);
  a << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(factorize_spd(a), DomainError);
  CHECK_THROWS_AS(factorize_spd(Matrix::Zero(3, 3)), NotPositiveDefinite);
}

TEST_CASE("mahalanobis distance matches the explicit inverse") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const auto p = static_cast<Eigen::Index>(testing::uniform_int(rng, 1, 5));
    const Matrix s = testing::random_spd(rng, p);
    Matrix rows(7, p);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
    Vector mu(p);
    for (Eigen::Index j = 0; j < p; ++j) mu(j) = rng.normal();
    const SpdFactor f = factorize_spd(s);
    const Vector batch = mahalanobis_sq_rows(rows, mu, f);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const Vector d = rows.row(i).transpose() - mu;
      const double direct = d.dot(s.inverse() * d);
      CHECK(batch(i) == doctest::Approx(direct).epsilon(1e-10));
      CHECK(mahalanobis_sq(rows.row(i).transpose(), mu, f) == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("digamma and log_gamma") {
  constexpr double euler = 0.57721566490153286;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-14));
  CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-14));
  for (double x : {0.05, 0.7, 1.3, 4.0, 25.0, 180.0}) {
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
    CHECK(log_gamma(x + 1.0) == doctest::Approx(log_gamma(x) + std::log(x)).epsilon(1e-12));
  }
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(digamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.0), DomainError);
  CHECK_THROWS_AS(digamma(std::nan("")), DomainError);
}

TEST_CASE("find_root brackets and errors") {
  const double r = find_root([](double x) { return x * x - 2.0; }, {0.0, 2.0, 1e-12, 200});
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(find_root([](double x) { return x - 1.0; }, {1.0, 3.0, 1e-12, 100}) == 1.0);
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, {-1.0, 1.0, 1e-12, 100}), NoBracket);
  CHECK_THROWS_AS(find_root([](double x) { return std::exp(x) - 5.0; }, {0.0, 10.0, 1e-300, 2}), NoConvergence);
  CHECK_THROWS_AS(find_root([](double x) { return x; }, {1.0, -1.0, 1e-9, 10}), DomainError);
}

TEST_CASE("log_sum_exp is shift invariant and handles extremes") {
  Vector v(3);
  v << 1000.0, 1000.0, -std::numeric_limits<double>::infinity();
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
  Vector w(2);
  w << -1e4, -1e4 - std::log(3.0);
  CHECK(log_sum_exp(w) == doctest::Approx(-1e4 + std::log(4.0 / 3.0)));
  CHECK(std::isinf(log_sum_exp(Vector(0))));
}

TEST_CASE("pairwise_sum agrees with naive summation") {
  Rng rng(5);
  std::vector<double> v(1001);
  double naive = 0.0;
  for (auto& x : v) {
    x = rng.uniform();
    naive += x;
  }
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(naive).epsilon(1e-13));
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
}
