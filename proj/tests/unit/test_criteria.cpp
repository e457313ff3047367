#include <doctest.h>

#include <cmath>

#include "fsc/criteria.hpp"
#include "fsc/em.hpp"
#include "../support/instances.hpp"

using namespace fsc;

namespace {

// Straight from pair counting over all n(n−1)/2 pairs.
double brute_ari(const Partition& a, const Partition& b) {
  double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1;
    }
  }
  const double expected = in_a * in_b / pairs;
  const double max_index = 0.5 * (in_a + in_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

}  // namespace

TEST_CASE("classification criteria on small matrices") {
  Matrix z(1, 2);
  z << 0.5, 0.5;
  CHECK(classification_criterion(ClassificationKind::E, z) == doctest::Approx(std::log(0.5)));
  CHECK(classification_criterion(ClassificationKind::A, z) == doctest::Approx(std::log(0.5)));
  CHECK(classification_criterion(ClassificationKind::U, z) == doctest::Approx(0.5));

  Matrix hard(3, 2);
  hard << 1, 0, 0, 1, 1, 0;
  CHECK(classification_criterion(ClassificationKind::E, hard) == 0.0);
  CHECK(classification_criterion(ClassificationKind::A, hard) == 0.0);
  CHECK(classification_criterion(ClassificationKind::U, hard) == 0.0);

  Matrix m(2, 3);
  m << 0.2, 0.3, 0.5, 0.9, 0.05, 0.05;
  const double a = 0.2 * std::log(0.2) + 0.3 * std::log(0.3) + 0.5 * std::log(0.5) + 0.9 * std::log(0.9) +
                   2 * 0.05 * std::log(0.05);
  CHECK(classification_criterion(ClassificationKind::A, m) == doctest::Approx(a));
  CHECK(classification_criterion(ClassificationKind::E, m) == doctest::Approx(std::log(0.5) + std::log(0.9)));
  CHECK(classification_criterion(ClassificationKind::U, m) == doctest::Approx(0.6));
  CHECK(classification_criterion(ClassificationKind::E, Matrix(0, 2)) == 0.0);
}

TEST_CASE("scatter criteria and the total = within + between identity") {
  Matrix x(4, 2);
  x << -1, 0, 1, 0, 10, -1.5, 10, 1.5;
  const ScatterDecomposition d = scatter_decomposition(x, {0, 0, 1, 1});
  // W = diag(2, 0) + diag(0, 4.5).
  CHECK(d.within_W(0, 0) == doctest::Approx(2.0));
  CHECK(d.within_W(1, 1) == doctest::Approx(4.5));
  CHECK(scatter_criterion(ScatterKind::TraceW, d) == doctest::Approx(6.5));
  CHECK(scatter_criterion(ScatterKind::DetW, d) == doctest::Approx(9.0));
  CHECK(d.group_sizes == std::vector<Eigen::Index>{2, 2});

  ScatterDecomposition e;
  e.within_W = Matrix(2, 2);
  e.within_W << 2, 0, 0, 3;
  CHECK(scatter_criterion(ScatterKind::TraceW, e) == 5.0);
  CHECK(scatter_criterion(ScatterKind::DetW, e) == doctest::Approx(6.0));

  Rng rng(44);
  for (int t = 0; t < 100; ++t) {
    const int groups = testing::uniform_int(rng, 1, 5);
    const auto p = static_cast<Eigen::Index>(testing::uniform_int(rng, 1, 4));
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 2, 40));
    Matrix y(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 5.0 * rng.normal();
    const Partition part = testing::random_partition(rng, n, groups);
    const ScatterDecomposition s = scatter_decomposition(y, part, groups);
    CHECK((s.total_S - s.within_W - s.between_B).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + s.total_S.cwiseAbs().maxCoeff()));
    CHECK(scatter_criterion(ScatterKind::DetW, s) >= 0.0);
    const ScatterDecomposition one = scatter_decomposition(y, Partition(n, 0), 1);
    CHECK((one.within_W - one.total_S).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + one.total_S.cwiseAbs().maxCoeff()));
  }
  CHECK_THROWS_AS(scatter_decomposition(x, {0, 1}), DimensionError);
  CHECK_THROWS_AS(scatter_decomposition(x, {0, 0, 1, 2}, 2), DomainError);
}

TEST_CASE("ARI examples") {
  CHECK(ari({0, 0, 1, 1}, {0, 0, 1, 1}) == 1.0);
  CHECK(ari({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  CHECK(ari({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(-0.5));
  CHECK(ari({0, 0, 0}, {0, 0, 0}) == 1.0);
  CHECK(ari({0, 0, 1, 1, 2, 2}, {0, 0, 1, 2, 2, 2}) == doctest::Approx(brute_ari({0, 0, 1, 1, 2, 2}, {0, 0, 1, 2, 2, 2})));
  CHECK_THROWS_AS(ari({0, 1}, {0}), DimensionError);
}

TEST_CASE("ARI agrees with pair counting and is symmetric and relabelling invariant") {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 2, 30));
    const int ga = testing::uniform_int(rng, 1, 4), gb = testing::uniform_int(rng, 1, 4);
    const Partition a = testing::random_partition(rng, n, ga), b = testing::random_partition(rng, n, gb);
    const double v = ari(a, b);
    CHECK(v == doctest::Approx(brute_ari(a, b)).epsilon(1e-12));
    CHECK(v == doctest::Approx(ari(b, a)).epsilon(1e-12));
    CHECK(v <= 1.0 + 1e-12);
    Partition relabelled = a;
    for (int& g : relabelled) g = ga - 1 - g;
    CHECK(ari(relabelled, b) == doctest::Approx(v).epsilon(1e-12));
    CHECK(ari(a, a) == 1.0);
  }
}

TEST_CASE("map_partition breaks ties toward the lowest index") {
  Matrix z(3, 3);
  z << 0.4, 0.4, 0.2, 0.1, 0.45, 0.45, 0.2, 0.3, 0.5;
  CHECK(map_partition(z) == Partition{0, 1, 2});
}

TEST_CASE("information criteria arithmetic") {
  Rng rng(3);
  const auto inst = testing::random_instance(rng, 2, 2, 30, 30, 0.4, 4);
  FitConfig cfg;
  cfg.n_starts = 3;
  cfg.weight.alpha = 0.3;
  const FitResult f = fit(inst.data, 2, Family::Gaussian, CovarianceStructure::unconstrained(), cfg);
  const double loglik = weighted_observed_loglik(f.model, inst.data, {0.3, LikelihoodVariant::Original});
  const double n = static_cast<double>(inst.data.size());
  const double bic10 = information_criterion(InformationKind::BIC, f, inst.data, 10);
  const double bic20 = information_criterion(InformationKind::BIC, f, inst.data, 20);
  CHECK(bic10 == doctest::Approx(2.0 * loglik - 10.0 * std::log(n)));
  CHECK(bic10 - bic20 == doctest::Approx(10.0 * std::log(n)));

  double entropy = 0.0;
  const Partition m = map_partition(f.responsibilities.unlabelled);
  for (Eigen::Index j = 0; j < f.responsibilities.unlabelled.rows(); ++j) {
    entropy += std::log(std::max(f.responsibilities.unlabelled(j, m[static_cast<std::size_t>(j)]), 1e-300));
  }
  CHECK(information_criterion(InformationKind::ICL, f, inst.data, 10) == doctest::Approx(bic10 + 2.0 * entropy));

  FitResult hard = f;
  hard.responsibilities.unlabelled.setZero();
  for (Eigen::Index j = 0; j < hard.responsibilities.unlabelled.rows(); ++j) hard.responsibilities.unlabelled(j, 0) = 1.0;
  CHECK(information_criterion(InformationKind::ICL, hard, inst.data, 10) == information_criterion(InformationKind::BIC, hard, inst.data, 10));
}

TEST_CASE("labelled and scoring partitions") {
  Rng rng(10);
  const auto inst = testing::random_instance(rng, 2, 2, 40, 40, 0.5, 4, 6.0);
  for (double alpha : {0.0, 0.5}) {
    FitConfig cfg;
    cfg.n_starts = 3;
    cfg.weight.alpha = alpha;
    const FitResult f = fit(inst.data, 2, Family::Gaussian, CovarianceStructure::unconstrained(), cfg);
    const Partition lp = labelled_partition(f, inst.data);
    const Partition sp = scoring_partition(f, inst.data);
    REQUIRE(lp.size() == static_cast<std::size_t>(inst.data.size()));
    for (Eigen::Index j = 0; j < inst.data.n_labelled(); ++j) CHECK(lp[static_cast<std::size_t>(j)] == inst.data.label(j));
    if (alpha > 0.0) CHECK(lp == sp);
    CHECK(ari(sp, inst.truth) > 0.9);
  }
}
