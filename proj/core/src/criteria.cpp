#include "fsc/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fsc {

namespace {

constexpr double kLogFloor = 1e-300;

double safe_log(double z) { return std::log(std::max(z, kLogFloor)); }

int argmax_row(const Matrix& m, Eigen::Index r) {
  int best = 0;
  for (Eigen::Index g = 1; g < m.cols(); ++g) {
    if (m(r, g) > m(r, best)) best = static_cast<int>(g);
  }
  return best;
}

double map_entropy(const Matrix& z) {
  std::vector<double> terms(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    terms[static_cast<std::size_t>(j)] = safe_log(z(j, argmax_row(z, j)));
  }
  return pairwise_sum(terms.data(), terms.size());
}

long long choose2(long long n) { return n * (n - 1) / 2; }

}  // namespace

double information_criterion(InformationKind kind, const FitResult& fit, const DataSet& data,
                             long param_count) {
  const WeightConfig original{fit.weight.alpha, LikelihoodVariant::Original};
  const double loglik = weighted_observed_loglik(fit.model, data, original);
  const double bic = 2.0 * loglik - static_cast<double>(param_count) * std::log(static_cast<double>(data.size()));
  if (kind == InformationKind::BIC) return bic;
  return bic + 2.0 * map_entropy(fit.responsibilities.unlabelled);
}

double classification_criterion(ClassificationKind kind, const Matrix& z) {
  std::vector<double> terms(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    double t = 0.0;
    switch (kind) {
      case ClassificationKind::E:
        t = safe_log(z(j, argmax_row(z, j)));
        break;
      case ClassificationKind::A:
        for (Eigen::Index g = 0; g < z.cols(); ++g) {
          if (z(j, g) > 0.0) t += z(j, g) * safe_log(z(j, g));
        }
        break;
      case ClassificationKind::U:
        t = 1.0 - z.row(j).maxCoeff();
        break;
    }
    terms[static_cast<std::size_t>(j)] = t;
  }
  return pairwise_sum(terms.data(), terms.size());
}

ScatterDecomposition scatter_decomposition(const Matrix& x, const Partition& partition, int groups) {
  if (static_cast<Eigen::Index>(partition.size()) != x.rows()) {
    throw DimensionError("scatter_decomposition: one assignment per row required");
  }
  if (x.rows() == 0) throw DimensionError("scatter_decomposition: no rows");
  const int max_label = *std::max_element(partition.begin(), partition.end());
  if (*std::min_element(partition.begin(), partition.end()) < 0) {
    throw DomainError("scatter_decomposition: negative group index");
  }
  if (groups == 0) groups = max_label + 1;
  if (max_label >= groups) throw DomainError("scatter_decomposition: group index out of range");

  const Eigen::Index p = x.cols();
  ScatterDecomposition d;
  d.grand_mean = x.colwise().mean().transpose();
  d.group_means = Matrix::Zero(groups, p);
  d.group_sizes.assign(static_cast<std::size_t>(groups), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int g = partition[static_cast<std::size_t>(i)];
    d.group_means.row(g) += x.row(i);
    ++d.group_sizes[static_cast<std::size_t>(g)];
  }
  for (int g = 0; g < groups; ++g) {
    const auto n = d.group_sizes[static_cast<std::size_t>(g)];
    if (n > 0) d.group_means.row(g) /= static_cast<double>(n);
  }

  Matrix centred_total = x.rowwise() - d.grand_mean.transpose();
  Matrix centred_within(x.rows(), p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    centred_within.row(i) = x.row(i) - d.group_means.row(partition[static_cast<std::size_t>(i)]);
  }
  d.total_S = centred_total.transpose() * centred_total;
  d.within_W = centred_within.transpose() * centred_within;
  d.between_B = Matrix::Zero(p, p);
  for (int g = 0; g < groups; ++g) {
    const auto n = d.group_sizes[static_cast<std::size_t>(g)];
    if (n == 0) continue;
    const Vector diff = d.group_means.row(g).transpose() - d.grand_mean;
    d.between_B += static_cast<double>(n) * diff * diff.transpose();
  }
  return d;
}

double scatter_criterion(ScatterKind kind, const ScatterDecomposition& d) {
  const Matrix& w = d.within_W;
  if (kind == ScatterKind::TraceW) return w.trace();
  if (w.size() == 0) return 1.0;
  const Matrix sym = 0.5 * (w + w.transpose());
  try {
    return std::exp(factorize_spd(sym).log_determinant);
  } catch (const NumericalError&) {
    return std::max(0.0, sym.partialPivLu().determinant());
  }
}

double ari(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw DimensionError("ari: partitions have different lengths");
  const auto relabel = [](const Partition& p) {
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), p[i]) - sorted.begin());
    }
    return std::pair{out, static_cast<int>(sorted.size())};
  };
  const auto [ra, ka] = relabel(a);
  const auto [rb, kb] = relabel(b);
  std::vector<long long> table(static_cast<std::size_t>(ka) * static_cast<std::size_t>(kb), 0);
  std::vector<long long> rows(static_cast<std::size_t>(ka), 0), cols(static_cast<std::size_t>(kb), 0);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ++table[static_cast<std::size_t>(ra[i]) * static_cast<std::size_t>(kb) + static_cast<std::size_t>(rb[i])];
    ++rows[static_cast<std::size_t>(ra[i])];
    ++cols[static_cast<std::size_t>(rb[i])];
  }
  long long index = 0, sum_a = 0, sum_b = 0;
  for (long long n : table) index += choose2(n);
  for (long long n : rows) sum_a += choose2(n);
  for (long long n : cols) sum_b += choose2(n);
  const long long total = choose2(static_cast<long long>(a.size()));
  // ARI = (index − ab/total) / ((a + b)/2 − ab/total), scaled by 2·total.
  const double num = 2.0 * (static_cast<double>(total) * static_cast<double>(index) -
                            static_cast<double>(sum_a) * static_cast<double>(sum_b));
  const double den = static_cast<double>(total) * static_cast<double>(sum_a + sum_b) -
                     2.0 * static_cast<double>(sum_a) * static_cast<double>(sum_b);
  if (den == 0.0) return 1.0;
  return num / den;
}

Partition map_partition(const Matrix& z) {
  Partition out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index r = 0; r < z.rows(); ++r) out[static_cast<std::size_t>(r)] = argmax_row(z, r);
  return out;
}

std::vector<int> align_to_labels(const MixtureModel& model, const DataSet& data) {
  const int groups = model.groups();
  std::vector<int> order(static_cast<std::size_t>(groups));
  std::iota(order.begin(), order.end(), 0);
  if (data.n_labelled() == 0) return order;

  const Matrix joint = evaluate_components(model, data.labelled_x()).joint;
  // agree[k][h]: labelled rows of class h whose MAP component is k.
  std::vector<std::vector<long>> agree(static_cast<std::size_t>(groups),
                                       std::vector<long>(static_cast<std::size_t>(groups), 0));
  for (Eigen::Index j = 0; j < data.n_labelled(); ++j) {
    const int h = data.label(j);
    if (h < groups) ++agree[static_cast<std::size_t>(argmax_row(joint, j))][static_cast<std::size_t>(h)];
  }
  const auto score = [&](const std::vector<int>& ord) {
    long s = 0;
    for (std::size_t h = 0; h < ord.size(); ++h) s += agree[static_cast<std::size_t>(ord[h])][h];
    return s;
  };

  if (groups <= 8) {
    std::vector<int> best = order;
    long best_score = score(order);
    std::vector<int> perm = order;
    while (std::next_permutation(perm.begin(), perm.end())) {
      const long s = score(perm);
      if (s > best_score) {
        best_score = s;
        best = perm;
      }
    }
    return best;
  }

  std::vector<int> result(static_cast<std::size_t>(groups), -1);
  std::vector<bool> used(static_cast<std::size_t>(groups), false);
  for (int round = 0; round < groups; ++round) {
    long best = -1;
    int bk = -1, bh = -1;
    for (int h = 0; h < groups; ++h) {
      if (result[static_cast<std::size_t>(h)] >= 0) continue;
      for (int k = 0; k < groups; ++k) {
        if (used[static_cast<std::size_t>(k)]) continue;
        if (agree[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)] > best) {
          best = agree[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
          bk = k;
          bh = h;
        }
      }
    }
    result[static_cast<std::size_t>(bh)] = bk;
    used[static_cast<std::size_t>(bk)] = true;
  }
  return result;
}

Partition labelled_partition(const FitResult& fit, const DataSet& data) {
  const std::vector<int> order = align_to_labels(fit.model, data);
  std::vector<int> new_index(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) new_index[static_cast<std::size_t>(order[k])] = static_cast<int>(k);

  Partition out(static_cast<std::size_t>(data.size()));
  for (Eigen::Index j = 0; j < data.n_labelled(); ++j) out[static_cast<std::size_t>(j)] = data.label(j);
  const Partition unl = map_partition(fit.responsibilities.unlabelled);
  for (std::size_t j = 0; j < unl.size(); ++j) {
    out[static_cast<std::size_t>(data.n_labelled()) + j] = new_index[static_cast<std::size_t>(unl[j])];
  }
  return out;
}

Partition scoring_partition(const FitResult& fit, const DataSet& data) {
  Partition out = map_partition(fit.responsibilities.stacked());
  if (fit.weight.labelled_weight() == 0.0 && data.n_labelled() > 0) {
    const Matrix joint = evaluate_components(fit.model, data.labelled_x()).joint;
    for (Eigen::Index j = 0; j < data.n_labelled(); ++j) out[static_cast<std::size_t>(j)] = argmax_row(joint, j);
  }
  return out;
}

std::string_view to_string(InformationKind k) { return k == InformationKind::BIC ? "BIC" : "ICL"; }

std::string_view to_string(ClassificationKind k) {
  switch (k) {
    case ClassificationKind::E: return "E";
    case ClassificationKind::A: return "A";
    case ClassificationKind::U: return "U";
  }
  return "?";
}

std::string_view to_string(ScatterKind k) { return k == ScatterKind::TraceW ? "trW" : "detW"; }

}  // namespace fsc
