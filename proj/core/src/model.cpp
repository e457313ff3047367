#include "fsc/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fsc {

void WeightConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

DataSet::DataSet(const Matrix& labelled_x, const Matrix& labelled_z, const Matrix& unlabelled_x) {
  if (labelled_x.rows() != labelled_z.rows()) {
    throw DimensionError("DataSet: labelled_x and labelled_z row counts differ");
  }
  if (labelled_z.cols() < 1) throw DimensionError("DataSet: need at least one group column");
  const Eigen::Index p = labelled_x.rows() > 0 ? labelled_x.cols() : unlabelled_x.cols();
  if ((labelled_x.rows() > 0 && labelled_x.cols() != p) ||
      (unlabelled_x.rows() > 0 && unlabelled_x.cols() != p)) {
    throw DimensionError("DataSet: labelled and unlabelled blocks have different widths");
  }
  if (labelled_x.rows() + unlabelled_x.rows() < 1) throw DimensionError("DataSet: no rows");

  n_labelled_ = labelled_x.rows();
  x_.resize(labelled_x.rows() + unlabelled_x.rows(), p);
  if (n_labelled_ > 0) x_.topRows(n_labelled_) = labelled_x;
  if (unlabelled_x.rows() > 0) x_.bottomRows(unlabelled_x.rows()) = unlabelled_x;
  if (!x_.allFinite()) throw DomainError("DataSet: non-finite feature value");

  labelled_z_ = labelled_z;
  labels_.resize(static_cast<std::size_t>(n_labelled_));
  for (Eigen::Index j = 0; j < n_labelled_; ++j) {
    int hot = -1;
    for (Eigen::Index g = 0; g < labelled_z.cols(); ++g) {
      const double v = labelled_z(j, g);
      if (v == 1.0) {
        if (hot >= 0) throw DomainError("DataSet: labelled row " + std::to_string(j) + " has two classes");
        hot = static_cast<int>(g);
      } else if (v != 0.0) {
        throw DomainError("DataSet: labelled_z entries must be 0 or 1");
      }
    }
    if (hot < 0) throw DomainError("DataSet: labelled row " + std::to_string(j) + " has no class");
    labels_[static_cast<std::size_t>(j)] = hot;
  }
}

DataSet DataSet::from_labels(const Matrix& labelled_x, const std::vector<int>& labels, int groups,
                             const Matrix& unlabelled_x) {
  if (static_cast<Eigen::Index>(labels.size()) != labelled_x.rows()) {
    throw DimensionError("DataSet::from_labels: one label per labelled row required");
  }
  Matrix z = Matrix::Zero(labelled_x.rows(), groups);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0 || labels[j] >= groups) throw DomainError("DataSet::from_labels: label out of range");
    z(static_cast<Eigen::Index>(j), labels[j]) = 1.0;
  }
  return DataSet(labelled_x, z, unlabelled_x);
}

DataSet DataSet::with_groups(int groups) const {
  if (groups < this->groups()) {
    throw DomainError("DataSet::with_groups: cannot drop labelled classes");
  }
  DataSet out = *this;
  out.labelled_z_ = Matrix::Zero(n_labelled_, groups);
  out.labelled_z_.leftCols(labelled_z_.cols()) = labelled_z_;
  return out;
}

DataSet DataSet::with_labelled_x(const Matrix& labelled_x) const {
  if (labelled_x.rows() != n_labelled_ || (n_labelled_ > 0 && labelled_x.cols() != dim())) {
    throw DimensionError("DataSet::with_labelled_x: shape mismatch");
  }
  DataSet out = *this;
  if (n_labelled_ > 0) out.x_.topRows(n_labelled_) = labelled_x;
  return out;
}

void MixtureModel::validate() const {
  const int g = groups();
  if (g < 1) throw DomainError("MixtureModel: no components");
  if (static_cast<int>(locations.size()) != g || static_cast<int>(scales.size()) != g) {
    throw DimensionError("MixtureModel: component counts differ");
  }
  if (!(weights.array() > 0.0).all() || std::abs(weights.sum() - 1.0) > 1e-10) {
    throw DomainError("MixtureModel: mixing proportions must be positive and sum to 1");
  }
  if (family == Family::StudentT) {
    if (dof.size() != g || !(dof.array() > 0.0).all()) {
      throw DomainError("MixtureModel: t components need positive degrees of freedom");
    }
  }
  const Eigen::Index p = dim();
  for (int k = 0; k < g; ++k) {
    if (locations[k].size() != p || scales[k].rows() != p || scales[k].cols() != p) {
      throw DimensionError("MixtureModel: component " + std::to_string(k) + " has the wrong dimension");
    }
    factorize_spd(scales[k]);
  }
}

std::vector<SpdFactor> MixtureModel::factors() const {
  std::vector<SpdFactor> out;
  out.reserve(scales.size());
  for (const auto& s : scales) out.push_back(factorize_spd(s));
  return out;
}

MixtureModel MixtureModel::permuted(const std::vector<int>& order) const {
  if (static_cast<int>(order.size()) != groups()) throw DimensionError("permuted: order size");
  MixtureModel out = *this;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = static_cast<std::size_t>(order[k]);
    out.weights(static_cast<Eigen::Index>(k)) = weights(order[k]);
    out.locations[k] = locations[src];
    out.scales[k] = scales[src];
    if (dof.size() > 0) out.dof(static_cast<Eigen::Index>(k)) = dof(order[k]);
  }
  return out;
}

Matrix Responsibilities::stacked() const {
  Matrix out(rows(), groups());
  if (labelled.rows() > 0) out.topRows(labelled.rows()) = labelled;
  if (unlabelled.rows() > 0) out.bottomRows(unlabelled.rows()) = unlabelled;
  return out;
}

namespace {

Vector log_density_from_delta(Family family, const Vector& delta, double p, double log_det,
                              double dof) {
  if (family == Family::Gaussian) {
    const double c = -0.5 * p * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
    return (c - 0.5 * delta.array()).matrix();
  }
  if (!(dof > 0.0)) throw DomainError("log_density: degrees of freedom must be positive");
  const double c = log_gamma(0.5 * (dof + p)) - log_gamma(0.5 * dof) -
                   0.5 * p * std::log(std::numbers::pi * dof) - 0.5 * log_det;
  return (c - 0.5 * (dof + p) * (delta.array() / dof).log1p()).matrix();
}

}  // namespace

Vector log_density_rows(Family family, const Matrix& x, const Vector& mu, const SpdFactor& factor,
                        double dof) {
  const Vector delta = mahalanobis_sq_rows(x, mu, factor);
  return log_density_from_delta(family, delta, static_cast<double>(mu.size()),
                                factor.log_determinant, dof);
}

double log_density(Family family, const Vector& x, const Vector& mu, const Matrix& scale,
                   double dof) {
  if (x.size() != mu.size()) throw DimensionError("log_density: dimension mismatch");
  const SpdFactor f = factorize_spd(scale);
  return log_density_rows(family, x.transpose(), mu, f, dof)(0);
}

ComponentEvaluation evaluate_components(const MixtureModel& model, const Matrix& x) {
  if (model.dim() != x.cols()) throw DimensionError("model and data dimensions differ");
  const int g = model.groups();
  const double p = static_cast<double>(x.cols());
  ComponentEvaluation out{Matrix(x.rows(), g), Matrix(x.rows(), g)};
  for (int k = 0; k < g; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const SpdFactor f = factorize_spd(model.scales[uk]);
    out.delta.col(k) = mahalanobis_sq_rows(x, model.locations[uk], f);
    const double nu = model.family == Family::StudentT ? model.dof(k) : 0.0;
    out.joint.col(k) = log_density_from_delta(model.family, out.delta.col(k), p, f.log_determinant, nu);
    out.joint.col(k).array() += std::log(model.weights(k));
  }
  return out;
}

Matrix joint_log_densities(const MixtureModel& model, const DataSet& data) {
  return evaluate_components(model, data.x()).joint;
}

namespace {

double labelled_term(const Matrix& joint, const DataSet& data) {
  std::vector<double> terms(static_cast<std::size_t>(data.n_labelled()));
  for (Eigen::Index j = 0; j < data.n_labelled(); ++j) {
    terms[static_cast<std::size_t>(j)] = joint(j, data.label(j));
  }
  return pairwise_sum(terms.data(), terms.size());
}

double unlabelled_term(const Matrix& joint, const DataSet& data, double power) {
  const Eigen::Index n1 = data.n_labelled();
  std::vector<double> terms(static_cast<std::size_t>(data.n_unlabelled()));
  for (Eigen::Index j = 0; j < data.n_unlabelled(); ++j) {
    const Vector row = power * joint.row(n1 + j).transpose();
    terms[static_cast<std::size_t>(j)] = log_sum_exp(row);
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace

double weighted_observed_loglik(const MixtureModel& model, const DataSet& data,
                                const WeightConfig& cfg) {
  cfg.validate();
  if (model.groups() < data.groups()) throw DimensionError("model has fewer components than classes");
  const Matrix joint = joint_log_densities(model, data);
  const double a = cfg.alpha;
  double total = 0.0;
  if (a > 0.0 && data.n_labelled() > 0) total += a * labelled_term(joint, data);
  if (cfg.variant == LikelihoodVariant::Original) {
    if (a < 1.0 && data.n_unlabelled() > 0) total += (1.0 - a) * unlabelled_term(joint, data, 1.0);
  } else if (a < 1.0 && data.n_unlabelled() > 0) {
    total += unlabelled_term(joint, data, 1.0 - a);
  }
  return total;
}

double complete_data_loglik(const MixtureModel& model, const DataSet& data,
                            const Responsibilities& resp, const WeightConfig& cfg) {
  cfg.validate();
  if (resp.labelled.rows() != data.n_labelled() || resp.unlabelled.rows() != data.n_unlabelled() ||
      resp.groups() != model.groups()) {
    throw DimensionError("complete_data_loglik: responsibilities do not match data");
  }
  const Matrix joint = joint_log_densities(model, data);
  const Eigen::Index n1 = data.n_labelled();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(data.size()));
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    const bool labelled = r < n1;
    const double w = labelled ? cfg.labelled_weight() : cfg.unlabelled_weight();
    if (w == 0.0) continue;
    double s = 0.0;
    for (Eigen::Index g = 0; g < joint.cols(); ++g) {
      const double z = labelled ? resp.labelled(r, g) : resp.unlabelled(r - n1, g);
      if (z != 0.0) s += z * joint(r, g);
    }
    terms.push_back(w * s);
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace fsc
