#pragma once

#include <vector>

#include "fsc/numerics.hpp"
#include "fsc/parsimonious.hpp"

namespace fsc {

enum class Family { Gaussian, StudentT };

enum class LikelihoodVariant { Original, Alternative };

/// α weights the labelled block, 1 − α the unlabelled block.
struct WeightConfig {
  double alpha = 0.5;
  LikelihoodVariant variant = LikelihoodVariant::Original;

  double labelled_weight() const { return alpha; }
  double unlabelled_weight() const { return 1.0 - alpha; }
  void validate() const;
};

/// Observations split into a labelled block (with one-hot class indicators)
/// and an unlabelled block. Rows are stored stacked: labelled first.
class DataSet {
 public:
  DataSet() = default;

  /// `labelled_z` is n₁×G with exactly one 1 per row. An empty labelled block
  /// still needs G columns, so pass Matrix(0, G).
  DataSet(const Matrix& labelled_x, const Matrix& labelled_z, const Matrix& unlabelled_x);

  /// Convenience: 0-based class indices instead of indicator rows.
  static DataSet from_labels(const Matrix& labelled_x, const std::vector<int>& labels, int groups,
                             const Matrix& unlabelled_x);

  Eigen::Index n_labelled() const { return n_labelled_; }
  Eigen::Index n_unlabelled() const { return x_.rows() - n_labelled_; }
  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }
  int groups() const { return static_cast<int>(labelled_z_.cols()); }

  const Matrix& x() const { return x_; }
  auto labelled_x() const { return x_.topRows(n_labelled_); }
  auto unlabelled_x() const { return x_.bottomRows(n_unlabelled()); }
  const Matrix& labelled_z() const { return labelled_z_; }

  /// Known class of labelled row j (0-based).
  int label(Eigen::Index j) const { return labels_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& labels() const { return labels_; }

  /// Same data with labelled_z zero-padded to `groups` columns.
  DataSet with_groups(int groups) const;

  /// Same data with a replaced labelled block of features (shape must match).
  DataSet with_labelled_x(const Matrix& labelled_x) const;

 private:
  Matrix x_;
  Matrix labelled_z_;
  std::vector<int> labels_;
  Eigen::Index n_labelled_ = 0;
};

struct MixtureModel {
  Family family = Family::Gaussian;
  Vector weights;
  std::vector<Vector> locations;
  std::vector<Matrix> scales;
  /// One entry per component for StudentT, empty for Gaussian.
  Vector dof;
  CovarianceStructure structure;

  int groups() const { return static_cast<int>(weights.size()); }
  Eigen::Index dim() const { return locations.empty() ? 0 : locations.front().size(); }

  /// Checks shapes, weights, and that every scale factorises.
  void validate() const;

  std::vector<SpdFactor> factors() const;

  /// Copy with components reordered: new component k is old component order[k].
  MixtureModel permuted(const std::vector<int>& order) const;
};

/// Posterior class weights ẑ and, for t fits, latent scale weights ŵ.
struct Responsibilities {
  Matrix labelled;    // n₁×G, copies of the known indicators
  Matrix unlabelled;  // n₂×G
  Matrix scale;       // N×G (labelled rows first); empty for Gaussian

  int groups() const { return static_cast<int>(std::max(labelled.cols(), unlabelled.cols())); }
  /// Row r of the stacked (labelled, unlabelled) matrix.
  Eigen::Index rows() const { return labelled.rows() + unlabelled.rows(); }
  Matrix stacked() const;
};

double log_density(Family family, const Vector& x, const Vector& mu, const Matrix& scale,
                   double dof = 0.0);

/// Log densities of every row of `x` under one component.
Vector log_density_rows(Family family, const Matrix& x, const Vector& mu, const SpdFactor& factor,
                        double dof);

/// Per-row, per-component quantities shared by the E-step and the likelihood.
struct ComponentEvaluation {
  Matrix delta;  // squared Mahalanobis distances, N×G
  Matrix joint;  // log πg + log fg(x_r), N×G
};

ComponentEvaluation evaluate_components(const MixtureModel& model, const Matrix& x);

/// log πg + log fg(x_r) for every data row r (N×G), labelled rows first.
Matrix joint_log_densities(const MixtureModel& model, const DataSet& data);

/// Original: α Σ_lab Σ_g z log(π f) + (1 − α) Σ_unlab log Σ_g π f.
/// Alternative: α Σ_lab Σ_g z log(π f) + Σ_unlab log Σ_g (π f)^{1−α}, and just
/// the labelled term at α = 1.
double weighted_observed_loglik(const MixtureModel& model, const DataSet& data,
                                const WeightConfig& cfg);

double complete_data_loglik(const MixtureModel& model, const DataSet& data,
                            const Responsibilities& resp, const WeightConfig& cfg);

}  // namespace fsc
