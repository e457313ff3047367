#pragma once

#include <string_view>
#include <vector>

#include "fsc/em.hpp"

namespace fsc {

/// Group index per row, 0-based internally (files use 1-based).
using Partition = std::vector<int>;

enum class InformationKind { BIC, ICL };
enum class ClassificationKind { E, A, U };
enum class ScatterKind { TraceW, DetW };

struct ScatterDecomposition {
  Matrix total_S;
  Matrix within_W;
  Matrix between_B;
  Matrix group_means;  // G×p; rows of empty groups are zero
  Vector grand_mean;
  std::vector<Eigen::Index> group_sizes;
};

/// BIC = 2ℓ − k log N with ℓ the Original weighted observed log-likelihood
/// at the fit's α; ICL adds twice the MAP entropy of the unlabelled rows.
double information_criterion(InformationKind kind, const FitResult& fit, const DataSet& data,
                             long param_count);

/// Evaluated on the unlabelled responsibilities (n₂×G).
double classification_criterion(ClassificationKind kind, const Matrix& unlabelled);

/// `groups` of 0 means max(partition) + 1.
ScatterDecomposition scatter_decomposition(const Matrix& x, const Partition& partition, int groups = 0);

double scatter_criterion(ScatterKind kind, const ScatterDecomposition& d);

/// Adjusted Rand index (Hubert–Arabie). Two single-cluster partitions give 1.
double ari(const Partition& a, const Partition& b);

/// Row-wise argmax, lowest index on ties.
Partition map_partition(const Matrix& responsibilities);

/// Component order that best matches the model's MAP on the labelled rows to
/// their known classes: new component k is old component order[k]. Exhaustive
/// for up to 8 components, greedy beyond.
std::vector<int> align_to_labels(const MixtureModel& model, const DataSet& data);

/// Partition of all rows: labelled rows keep their known class, unlabelled
/// rows take their MAP component after aligning components to the labels.
Partition labelled_partition(const FitResult& fit, const DataSet& data);

/// Partition for scoring against truth: MAP of every row, except that
/// labelled rows keep their known class whenever they carry weight (α > 0).
Partition scoring_partition(const FitResult& fit, const DataSet& data);

std::string_view to_string(InformationKind k);
std::string_view to_string(ClassificationKind k);
std::string_view to_string(ScatterKind k);

}  // namespace fsc
