#pragma once

// Weighted EM (Gaussian) and multicycle ECM (Student-t) for fractionally
// supervised mixtures. Labelled rows carry weight α, unlabelled rows 1 − α.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsc/model.hpp"

namespace fsc {

struct FitConfig {
  /// k-means restarts inside one initialisation.
  int n_starts = 50;
  /// Independent EM chains; the best final log-likelihood wins.
  int em_starts = 1;
  int max_iterations = 1000;
  double aitken_epsilon = 1e-5;
  RootBracket nu_bracket{2.0, 200.0, 1e-6, 200};
  /// Forces a single shared ν (equivalent to a 'C' fourth structure letter).
  bool constrain_nu = false;
  double initial_dof = 50.0;
  WeightConfig weight;
  std::uint64_t seed = 1;

  void validate() const;
};

struct FitResult {
  MixtureModel model;
  Responsibilities responsibilities;
  std::vector<double> loglik_trace;
  bool converged = false;
  int n_iterations = 0;
  /// 0-based MAP component per row, labelled rows first.
  std::vector<int> map_partition;
  WeightConfig weight;
  std::vector<std::string> warnings;

  double final_loglik() const { return loglik_trace.empty() ? 0.0 : loglik_trace.back(); }
};

/// Best-of-n_starts Lloyd k-means over the rows that carry weight, aligned to
/// the labelled classes by majority vote; labelled rows get their indicators.
Responsibilities kmeans_init(const DataSet& data, int groups, const FitConfig& cfg);

/// Within-cluster sum of squares of a hard assignment.
double within_cluster_ss(const Matrix& x, const std::vector<int>& assignment, int groups);

Responsibilities e_step(const MixtureModel& model, const DataSet& data, const WeightConfig& weight);

MixtureModel m_step_gaussian(const DataSet& data, const Responsibilities& resp,
                             const CovarianceStructure& structure, const WeightConfig& weight);

struct CmStepResult {
  MixtureModel model;
  /// Responsibilities from the intermediate E-step (used by the second CM-step).
  Responsibilities responsibilities;
  /// Components whose ν solve hit a bracket end; the end was adopted.
  std::vector<int> nu_at_boundary;
};

/// CM1 (π, μ, ν) → E-step → CM2 (Σ). `resp` must carry scale weights.
CmStepResult cm_steps_t(const DataSet& data, const Responsibilities& resp,
                        const MixtureModel& previous, const FitConfig& cfg);

/// Aitken stopping rule on the last three entries of the trace.
bool aitken_converged(std::span<const double> trace, double epsilon);

/// One EM/ECM chain from given initial responsibilities.
FitResult fit_from(const DataSet& data, const Responsibilities& initial, Family family,
                   const CovarianceStructure& structure, const FitConfig& cfg);

/// k-means initialisation followed by EM/ECM; throws FitFailed when every
/// chain fails and Unsupported for structures outside the implemented set.
FitResult fit(const DataSet& data, int groups, Family family, const CovarianceStructure& structure,
              const FitConfig& cfg);

}  // namespace fsc
