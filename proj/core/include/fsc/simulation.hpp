#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsc/random.hpp"
#include "fsc/selection.hpp"

namespace fsc {

/// Rows with their true group (0-based).
struct LabelledSample {
  Matrix x;
  Partition truth;
  int groups = 0;
};

enum class ScenarioKind { TwoGroupT, ThreeGroupT, TwoGroupGaussian, FromFile };

struct Scenario {
  ScenarioKind kind = ScenarioKind::TwoGroupT;
  double delta = 3.0;
  int n_per_group = 100;
  /// Used by FromFile only.
  std::optional<LabelledSample> sample;

  static Scenario two_group_t(double delta);
  static Scenario three_group_t();
  static Scenario two_group_gaussian(double delta);
  static Scenario from_file(LabelledSample sample);

  std::string name() const;
};

struct ScenarioComponent {
  DistributionSpec distribution;
  int count = 0;
};

/// The generating distributions of a synthetic scenario, in group order.
std::vector<ScenarioComponent> scenario_components(const Scenario& s);

LabelledSample generate(const Scenario& s, Rng& rng);

struct Split {
  DataSet data;
  /// Truth for every DataSet row (labelled first).
  Partition truth;
  /// Source row of each DataSet row.
  std::vector<Eigen::Index> source_rows;
  std::vector<std::string> warnings;
};

/// ⌊percent·N/100⌋ uniformly chosen rows become the labelled block.
Split label_split(const LabelledSample& sample, double percent, Rng& rng);

/// Two hand-built datasets where the value of labels differs sharply:
/// case 1 has a few labelled points in the overlap that mislead a
/// discriminant fit; case 2 labels the cluster cores and leaves the
/// periphery unlabelled.
Split illustrative_case(int which, std::uint64_t seed);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> percents{50.0};
  WeightGrid grid = WeightGrid::standard();
  int replications = 30;
  Family family = Family::StudentT;
  CovarianceStructure structure;
  FitConfig fit;
  SelectionOptions selection;
  std::uint64_t seed = 1;
  /// Keep the fitted model of every cell (for parameter summaries).
  bool keep_models = false;
};

struct ReplicationRecord {
  int replication = 0;
  double percent = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double ari = 0.0;
  std::array<double, kCriterionCount> criteria{};
  std::optional<MixtureModel> model;
};

struct CellSummary {
  double percent = 0.0;
  double alpha = 0.0;
  double mean_ari = 0.0;
  double sd_ari = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct ExperimentResult {
  /// Ordered by replication, then percent, then α.
  std::vector<ReplicationRecord> records;
  /// Ordered by percent, then α.
  std::vector<CellSummary> summaries;
  /// One entry per percent: the α with the highest mean ARI.
  std::vector<std::pair<double, double>> chosen_alpha;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Mean/sd per (percent, α) and the best-mean α per percent.
void summarise(ExperimentResult& result, const std::vector<double>& percents, const WeightGrid& grid);

}  // namespace fsc
