#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsc/criteria.hpp"

namespace fsc {

struct WeightGrid {
  std::vector<double> alphas;

  /// {0, 0.1, …, 1}.
  static WeightGrid standard();
  /// "a:b:step" or a comma list such as "0,0.5,1".
  static WeightGrid parse(std::string_view spec);
  void validate() const;
};

enum class Criterion { BIC, ICL, E, A, U, TraceW, DetW, ARI };
inline constexpr std::size_t kCriterionCount = 8;
inline constexpr std::array<Criterion, kCriterionCount> kAllCriteria{
    Criterion::BIC, Criterion::ICL, Criterion::E,    Criterion::A,
    Criterion::U,   Criterion::TraceW, Criterion::DetW, Criterion::ARI};

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

enum class Direction { Max, Min };
enum class PointSet { All, Unlabelled };

PointSet parse_point_set(std::string_view name);
std::string_view to_string(PointSet p);

struct SelectionOptions {
  Direction u_direction = Direction::Max;
  PointSet scatter_points = PointSet::All;
  PointSet ari_points = PointSet::All;
  /// Ground truth for every row (labelled first), 0-based; enables ARI.
  std::optional<Partition> truth;
  int threads = 1;
  bool keep_fits = true;
};

Direction direction(Criterion c, const SelectionOptions& opts);

/// Seed used for the fit at `alpha`: seed + 1000·index(α). Points of the
/// 0.1 lattice map to their position in the standard grid; any other α gets a
/// distinct index above it, so results never depend on the rest of the grid.
std::uint64_t alpha_seed(std::uint64_t seed, double alpha);

struct FitRecord {
  double alpha = 0.0;
  int groups = 0;
  CovarianceStructure structure;
  bool ok = false;
  std::string error;
  bool converged = false;
  int n_iterations = 0;
  double loglik = 0.0;
  long param_count = 0;
  /// NaN where a criterion is unavailable (ARI without truth, failed fit).
  std::array<double, kCriterionCount> values{};
  /// Partition scored against truth (see scoring_partition).
  Partition partition;
  std::vector<std::string> warnings;
  std::optional<FitResult> fit;

  double value(Criterion c) const { return values[static_cast<std::size_t>(c)]; }
  std::string model_code() const;
};

struct SelectionReport {
  /// 0 for a plain weight-grid search, otherwise 1 or 2.
  int procedure = 0;
  /// Criterion used to pick α in model-then-weight selection.
  Criterion weight_criterion = Criterion::DetW;
  std::vector<FitRecord> records;
  /// Records eligible for the per-criterion choice (all of them for a plain
  /// grid search; the per-α or per-model winners for the procedures).
  std::vector<std::size_t> candidates;
  std::array<std::optional<std::size_t>, kCriterionCount> chosen{};
  std::optional<std::size_t> final_choice;
};

/// Index of the extremum among `candidates` (NaN and failed fits skipped);
/// ties go to the smallest α, then the earliest record.
std::optional<std::size_t> select_extremum(const std::vector<FitRecord>& records,
                                           const std::vector<std::size_t>& candidates, Criterion c,
                                           const SelectionOptions& opts);

/// Fills `chosen` from `records` and `candidates`; pure function of the table.
void reselect(SelectionReport& report, const SelectionOptions& opts);

/// Fit plus every criterion for one (α, G, structure) cell.
FitRecord evaluate_fit(const DataSet& data, int groups, Family family,
                       const CovarianceStructure& structure, const FitConfig& cfg,
                       const SelectionOptions& opts);

SelectionReport weight_grid_search(const DataSet& data, int groups, Family family,
                                   const CovarianceStructure& structure, const WeightGrid& grid,
                                   const FitConfig& cfg, const SelectionOptions& opts = {});

/// Procedure 1: per α the model with the best BIC, then α by `weight_criterion`
/// among those winners. Procedure 2: the model attaining the best
/// `weight_criterion` overall, then α by the same criterion within it.
SelectionReport select_model_then_weight(int procedure, const DataSet& data,
                                         const std::vector<int>& group_range,
                                         const std::vector<CovarianceStructure>& structures,
                                         Family family, const WeightGrid& grid, const FitConfig& cfg,
                                         const SelectionOptions& opts = {},
                                         Criterion weight_criterion = Criterion::DetW);

struct GroupCountResult {
  int chosen = 0;
  InformationKind kind = InformationKind::BIC;
  std::vector<FitRecord> records;
};

/// Fits H components for each H in `range` (labelled_z zero-padded) and keeps
/// the best BIC or ICL.
GroupCountResult select_num_groups(const DataSet& data, const std::vector<int>& range, Family family,
                                   const CovarianceStructure& structure, const FitConfig& cfg,
                                   InformationKind kind = InformationKind::BIC,
                                   const SelectionOptions& opts = {});

/// Runs task(i) for i in [0, n) on up to `threads` workers; the first
/// exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

}  // namespace fsc
