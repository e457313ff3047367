#pragma once

// Eigen-decomposed covariance structures Σ_g = λ_g Λ_g D_g Λ_gᵀ plus the degrees-of-freedom
// constraint. Codes are four letters: volume, orientation, shape, dof, each
// C (constrained / shared), U (unconstrained) or I (identity).

#include <string>
#include <string_view>
#include <vector>

#include "fsc/numerics.hpp"

namespace fsc {

enum class Constraint { Identity, Constrained, Unconstrained };

struct CovarianceStructure {
  Constraint volume = Constraint::Unconstrained;
  Constraint orientation = Constraint::Unconstrained;
  Constraint shape = Constraint::Unconstrained;
  Constraint dof = Constraint::Unconstrained;

  /// Parses a four-letter code such as "UUUU" or "CIIC"; throws
  /// Unsupported for strings that are not one of the 28 models.
  static CovarianceStructure parse(std::string_view code);
  static CovarianceStructure unconstrained() { return {}; }

  std::string code() const;

  /// True when project_structure has a closed-form (or simple fixed-point)
  /// M-step for this structure.
  bool implemented() const;

  bool diagonal() const { return orientation == Constraint::Identity; }
  bool shared_dof() const { return dof == Constraint::Constrained; }

  friend bool operator==(const CovarianceStructure&, const CovarianceStructure&) = default;
};

/// All 28 structures in table order.
const std::vector<CovarianceStructure>& all_structures();

/// The 16 structures accepted by fitting.
std::vector<CovarianceStructure> implemented_structures();

/// Free covariance parameters (no dof term).
long covariance_param_count(const CovarianceStructure& s, int groups, int dim);

/// 1 when ν is shared, G otherwise.
long dof_param_count(const CovarianceStructure& s, int groups);

/// Covariance + dof parameters, exactly as tabulated for the t family.
long free_param_count(const CovarianceStructure& s, int groups, int dim);

enum class Family;

/// Everything BIC penalises: covariance (+ dof for t) + (G − 1) + G·p.
long model_param_count(const CovarianceStructure& s, Family family, int groups, int dim);

/// Constrained maximiser of Σ_g [−(m_g/2) log|Σ_g| − ½ tr(Σ_g⁻¹ W_g)] for the
/// given weighted scatters W_g and masses m_g. For UUUU/UUUC this is W_g/m_g.
std::vector<Matrix> project_structure(const CovarianceStructure& s,
                                      const std::vector<Matrix>& scatters,
                                      const std::vector<double>& masses);

}  // namespace fsc
