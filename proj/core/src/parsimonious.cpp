#include "fsc/parsimonious.hpp"

#include <cmath>

#include "fsc/model.hpp"

namespace fsc {

namespace {

char letter(Constraint c) {
  switch (c) {
    case Constraint::Identity: return 'I';
    case Constraint::Constrained: return 'C';
    case Constraint::Unconstrained: return 'U';
  }
  return '?';
}

Constraint from_letter(char c, std::string_view code) {
  switch (c) {
    case 'I': return Constraint::Identity;
    case 'C': return Constraint::Constrained;
    case 'U': return Constraint::Unconstrained;
    default: throw Unsupported("unknown covariance structure code '" + std::string(code) + "'");
  }
}

bool valid(const CovarianceStructure& s) {
  if (s.volume == Constraint::Identity || s.dof == Constraint::Identity) return false;
  if (s.orientation == Constraint::Identity) return true;
  // Non-identity orientation requires a non-identity shape.
  return s.shape != Constraint::Identity;
}

void check_inputs(const std::vector<Matrix>& scatters, const std::vector<double>& masses) {
  if (scatters.empty() || scatters.size() != masses.size()) {
    throw DimensionError("project_structure: need one mass per scatter");
  }
  const auto p = scatters.front().rows();
  for (std::size_t g = 0; g < scatters.size(); ++g) {
    if (scatters[g].rows() != p || scatters[g].cols() != p) {
      throw DimensionError("project_structure: scatter shapes differ");
    }
    if (!(masses[g] > 0.0)) throw DegenerateComponent(static_cast<int>(g), masses[g]);
  }
}

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Geometric-mean normaliser det(diag(d))^{1/p}, computed in log space.
double diag_volume(const Vector& d) { return std::exp(d.array().log().mean()); }

}  // namespace

CovarianceStructure CovarianceStructure::parse(std::string_view code) {
  if (code.size() != 4) {
    throw Unsupported("covariance structure code must have 4 letters, got '" + std::string(code) +
                      "'");
  }
  CovarianceStructure s{from_letter(code[0], code), from_letter(code[1], code),
                        from_letter(code[2], code), from_letter(code[3], code)};
  if (!valid(s)) throw Unsupported("'" + std::string(code) + "' is not a recognised covariance structure");
  return s;
}

std::string CovarianceStructure::code() const {
  return {letter(volume), letter(orientation), letter(shape), letter(dof)};
}

bool CovarianceStructure::implemented() const {
  if (orientation == Constraint::Identity) return true;
  return orientation == Constraint::Unconstrained && shape == Constraint::Unconstrained;
}

const std::vector<CovarianceStructure>& all_structures() {
  static const std::vector<CovarianceStructure> table = [] {
    std::vector<CovarianceStructure> out;
    for (const char* code :
         {"CIIC", "CIIU", "UIIC", "UIIU", "CICC", "CICU", "UICC", "UICU", "CIUC", "CIUU",
          "UIUC", "UIUU", "CCCC", "CCCU", "UCCC", "UCCU", "CUCC", "CUCU", "UUCC", "UUCU",
          "CCUC", "CCUU", "CUUC", "CUUU", "UCUC", "UCUU", "UUUC", "UUUU"}) {
      out.push_back(CovarianceStructure::parse(code));
    }
    return out;
  }();
  return table;
}

std::vector<CovarianceStructure> implemented_structures() {
  std::vector<CovarianceStructure> out;
  for (const auto& s : all_structures()) {
    if (s.implemented()) out.push_back(s);
  }
  return out;
}

long covariance_param_count(const CovarianceStructure& s, int groups, int dim) {
  const long g = groups;
  const long p = dim;
  const long full = p * (p + 1) / 2;
  const bool cv = s.volume == Constraint::Constrained;
  using C = Constraint;
  switch (s.orientation) {
    case C::Identity:
      switch (s.shape) {
        case C::Identity: return cv ? 1 : g - 1;
        case C::Constrained: return cv ? p : p + (g - 1);
        case C::Unconstrained: return cv ? g * p - (g - 1) : g * p;
      }
      break;
    case C::Constrained:
      if (s.shape == C::Constrained) return cv ? full : full + (g - 1);
      // Tabulated as printed, including the UCU* row.
      return cv ? full + (g - 1) * (p - 1) : g * full + (g - 1) * p;
    case C::Unconstrained:
      if (s.shape == C::Constrained) return cv ? g * full - (g - 1) * p : g * full - (g - 1) * (p - 1);
      return cv ? g * full - (g - 1) : g * full;
  }
  throw Unsupported("covariance_param_count: invalid structure " + s.code());
}

long dof_param_count(const CovarianceStructure& s, int groups) {
  return s.dof == Constraint::Constrained ? 1 : groups;
}

long free_param_count(const CovarianceStructure& s, int groups, int dim) {
  if (!valid(s)) throw Unsupported("free_param_count: invalid structure " + s.code());
  if (groups < 1 || dim < 1) throw DomainError("free_param_count: groups and dim must be >= 1");
  return covariance_param_count(s, groups, dim) + dof_param_count(s, groups);
}

long model_param_count(const CovarianceStructure& s, Family family, int groups, int dim) {
  long count = covariance_param_count(s, groups, dim) + (groups - 1) + long{groups} * dim;
  if (family == Family::StudentT) count += dof_param_count(s, groups);
  return count;
}

std::vector<Matrix> project_structure(const CovarianceStructure& s,
                                      const std::vector<Matrix>& scatters,
                                      const std::vector<double>& masses) {
  if (!s.implemented()) {
    throw Unsupported("covariance structure " + s.code() + " is not implemented for fitting");
  }
  check_inputs(scatters, masses);
  const std::size_t groups = scatters.size();
  const Eigen::Index p = scatters.front().rows();
  const double total_mass = sum_of(masses);
  using C = Constraint;

  std::vector<Matrix> out(groups);

  if (s.orientation == C::Unconstrained) {
    if (s.volume == C::Unconstrained) {
      for (std::size_t g = 0; g < groups; ++g) out[g] = scatters[g] / masses[g];
      return out;
    }
    // Equal volume: Σ_g = λ W_g / |W_g|^{1/p}, λ = Σ_g |W_g|^{1/p} / Σ_g m_g.
    std::vector<double> roots(groups);
    double pooled = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      const SpdFactor f = factorize_spd(scatters[g]);
      roots[g] = std::exp(f.log_determinant / static_cast<double>(p));
      pooled += roots[g];
    }
    const double lambda = pooled / total_mass;
    for (std::size_t g = 0; g < groups; ++g) out[g] = (lambda / roots[g]) * scatters[g];
    return out;
  }

  // Diagonal family from here on.
  std::vector<Vector> diags(groups);
  for (std::size_t g = 0; g < groups; ++g) diags[g] = scatters[g].diagonal();

  auto diagonal_matrix = [p](const Vector& d) {
    Matrix m = Matrix::Zero(p, p);
    m.diagonal() = d;
    return m;
  };

  switch (s.shape) {
    case C::Identity: {
      if (s.volume == C::Constrained) {
        double traces = 0.0;
        for (const auto& d : diags) traces += d.sum();
        const Matrix shared = Matrix::Identity(p, p) * (traces / (static_cast<double>(p) * total_mass));
        for (auto& m : out) m = shared;
      } else {
        for (std::size_t g = 0; g < groups; ++g) {
          out[g] = Matrix::Identity(p, p) * (diags[g].sum() / (static_cast<double>(p) * masses[g]));
        }
      }
      return out;
    }
    case C::Constrained: {
      if (s.volume == C::Constrained) {
        Vector pooled = Vector::Zero(p);
        for (const auto& d : diags) pooled += d;
        const Matrix shared = diagonal_matrix(pooled / total_mass);
        for (auto& m : out) m = shared;
        return out;
      }
      // Varying volume, common shape B (det 1): alternate
      //   λ_g = tr(B⁻¹ W_g) / (p m_g),  B ∝ Σ_g diag(W_g) / λ_g.
      for (const auto& d : diags) {
        if (!(d.minCoeff() > 0.0)) throw NotPositiveDefinite(0, d.minCoeff());
      }
      Vector shape = Vector::Ones(p);
      std::vector<double> lambda(groups, 0.0);
      for (int iter = 0; iter < 1000; ++iter) {
        for (std::size_t g = 0; g < groups; ++g) {
          lambda[g] = (diags[g].array() / shape.array()).sum() / (static_cast<double>(p) * masses[g]);
        }
        Vector next = Vector::Zero(p);
        for (std::size_t g = 0; g < groups; ++g) next += diags[g] / lambda[g];
        next /= diag_volume(next);
        const double change = ((next - shape).array().abs() / shape.array()).maxCoeff();
        shape = next;
        if (change < 1e-14) break;
      }
      for (std::size_t g = 0; g < groups; ++g) {
        lambda[g] = (diags[g].array() / shape.array()).sum() / (static_cast<double>(p) * masses[g]);
      }
      for (std::size_t g = 0; g < groups; ++g) out[g] = diagonal_matrix(lambda[g] * shape);
      return out;
    }
    case C::Unconstrained: {
      if (s.volume == C::Unconstrained) {
        for (std::size_t g = 0; g < groups; ++g) out[g] = diagonal_matrix(diags[g] / masses[g]);
        return out;
      }
      // Σ_g = λ B_g with B_g = diag(W_g)/|diag W_g|^{1/p}.
      std::vector<double> vols(groups);
      double pooled = 0.0;
      for (std::size_t g = 0; g < groups; ++g) {
        if (!(diags[g].minCoeff() > 0.0)) throw NotPositiveDefinite(0, diags[g].minCoeff());
        vols[g] = diag_volume(diags[g]);
        pooled += vols[g];
      }
      const double lambda = pooled / total_mass;
      for (std::size_t g = 0; g < groups; ++g) out[g] = diagonal_matrix(diags[g] * (lambda / vols[g]));
      return out;
    }
  }
  throw Unsupported("project_structure: unreachable structure " + s.code());
}

}  // namespace fsc
