#include "fsc/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "fsc/criteria.hpp"
#include "fsc/random.hpp"

namespace fsc {

namespace {

constexpr double kDegenerateMass = 1e-8;

// Rows that carry positive weight under α, with that weight.
struct ActiveRows {
  std::vector<Eigen::Index> rows;
  Vector omega;
};

ActiveRows active_rows(const DataSet& data, const WeightConfig& weight) {
  ActiveRows out;
  const double wl = weight.labelled_weight();
  const double wu = weight.unlabelled_weight();
  std::vector<double> omega;
  if (wl > 0.0) {
    for (Eigen::Index r = 0; r < data.n_labelled(); ++r) {
      out.rows.push_back(r);
      omega.push_back(wl);
    }
  }
  if (wu > 0.0) {
    for (Eigen::Index r = data.n_labelled(); r < data.size(); ++r) {
      out.rows.push_back(r);
      omega.push_back(wu);
    }
  }
  out.omega = Eigen::Map<const Vector>(omega.data(), static_cast<Eigen::Index>(omega.size()));
  return out;
}

Matrix gather_rows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Vector checked_masses(const Matrix& c) {
  Vector m = c.colwise().sum().transpose();
  for (Eigen::Index g = 0; g < m.size(); ++g) {
    if (!(m(g) > kDegenerateMass)) throw DegenerateComponent(static_cast<int>(g), m(g));
  }
  return m;
}

Matrix weighted_scatter(const Matrix& x, const Vector& w, const Vector& mu) {
  const Matrix centred = x.rowwise() - mu.transpose();
  Matrix s = centred.transpose() * (centred.array().colwise() * w.array()).matrix();
  return 0.5 * (s + s.transpose());
}

std::vector<Matrix> scatters_about(const Matrix& x, const Matrix& weights,
                                   const std::vector<Vector>& means) {
  std::vector<Matrix> out;
  out.reserve(means.size());
  for (std::size_t g = 0; g < means.size(); ++g) {
    out.push_back(weighted_scatter(x, weights.col(static_cast<Eigen::Index>(g)), means[g]));
  }
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Matrix labelled_indicators(const DataSet& data, int groups) {
  if (data.groups() > groups) {
    throw DimensionError("more labelled classes (" + std::to_string(data.groups()) +
                         ") than mixture components (" + std::to_string(groups) + ")");
  }
  Matrix z = Matrix::Zero(data.n_labelled(), groups);
  z.leftCols(data.groups()) = data.labelled_z();
  return z;
}

// Lloyd's algorithm from `centres`; returns the assignment and its WCSS.
std::pair<std::vector<int>, double> lloyd(const Matrix& x, Matrix centres) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = centres.rows();
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (x.row(i) - centres.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centres.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centre.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (x.row(i) - centres.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centres.row(c) = x.row(far);
      assign[static_cast<std::size_t>(far)] = static_cast<int>(c);
      changed = true;
    }
    if (!changed) break;
  }
  return {assign, within_cluster_ss(x, assign, static_cast<int>(k))};
}

// Map k-means clusters onto classes: repeatedly take the largest remaining
// (class, cluster) count; leftovers pair up in index order.
std::vector<int> align_clusters(const std::vector<int>& classes, const std::vector<int>& clusters,
                                int groups) {
  std::vector<std::vector<int>> counts(static_cast<std::size_t>(groups),
                                       std::vector<int>(static_cast<std::size_t>(groups), 0));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ++counts[static_cast<std::size_t>(classes[i])][static_cast<std::size_t>(clusters[i])];
  }
  std::vector<int> cluster_to_class(static_cast<std::size_t>(groups), -1);
  std::vector<bool> class_used(static_cast<std::size_t>(groups), false);
  for (int round = 0; round < groups; ++round) {
    int best_h = -1, best_k = -1, best = 0;
    for (int k = 0; k < groups; ++k) {
      if (cluster_to_class[static_cast<std::size_t>(k)] >= 0) continue;
      for (int h = 0; h < groups; ++h) {
        if (class_used[static_cast<std::size_t>(h)]) continue;
        const int c = counts[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)];
        if (c > best) {
          best = c;
          best_h = h;
          best_k = k;
        }
      }
    }
    if (best_h < 0) break;
    cluster_to_class[static_cast<std::size_t>(best_k)] = best_h;
    class_used[static_cast<std::size_t>(best_h)] = true;
  }
  int next_class = 0;
  for (auto& target : cluster_to_class) {
    if (target >= 0) continue;
    while (class_used[static_cast<std::size_t>(next_class)]) ++next_class;
    target = next_class;
    class_used[static_cast<std::size_t>(next_class)] = true;
  }
  return cluster_to_class;
}

double solve_dof(double offset, const RootBracket& bracket, bool& at_boundary) {
  auto f = [offset](double nu) { return -digamma(0.5 * nu) + std::log(0.5 * nu) + 1.0 + offset; };
  try {
    return find_root(f, bracket);
  } catch (const NoBracket&) {
    // f is decreasing in ν, so a same-sign bracket means the root lies
    // outside it; the nearer end is the constrained maximiser.
    at_boundary = true;
    return f(bracket.lo) < 0.0 ? bracket.lo : bracket.hi;
  }
}

CovarianceStructure effective_structure(Family family, CovarianceStructure s, const FitConfig& cfg) {
  if (family == Family::StudentT && cfg.constrain_nu) s.dof = Constraint::Constrained;
  return s;
}

}  // namespace

void FitConfig::validate() const {
  if (n_starts < 1) throw DomainError("n_starts must be >= 1");
  if (em_starts < 1) throw DomainError("em_starts must be >= 1");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(aitken_epsilon > 0.0)) throw DomainError("aitken_epsilon must be positive");
  nu_bracket.validate();
  if (!(initial_dof > 0.0)) throw DomainError("initial_dof must be positive");
  weight.validate();
}

double within_cluster_ss(const Matrix& x, const std::vector<int>& assignment, int groups) {
  if (static_cast<Eigen::Index>(assignment.size()) != x.rows()) {
    throw DimensionError("within_cluster_ss: one assignment per row required");
  }
  Matrix sums = Matrix::Zero(groups, x.cols());
  Vector counts = Vector::Zero(groups);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sums.row(assignment[static_cast<std::size_t>(i)]) += x.row(i);
    counts(assignment[static_cast<std::size_t>(i)]) += 1.0;
  }
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int g = assignment[static_cast<std::size_t>(i)];
    wcss += (x.row(i) - sums.row(g) / counts(g)).squaredNorm();
  }
  return wcss;
}

Responsibilities kmeans_init(const DataSet& data, int groups, const FitConfig& cfg) {
  cfg.validate();
  if (groups < 1) throw DomainError("kmeans_init: groups must be >= 1");
  const Eigen::Index n1 = data.n_labelled();
  const Eigen::Index n2 = data.n_unlabelled();

  Responsibilities out;
  out.labelled = labelled_indicators(data, groups);
  out.unlabelled = Matrix::Constant(n2, groups, 1.0 / groups);

  const WeightConfig& w = cfg.weight;
  if (w.unlabelled_weight() == 0.0) return out;  // α = 1: unlabelled rows carry no weight

  const ActiveRows active = active_rows(data, w);
  const auto n_active = static_cast<Eigen::Index>(active.rows.size());
  if (n_active < groups) {
    throw TooFewPoints("kmeans_init: " + std::to_string(n_active) + " weighted rows for " +
                       std::to_string(groups) + " groups");
  }
  const Matrix x = gather_rows(data.x(), active.rows);

  std::vector<int> best_assign;
  double best_wcss = std::numeric_limits<double>::infinity();
  for (int start = 0; start < cfg.n_starts; ++start) {
    Rng rng(cfg.seed + static_cast<std::uint64_t>(start));
    // Partial Fisher-Yates: the first `groups` entries become the seeds.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_active));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Matrix centres(groups, x.cols());
    for (int c = 0; c < groups; ++c) {
      const auto pick = c + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n_active - c)));
      std::swap(idx[static_cast<std::size_t>(c)], idx[static_cast<std::size_t>(pick)]);
      centres.row(c) = x.row(idx[static_cast<std::size_t>(c)]);
    }
    auto [assign, wcss] = lloyd(x, centres);
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assign = std::move(assign);
    }
  }

  // Rows of `x` that are labelled come first (active_rows keeps data order).
  const bool labelled_active = w.labelled_weight() > 0.0 && n1 > 0;
  std::vector<int> mapping(static_cast<std::size_t>(groups));
  std::iota(mapping.begin(), mapping.end(), 0);
  if (labelled_active) {
    std::vector<int> classes(static_cast<std::size_t>(n1));
    std::vector<int> clusters(static_cast<std::size_t>(n1));
    for (Eigen::Index j = 0; j < n1; ++j) {
      classes[static_cast<std::size_t>(j)] = data.label(j);
      clusters[static_cast<std::size_t>(j)] = best_assign[static_cast<std::size_t>(j)];
    }
    mapping = align_clusters(classes, clusters, groups);
  }

  out.unlabelled.setZero();
  const std::size_t offset = labelled_active ? static_cast<std::size_t>(n1) : 0;
  for (Eigen::Index j = 0; j < n2; ++j) {
    const int cluster = best_assign[offset + static_cast<std::size_t>(j)];
    out.unlabelled(j, mapping[static_cast<std::size_t>(cluster)]) = 1.0;
  }
  return out;
}

Responsibilities e_step(const MixtureModel& model, const DataSet& data, const WeightConfig& weight) {
  weight.validate();
  const int groups = model.groups();
  const ComponentEvaluation ev = evaluate_components(model, data.x());
  const Eigen::Index n1 = data.n_labelled();
  const Eigen::Index n2 = data.n_unlabelled();

  Responsibilities out;
  out.labelled = labelled_indicators(data, groups);
  out.unlabelled.resize(n2, groups);
  const double power =
      weight.variant == LikelihoodVariant::Alternative ? weight.unlabelled_weight() : 1.0;
  for (Eigen::Index j = 0; j < n2; ++j) {
    const Vector row = power * ev.joint.row(n1 + j).transpose();
    const double norm = log_sum_exp(row);
    out.unlabelled.row(j) = (row.array() - norm).exp().transpose();
  }

  if (model.family == Family::StudentT) {
    const double p = static_cast<double>(data.dim());
    out.scale.resize(data.size(), groups);
    for (int g = 0; g < groups; ++g) {
      const double nu = model.dof(g);
      out.scale.col(g) = ((nu + p) / (nu + ev.delta.col(g).array())).matrix();
    }
  }
  return out;
}

MixtureModel m_step_gaussian(const DataSet& data, const Responsibilities& resp,
                             const CovarianceStructure& structure, const WeightConfig& weight) {
  weight.validate();
  if (resp.rows() != data.size()) throw DimensionError("m_step_gaussian: responsibilities shape");
  const int groups = resp.groups();
  const ActiveRows active = active_rows(data, weight);
  const Matrix x = gather_rows(data.x(), active.rows);
  const Matrix c = (gather_rows(resp.stacked(), active.rows).array().colwise() * active.omega.array()).matrix();
  const Vector masses = checked_masses(c);

  MixtureModel model;
  model.family = Family::Gaussian;
  model.structure = structure;
  model.weights = masses / masses.sum();
  model.locations.resize(static_cast<std::size_t>(groups));
  for (int g = 0; g < groups; ++g) {
    model.locations[static_cast<std::size_t>(g)] = (x.transpose() * c.col(g)) / masses(g);
  }
  model.scales = project_structure(structure, scatters_about(x, c, model.locations), to_std(masses));
  model.validate();
  return model;
}

CmStepResult cm_steps_t(const DataSet& data, const Responsibilities& resp,
                        const MixtureModel& previous, const FitConfig& cfg) {
  cfg.validate();
  if (previous.family != Family::StudentT) throw DomainError("cm_steps_t: previous model is not a t mixture");
  if (resp.rows() != data.size() || resp.scale.rows() != data.size()) {
    throw DimensionError("cm_steps_t: responsibilities need scale weights for every row");
  }
  const int groups = resp.groups();
  const double p = static_cast<double>(data.dim());
  const ActiveRows active = active_rows(data, cfg.weight);
  const Matrix x = gather_rows(data.x(), active.rows);

  // First CM-step: π, μ, ν.
  const Matrix c = (gather_rows(resp.stacked(), active.rows).array().colwise() * active.omega.array()).matrix();
  const Matrix w = gather_rows(resp.scale, active.rows);
  const Vector masses = checked_masses(c);
  const Matrix cw = (c.array() * w.array()).matrix();
  const Vector wmasses = cw.colwise().sum().transpose();

  MixtureModel model = previous;
  model.weights = masses / masses.sum();
  for (int g = 0; g < groups; ++g) {
    if (!(wmasses(g) > 0.0)) throw DegenerateComponent(g, wmasses(g));
    model.locations[static_cast<std::size_t>(g)] = (x.transpose() * cw.col(g)) / wmasses(g);
  }

  const Matrix log_w_minus_w = (w.array().log() - w.array()).matrix();
  CmStepResult out;
  auto old_term = [p](double nu_old) {
    return digamma(0.5 * (nu_old + p)) - std::log(0.5 * (nu_old + p));
  };
  const bool shared = cfg.constrain_nu || previous.structure.shared_dof();
  if (shared) {
    double s = 0.0;
    for (int g = 0; g < groups; ++g) s += c.col(g).dot(log_w_minus_w.col(g));
    bool boundary = false;
    const double nu = solve_dof(s / masses.sum() + old_term(previous.dof(0)), cfg.nu_bracket, boundary);
    model.dof.setConstant(groups, nu);
    if (boundary) {
      for (int g = 0; g < groups; ++g) out.nu_at_boundary.push_back(g);
    }
  } else {
    for (int g = 0; g < groups; ++g) {
      const double s = c.col(g).dot(log_w_minus_w.col(g)) / masses(g);
      bool boundary = false;
      model.dof(g) = solve_dof(s + old_term(previous.dof(g)), cfg.nu_bracket, boundary);
      if (boundary) out.nu_at_boundary.push_back(g);
    }
  }

  // Intermediate E-step, then the second CM-step for Σ.
  out.responsibilities = e_step(model, data, cfg.weight);
  const Matrix c2 =
      (gather_rows(out.responsibilities.stacked(), active.rows).array().colwise() * active.omega.array())
          .matrix();
  const Vector masses2 = checked_masses(c2);
  const Matrix cw2 = (c2.array() * gather_rows(out.responsibilities.scale, active.rows).array()).matrix();
  model.scales = project_structure(model.structure, scatters_about(x, cw2, model.locations),
                                   to_std(masses2));
  model.validate();
  out.model = std::move(model);
  return out;
}

bool aitken_converged(std::span<const double> trace, double epsilon) {
  const std::size_t n = trace.size();
  if (n < 3) return false;
  const double before = trace[n - 3];
  const double current = trace[n - 2];
  const double next = trace[n - 1];
  const double step = next - current;
  if (step < 1e-12) return true;  // stalled
  const double prev_step = current - before;
  if (prev_step == 0.0) return false;
  const double a = step / prev_step;
  if (!(a < 1.0)) return false;
  const double limit = current + step / (1.0 - a);
  const double gap = limit - next;
  return gap >= 0.0 && gap < epsilon;
}

FitResult fit_from(const DataSet& data, const Responsibilities& initial, Family family,
                   const CovarianceStructure& structure, const FitConfig& cfg) {
  cfg.validate();
  const CovarianceStructure s = effective_structure(family, structure, cfg);
  if (!s.implemented()) {
    throw Unsupported("covariance structure " + s.code() + " is not implemented for fitting");
  }
  const int groups = initial.groups();

  FitResult result;
  result.weight = cfg.weight;
  if (cfg.weight.alpha == 1.0 && data.n_labelled() < groups * (data.dim() + 1)) {
    result.warnings.push_back("under-determined: " + std::to_string(data.n_labelled()) +
                              " labelled rows for " + std::to_string(groups) + " components in " +
                              std::to_string(data.dim()) + " dimensions");
  }

  MixtureModel model = m_step_gaussian(data, initial, s, cfg.weight);
  if (family == Family::StudentT) {
    model.family = Family::StudentT;
    model.dof = Vector::Constant(groups, cfg.initial_dof);
  }
  result.loglik_trace.push_back(weighted_observed_loglik(model, data, cfg.weight));

  std::vector<bool> boundary_reported(static_cast<std::size_t>(groups), false);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const Responsibilities resp = e_step(model, data, cfg.weight);
    if (family == Family::Gaussian) {
      model = m_step_gaussian(data, resp, s, cfg.weight);
    } else {
      CmStepResult cm = cm_steps_t(data, resp, model, cfg);
      model = std::move(cm.model);
      for (int g : cm.nu_at_boundary) boundary_reported[static_cast<std::size_t>(g)] = true;
    }
    result.loglik_trace.push_back(weighted_observed_loglik(model, data, cfg.weight));
    result.n_iterations = iter;
    if (aitken_converged(result.loglik_trace, cfg.aitken_epsilon)) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    result.warnings.push_back("reached max_iterations (" + std::to_string(cfg.max_iterations) + ")");
  }
  for (int g = 0; g < groups; ++g) {
    if (boundary_reported[static_cast<std::size_t>(g)]) {
      result.warnings.push_back("nu for component " + std::to_string(g + 1) +
                                " hit the bracket boundary at least once");
    }
  }

  result.responsibilities = e_step(model, data, cfg.weight);
  result.map_partition = map_partition(result.responsibilities.stacked());
  result.model = std::move(model);
  return result;
}

FitResult fit(const DataSet& data, int groups, Family family, const CovarianceStructure& structure,
              const FitConfig& cfg) {
  cfg.validate();
  if (groups < data.groups()) {
    throw DomainError("fit: " + std::to_string(groups) + " components for " +
                      std::to_string(data.groups()) + " labelled classes");
  }
  const CovarianceStructure s = effective_structure(family, structure, cfg);
  if (!s.implemented()) {
    throw Unsupported("covariance structure " + s.code() + " is not implemented for fitting");
  }
  const DataSet padded = groups > data.groups() ? data.with_groups(groups) : data;

  std::vector<std::string> causes;
  std::optional<FitResult> best;
  for (int chain = 0; chain < cfg.em_starts; ++chain) {
    FitConfig chain_cfg = cfg;
    chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(chain) * static_cast<std::uint64_t>(cfg.n_starts);
    try {
      const Responsibilities init = kmeans_init(padded, groups, chain_cfg);
      FitResult r = fit_from(padded, init, family, s, chain_cfg);
      if (!best || r.final_loglik() > best->final_loglik()) best = std::move(r);
    } catch (const NumericalError& e) {
      causes.emplace_back(e.what());
    }
  }
  if (!best) throw FitFailed(std::move(causes));
  return std::move(*best);
}

}  // namespace fsc
