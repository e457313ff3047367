#include "fsc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fsc {

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

DataSet build_dataset(const LabelledSample& sample, const std::vector<Eigen::Index>& labelled,
                      const std::vector<Eigen::Index>& unlabelled, Split& out) {
  const Eigen::Index p = sample.x.cols();
  Matrix lx(static_cast<Eigen::Index>(labelled.size()), p);
  Matrix ux(static_cast<Eigen::Index>(unlabelled.size()), p);
  std::vector<int> labels;
  out.truth.clear();
  out.source_rows.clear();
  for (std::size_t i = 0; i < labelled.size(); ++i) {
    lx.row(static_cast<Eigen::Index>(i)) = sample.x.row(labelled[i]);
    labels.push_back(sample.truth[static_cast<std::size_t>(labelled[i])]);
    out.truth.push_back(labels.back());
    out.source_rows.push_back(labelled[i]);
  }
  for (std::size_t i = 0; i < unlabelled.size(); ++i) {
    ux.row(static_cast<Eigen::Index>(i)) = sample.x.row(unlabelled[i]);
    out.truth.push_back(sample.truth[static_cast<std::size_t>(unlabelled[i])]);
    out.source_rows.push_back(unlabelled[i]);
  }
  return DataSet::from_labels(lx, labels, sample.groups, ux);
}

LabelledSample draw(const std::vector<ScenarioComponent>& comps, Rng& rng) {
  LabelledSample s;
  s.groups = static_cast<int>(comps.size());
  std::vector<Matrix> blocks;
  Eigen::Index rows = 0;
  for (const auto& c : comps) {
    blocks.push_back(sample(c.distribution, c.count, rng));
    rows += c.count;
  }
  s.x.resize(rows, blocks.front().cols());
  Eigen::Index at = 0;
  for (std::size_t g = 0; g < blocks.size(); ++g) {
    s.x.middleRows(at, blocks[g].rows()) = blocks[g];
    at += blocks[g].rows();
    s.truth.insert(s.truth.end(), static_cast<std::size_t>(blocks[g].rows()), static_cast<int>(g));
  }
  return s;
}

}  // namespace

Scenario Scenario::two_group_t(double delta) { return {ScenarioKind::TwoGroupT, delta, 100, std::nullopt}; }
Scenario Scenario::three_group_t() { return {ScenarioKind::ThreeGroupT, 2.0, 100, std::nullopt}; }
Scenario Scenario::two_group_gaussian(double delta) {
  return {ScenarioKind::TwoGroupGaussian, delta, 150, std::nullopt};
}
Scenario Scenario::from_file(LabelledSample sample) {
  Scenario s{ScenarioKind::FromFile, 0.0, 0, std::move(sample)};
  return s;
}

std::string Scenario::name() const {
  switch (kind) {
    case ScenarioKind::TwoGroupT: return "two-group-t";
    case ScenarioKind::ThreeGroupT: return "three-group-t";
    case ScenarioKind::TwoGroupGaussian: return "two-group-gaussian";
    case ScenarioKind::FromFile: return "file";
  }
  return "?";
}

std::vector<ScenarioComponent> scenario_components(const Scenario& s) {
  const int n = s.n_per_group;
  if (n < 1) throw DomainError("scenario needs at least one row per group");
  const Matrix corr = mat2(1.0, 0.7, 0.7, 1.0);
  const Matrix ident = Matrix::Identity(2, 2);
  switch (s.kind) {
    case ScenarioKind::TwoGroupT:
      return {{StudentTSpec{vec2(0, 0), corr, 3.0}, n}, {StudentTSpec{vec2(0, s.delta), ident, 70.0}, n}};
    case ScenarioKind::ThreeGroupT:
      return {{StudentTSpec{vec2(0, 0), corr, 3.0}, n},
              {StudentTSpec{vec2(0, s.delta), ident, 70.0}, n},
              {StudentTSpec{vec2(2, 2), mat2(1.0, -0.7, -0.7, 1.0), 10.0}, n}};
    case ScenarioKind::TwoGroupGaussian:
      return {{GaussianSpec{vec2(0, 0), corr}, n}, {GaussianSpec{vec2(0, s.delta), ident}, n}};
    case ScenarioKind::FromFile:
      break;
  }
  throw DomainError("file scenarios have no generating distribution");
}

LabelledSample generate(const Scenario& s, Rng& rng) {
  if (s.kind == ScenarioKind::FromFile) {
    if (!s.sample) throw DomainError("file scenario without data");
    return *s.sample;
  }
  return draw(scenario_components(s), rng);
}

Split label_split(const LabelledSample& sample, double percent, Rng& rng) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw DomainError("label_split: percent must lie in [0, 100]");
  const auto n = static_cast<Eigen::Index>(sample.truth.size());
  if (n != sample.x.rows()) throw DimensionError("label_split: truth length differs from row count");
  const auto n1 = static_cast<Eigen::Index>(std::floor(percent * static_cast<double>(n) / 100.0 + 1e-9));

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < n1; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<Eigen::Index> labelled(idx.begin(), idx.begin() + n1);
  std::vector<Eigen::Index> unlabelled(idx.begin() + n1, idx.end());
  std::sort(labelled.begin(), labelled.end());
  std::sort(unlabelled.begin(), unlabelled.end());

  Split out;
  out.data = build_dataset(sample, labelled, unlabelled, out);
  if (n1 > 0) {
    std::vector<bool> seen(static_cast<std::size_t>(sample.groups), false);
    for (Eigen::Index j = 0; j < n1; ++j) seen[static_cast<std::size_t>(out.data.label(j))] = true;
    for (int g = 0; g < sample.groups; ++g) {
      if (!seen[static_cast<std::size_t>(g)]) {
        out.warnings.push_back("class " + std::to_string(g + 1) + " has no labelled rows");
      }
    }
  }
  return out;
}

Split illustrative_case(int which, std::uint64_t seed) {
  Rng rng(seed);
  Split out;
  if (which == 1) {
    // Two vertically stretched clusters side by side. The labelled rows sit
    // near the gap, class 1 above the axis and class 2 below it.
    const Matrix tall = mat2(1.0, 0.0, 0.0, 4.0);
    const LabelledSample s =
        draw({{GaussianSpec{vec2(0, 0), tall}, 150}, {GaussianSpec{vec2(4, 0), tall}, 150}}, rng);
    const Vector gap = vec2(2, 0);
    std::vector<Eigen::Index> labelled;
    for (int g = 0; g < 2; ++g) {
      std::vector<std::pair<double, Eigen::Index>> near;
      for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
        const double y = s.x(i, 1);
        if (s.truth[static_cast<std::size_t>(i)] != g || (g == 0 ? y <= 1.0 : y >= -1.0)) continue;
        near.emplace_back((s.x.row(i).transpose() - gap).norm(), i);
      }
      std::sort(near.begin(), near.end());
      for (std::size_t k = 0; k < 15 && k < near.size(); ++k) labelled.push_back(near[k].second);
    }
    std::sort(labelled.begin(), labelled.end());
    std::vector<Eigen::Index> unlabelled;
    for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
      if (!std::binary_search(labelled.begin(), labelled.end(), i)) unlabelled.push_back(i);
    }
    out.data = build_dataset(s, labelled, unlabelled, out);
    return out;
  }
  if (which == 2) {
    // Well separated clusters; each cluster's core is labelled and its
    // outermost tenth is not.
    const Matrix ident = Matrix::Identity(2, 2);
    const LabelledSample s =
        draw({{GaussianSpec{vec2(0, 0), ident}, 100}, {GaussianSpec{vec2(10, 0), ident}, 100}}, rng);
    std::vector<Eigen::Index> labelled, unlabelled;
    for (int g = 0; g < 2; ++g) {
      const Vector centre = g == 0 ? vec2(0, 0) : vec2(10, 0);
      std::vector<std::pair<double, Eigen::Index>> by_dist;
      for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
        if (s.truth[static_cast<std::size_t>(i)] == g) {
          by_dist.emplace_back((s.x.row(i).transpose() - centre).norm(), i);
        }
      }
      std::sort(by_dist.begin(), by_dist.end());
      const std::size_t core = by_dist.size() * 9 / 10;
      for (std::size_t k = 0; k < by_dist.size(); ++k) {
        (k < core ? labelled : unlabelled).push_back(by_dist[k].second);
      }
    }
    std::sort(labelled.begin(), labelled.end());
    std::sort(unlabelled.begin(), unlabelled.end());
    out.data = build_dataset(s, labelled, unlabelled, out);
    return out;
  }
  throw DomainError("illustrative_case: which must be 1 or 2");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 2) throw DomainError("run_experiment: need at least two replications");
  if (cfg.percents.empty()) throw DomainError("run_experiment: no labelled percentages");
  cfg.grid.validate();
  cfg.fit.validate();

  const std::size_t n_p = cfg.percents.size();
  const std::size_t n_a = cfg.grid.alphas.size();
  const std::size_t tasks = static_cast<std::size_t>(cfg.replications) * n_p;
  ExperimentResult result;
  result.records.resize(tasks * n_a);

  parallel_for(tasks, cfg.selection.threads, [&](std::size_t t) {
    const auto rep = static_cast<int>(t / n_p);
    const std::size_t k = t % n_p;
    const std::uint64_t rep_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    Rng data_rng(rep_seed);
    const LabelledSample sample = generate(cfg.scenario, data_rng);
    Rng split_rng(mix_seed(rep_seed, 1 + k));
    const Split split = label_split(sample, cfg.percents[k], split_rng);

    SelectionOptions opts = cfg.selection;
    opts.threads = 1;
    opts.truth = split.truth;
    opts.keep_fits = cfg.keep_models;
    FitConfig fc = cfg.fit;
    fc.seed = mix_seed(rep_seed, 1000 + k);
    const SelectionReport report =
        weight_grid_search(split.data, sample.groups, cfg.family, cfg.structure, cfg.grid, fc, opts);

    for (std::size_t a = 0; a < n_a; ++a) {
      const FitRecord& fr = report.records[a];
      ReplicationRecord& rr = result.records[t * n_a + a];
      rr.replication = rep;
      rr.percent = cfg.percents[k];
      rr.alpha = fr.alpha;
      rr.seed = rep_seed;
      rr.ok = fr.ok;
      rr.error = fr.error;
      rr.criteria = fr.values;
      rr.ari = fr.value(Criterion::ARI);
      if (cfg.keep_models && fr.fit) rr.model = fr.fit->model;
    }
  });

  summarise(result, cfg.percents, cfg.grid);
  return result;
}

void summarise(ExperimentResult& result, const std::vector<double>& percents, const WeightGrid& grid) {
  result.summaries.clear();
  result.chosen_alpha.clear();
  for (double p : percents) {
    std::optional<CellSummary> best;
    for (double a : grid.alphas) {
      CellSummary cell;
      cell.percent = p;
      cell.alpha = a;
      std::vector<double> values;
      for (const auto& r : result.records) {
        if (r.percent != p || r.alpha != a) continue;
        if (r.ok && !std::isnan(r.ari)) {
          values.push_back(r.ari);
        } else {
          ++cell.n_failed;
        }
      }
      cell.n_ok = static_cast<int>(values.size());
      if (cell.n_ok > 0) {
        cell.mean_ari = pairwise_sum(values.data(), values.size()) / cell.n_ok;
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - cell.mean_ari) * (values[i] - cell.mean_ari);
        cell.sd_ari = cell.n_ok > 1 ? std::sqrt(pairwise_sum(sq.data(), sq.size()) / (cell.n_ok - 1)) : 0.0;
        if (!best || cell.mean_ari > best->mean_ari) best = cell;
      } else {
        cell.mean_ari = std::numeric_limits<double>::quiet_NaN();
        cell.sd_ari = std::numeric_limits<double>::quiet_NaN();
      }
      result.summaries.push_back(cell);
    }
    if (best) result.chosen_alpha.emplace_back(p, best->alpha);
  }
}

}  // namespace fsc
