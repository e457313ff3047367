#include "fsc/selection.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace fsc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw InputError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

double tidy(double v) { return std::round(v * 1e12) / 1e12; }

Partition rows_from(const Partition& p, std::size_t first) {
  return Partition(p.begin() + static_cast<std::ptrdiff_t>(first), p.end());
}

bool better(double candidate, double incumbent, Direction d) {
  return d == Direction::Max ? candidate > incumbent : candidate < incumbent;
}

}  // namespace

WeightGrid WeightGrid::standard() {
  WeightGrid g;
  for (int i = 0; i <= 10; ++i) g.alphas.push_back(i / 10.0);
  return g;
}

WeightGrid WeightGrid::parse(std::string_view spec) {
  WeightGrid g;
  if (spec.find(':') != std::string_view::npos) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw InputError("grid must look like a:b:step");
    const double a = parse_double(spec.substr(0, c1));
    const double b = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_double(spec.substr(c2 + 1));
    if (!(step > 0.0) || b < a) throw InputError("grid needs a <= b and a positive step");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) g.alphas.push_back(tidy(a + static_cast<double>(i) * step));
  } else {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const auto comma = spec.find(',', start);
      const auto piece = spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start);
      g.alphas.push_back(parse_double(piece));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  g.validate();
  return g;
}

void WeightGrid::validate() const {
  if (alphas.empty()) throw DomainError("weight grid is empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0 && alphas[i] <= 1.0)) throw DomainError("weight grid values must lie in [0, 1]");
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw DomainError("weight grid must be sorted and unique");
  }
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::BIC: return "BIC";
    case Criterion::ICL: return "ICL";
    case Criterion::E: return "E";
    case Criterion::A: return "A";
    case Criterion::U: return "U";
    case Criterion::TraceW: return "trW";
    case Criterion::DetW: return "detW";
    case Criterion::ARI: return "ARI";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (to_string(c) == name) return c;
  }
  throw InputError("unknown criterion '" + std::string(name) + "' (BIC, ICL, E, A, U, trW, detW, ARI)");
}

PointSet parse_point_set(std::string_view name) {
  if (name == "all") return PointSet::All;
  if (name == "unlabelled") return PointSet::Unlabelled;
  throw InputError("point set must be 'all' or 'unlabelled', got '" + std::string(name) + "'");
}

std::string_view to_string(PointSet p) { return p == PointSet::All ? "all" : "unlabelled"; }

Direction direction(Criterion c, const SelectionOptions& opts) {
  switch (c) {
    case Criterion::TraceW:
    case Criterion::DetW: return Direction::Min;
    case Criterion::U: return opts.u_direction;
    default: return Direction::Max;
  }
}

std::uint64_t alpha_seed(std::uint64_t seed, double alpha) {
  const double tenths = alpha * 10.0;
  std::uint64_t index;
  if (std::abs(tenths - std::round(tenths)) < 1e-9) {
    index = static_cast<std::uint64_t>(std::llround(tenths));
  } else {
    index = 11 + static_cast<std::uint64_t>(std::llround(alpha * 1e6));
  }
  return seed + 1000 * index;
}

std::string FitRecord::model_code() const { return std::to_string(groups) + ":" + structure.code(); }

std::optional<std::size_t> select_extremum(const std::vector<FitRecord>& records,
                                           const std::vector<std::size_t>& candidates, Criterion c,
                                           const SelectionOptions& opts) {
  const Direction d = direction(c, opts);
  std::optional<std::size_t> best;
  for (std::size_t i : candidates) {
    const FitRecord& r = records[i];
    const double v = r.value(c);
    if (!r.ok || std::isnan(v)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const FitRecord& b = records[*best];
    const double bv = b.value(c);
    if (better(v, bv, d) || (v == bv && r.alpha < b.alpha)) best = i;
  }
  return best;
}

void reselect(SelectionReport& report, const SelectionOptions& opts) {
  for (Criterion c : kAllCriteria) {
    report.chosen[static_cast<std::size_t>(c)] = select_extremum(report.records, report.candidates, c, opts);
  }
  report.final_choice = report.chosen[static_cast<std::size_t>(report.weight_criterion)];
}

FitRecord evaluate_fit(const DataSet& data, int groups, Family family,
                       const CovarianceStructure& structure, const FitConfig& cfg,
                       const SelectionOptions& opts) {
  FitRecord r;
  r.alpha = cfg.weight.alpha;
  r.groups = groups;
  r.structure = structure;
  if (family == Family::StudentT && cfg.constrain_nu) r.structure.dof = Constraint::Constrained;
  r.values.fill(kNaN);
  r.param_count = model_param_count(r.structure, family, groups, static_cast<int>(data.dim()));

  FitResult f;
  try {
    f = fit(data, groups, family, structure, cfg);
  } catch (const NumericalError& e) {
    r.error = e.what();
    return r;
  }
  const DataSet padded = groups > data.groups() ? data.with_groups(groups) : data;
  r.ok = true;
  r.converged = f.converged;
  r.n_iterations = f.n_iterations;
  r.loglik = f.final_loglik();
  r.warnings = f.warnings;

  auto set = [&r](Criterion c, double v) { r.values[static_cast<std::size_t>(c)] = v; };
  set(Criterion::BIC, information_criterion(InformationKind::BIC, f, padded, r.param_count));
  set(Criterion::ICL, information_criterion(InformationKind::ICL, f, padded, r.param_count));
  set(Criterion::E, classification_criterion(ClassificationKind::E, f.responsibilities.unlabelled));
  set(Criterion::A, classification_criterion(ClassificationKind::A, f.responsibilities.unlabelled));
  set(Criterion::U, classification_criterion(ClassificationKind::U, f.responsibilities.unlabelled));

  const auto n1 = static_cast<std::size_t>(data.n_labelled());
  const Partition full = labelled_partition(f, padded);
  if (opts.scatter_points == PointSet::All) {
    const ScatterDecomposition d = scatter_decomposition(data.x(), full, groups);
    set(Criterion::TraceW, scatter_criterion(ScatterKind::TraceW, d));
    set(Criterion::DetW, scatter_criterion(ScatterKind::DetW, d));
  } else if (data.n_unlabelled() > 0) {
    const ScatterDecomposition d = scatter_decomposition(data.unlabelled_x(), rows_from(full, n1), groups);
    set(Criterion::TraceW, scatter_criterion(ScatterKind::TraceW, d));
    set(Criterion::DetW, scatter_criterion(ScatterKind::DetW, d));
  }

  r.partition = scoring_partition(f, padded);
  if (opts.truth) {
    if (opts.truth->size() != r.partition.size()) throw DimensionError("truth has the wrong length");
    if (opts.ari_points == PointSet::All) {
      set(Criterion::ARI, ari(r.partition, *opts.truth));
    } else if (data.n_unlabelled() > 0) {
      set(Criterion::ARI, ari(rows_from(r.partition, n1), rows_from(*opts.truth, n1)));
    }
  }
  if (opts.keep_fits) r.fit = std::move(f);
  return r;
}

namespace {

struct Cell {
  double alpha;
  int groups;
  CovarianceStructure structure;
};

std::vector<FitRecord> run_cells(const DataSet& data, const std::vector<Cell>& cells, Family family,
                                 const FitConfig& cfg, const SelectionOptions& opts) {
  std::vector<FitRecord> records(cells.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    FitConfig c = cfg;
    c.weight.alpha = cells[i].alpha;
    c.seed = alpha_seed(cfg.seed, cells[i].alpha);
    records[i] = evaluate_fit(data, cells[i].groups, family, cells[i].structure, c, opts);
  });
  return records;
}

}  // namespace

SelectionReport weight_grid_search(const DataSet& data, int groups, Family family,
                                   const CovarianceStructure& structure, const WeightGrid& grid,
                                   const FitConfig& cfg, const SelectionOptions& opts) {
  grid.validate();
  std::vector<Cell> cells;
  for (double a : grid.alphas) cells.push_back({a, groups, structure});
  SelectionReport report;
  report.records = run_cells(data, cells, family, cfg, opts);
  for (std::size_t i = 0; i < report.records.size(); ++i) report.candidates.push_back(i);
  reselect(report, opts);
  return report;
}

SelectionReport select_model_then_weight(int procedure, const DataSet& data,
                                         const std::vector<int>& group_range,
                                         const std::vector<CovarianceStructure>& structures,
                                         Family family, const WeightGrid& grid, const FitConfig& cfg,
                                         const SelectionOptions& opts, Criterion weight_criterion) {
  if (procedure != 1 && procedure != 2) throw DomainError("procedure must be 1 or 2");
  if (structures.empty() || group_range.empty()) throw DomainError("empty model set");
  for (const auto& s : structures) {
    if (!s.implemented()) throw Unsupported("covariance structure " + s.code() + " is not implemented");
  }
  grid.validate();

  // Cells ordered by α, then G, then structure.
  std::vector<Cell> cells;
  for (double a : grid.alphas) {
    for (int g : group_range) {
      for (const auto& s : structures) cells.push_back({a, g, s});
    }
  }
  SelectionReport report;
  report.procedure = procedure;
  report.weight_criterion = weight_criterion;
  report.records = run_cells(data, cells, family, cfg, opts);

  const std::size_t per_alpha = group_range.size() * structures.size();
  if (procedure == 1) {
    for (std::size_t k = 0; k < grid.alphas.size(); ++k) {
      std::vector<std::size_t> block(per_alpha);
      for (std::size_t m = 0; m < per_alpha; ++m) block[m] = k * per_alpha + m;
      if (auto w = select_extremum(report.records, block, Criterion::BIC, opts)) report.candidates.push_back(*w);
    }
  } else {
    std::vector<std::size_t> all(report.records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (auto best = select_extremum(report.records, all, weight_criterion, opts)) {
      const std::size_t model = *best % per_alpha;
      for (std::size_t k = 0; k < grid.alphas.size(); ++k) report.candidates.push_back(k * per_alpha + model);
    }
  }
  reselect(report, opts);
  return report;
}

GroupCountResult select_num_groups(const DataSet& data, const std::vector<int>& range, Family family,
                                   const CovarianceStructure& structure, const FitConfig& cfg,
                                   InformationKind kind, const SelectionOptions& opts) {
  if (range.empty()) throw DomainError("select_num_groups: empty range");
  for (int h : range) {
    if (h < data.groups()) {
      throw DomainError("select_num_groups: H = " + std::to_string(h) + " is below the " +
                        std::to_string(data.groups()) + " labelled classes");
    }
  }
  GroupCountResult out;
  out.kind = kind;
  std::vector<Cell> cells;
  for (int h : range) cells.push_back({cfg.weight.alpha, h, structure});
  FitConfig c = cfg;
  out.records.resize(cells.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    out.records[i] = evaluate_fit(data, cells[i].groups, family, structure, c, opts);
  });
  const Criterion crit = kind == InformationKind::BIC ? Criterion::BIC : Criterion::ICL;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const FitRecord& r = out.records[i];
    if (!r.ok) continue;
    if (!best || r.value(crit) > out.records[*best].value(crit)) best = i;
  }
  if (!best) {
    std::vector<std::string> causes;
    for (const auto& r : out.records) causes.push_back("H=" + std::to_string(r.groups) + ": " + r.error);
    throw FitFailed(std::move(causes));
  }
  out.chosen = out.records[*best].groups;
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fsc
