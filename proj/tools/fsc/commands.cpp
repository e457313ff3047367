#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>

#include "fsc/io.hpp"
#include "fsc/simulation.hpp"
#include "svg.hpp"

namespace fsc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("FSC_SEED"); env && *env) {
    const std::string s(env);
    std::size_t used = 0;
    try {
      const unsigned long long v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("FSC_SEED is not an unsigned integer: '" + s + "'");
  }
  return 1;
}

Family parse_family(const std::string& s) { return s == "gaussian" ? Family::Gaussian : Family::StudentT; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& piece : split_list(s)) {
    const double v = parse_double(piece);
    if (v != static_cast<int>(v) || v < 1) throw InputError("expected positive integers, got '" + piece + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> parse_percents(const std::string& s) {
  std::vector<double> out;
  for (const auto& piece : split_list(s)) {
    const double v = parse_double(piece);
    if (!(v >= 0.0 && v <= 100.0)) throw InputError("labelled percentage must lie in [0, 100], got '" + piece + "'");
    out.push_back(v);
  }
  return out;
}

FitConfig fit_config(const Options& o, std::uint64_t seed) {
  FitConfig cfg;
  cfg.n_starts = o.n_starts;
  cfg.em_starts = o.em_starts;
  cfg.max_iterations = o.max_iterations;
  cfg.constrain_nu = o.constrain_nu;
  cfg.weight.alpha = o.alpha.value_or(0.5);
  cfg.weight.variant = o.variant == "alt" ? LikelihoodVariant::Alternative : LikelihoodVariant::Original;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

SelectionOptions selection_options(const Options& o) {
  SelectionOptions s;
  s.u_direction = o.u_direction == "min" ? Direction::Min : Direction::Max;
  s.scatter_points = parse_point_set(o.scatter_points);
  s.ari_points = parse_point_set(o.ari_points);
  s.threads = o.threads;
  return s;
}

WeightGrid weight_grid(const Options& o) {
  if (o.alpha) {
    WeightGrid g{{*o.alpha}};
    g.validate();
    return g;
  }
  return WeightGrid::parse(o.grid);
}

json options_json(const Options& o, std::uint64_t seed) {
  json j;
  j["data"] = o.data;
  j["label_col"] = o.label_col;
  j["family"] = o.family;
  j["structure"] = o.structure;
  j["structures"] = o.structures;
  j["alpha"] = o.alpha ? json(*o.alpha) : json(nullptr);
  j["grid"] = o.grid;
  j["variant"] = o.variant;
  j["criterion"] = o.criterion;
  j["procedure"] = o.procedure;
  j["p"] = o.percents;
  j["splits"] = o.splits;
  j["reps"] = o.reps;
  j["seed"] = seed;
  j["threads"] = o.threads;
  j["constrain_nu"] = o.constrain_nu;
  j["scatter_points"] = o.scatter_points;
  j["ari_points"] = o.ari_points;
  j["u_direction"] = o.u_direction;
  j["unlabel_frac"] = o.unlabel_frac ? json(*o.unlabel_frac) : json(nullptr);
  j["groups"] = o.groups;
  j["scenario"] = o.scenario;
  j["delta"] = o.delta;
  j["n_starts"] = o.n_starts;
  j["em_starts"] = o.em_starts;
  j["max_iterations"] = o.max_iterations;
  return j;
}

class Manifest {
 public:
  Manifest(std::string command, const Options& o, std::uint64_t seed)
      : started_(utc_now()), out_(o.out) {
    j_["command"] = std::move(command);
    j_["command_line"] = o.command_line;
    j_["config"] = options_json(o, seed);
    j_["seed"] = seed;
    j_["version"] = FSC_VERSION;
    j_["inputs"] = json::object();
    j_["warnings"] = json::array();
    if (!o.data.empty()) add_input(o.data);
  }

  void add_input(const std::string& path) { j_["inputs"][path] = "fnv1a64:" + fnv1a_digest(path); }
  void add_output(const std::string& name) { j_["outputs"].push_back(name); }
  void warn(const std::string& message) {
    std::cerr << "fsc: warning: " << message << '\n';
    j_["warnings"].push_back(message);
  }

  void write() {
    j_["started_at"] = started_;
    j_["finished_at"] = utc_now();
    write_json(out_ / "manifest.json", j_);
  }

 private:
  json j_;
  std::string started_;
  fs::path out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::vector<std::string> criterion_header() {
  std::vector<std::string> h;
  for (Criterion c : kAllCriteria) h.emplace_back(to_string(c));
  return h;
}

void append_values(std::vector<std::string>& row, const std::array<double, kCriterionCount>& values) {
  for (double v : values) row.push_back(format_double(v));
}

const char* family_name(Family f) { return f == Family::Gaussian ? "gaussian" : "t"; }

std::string format_score(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEN") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

int run_fit(const Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  fs::create_directories(o.out);
  Manifest manifest("fit", o, seed);

  const LabelledTable table = read_labelled_csv(o.data, o.label_col);
  DataSet data;
  std::vector<Eigen::Index> source_rows;
  SelectionOptions opts = selection_options(o);
  if (o.unlabel_frac) {
    if (!(*o.unlabel_frac >= 0.0 && *o.unlabel_frac <= 1.0)) throw InputError("--unlabel-frac must lie in [0, 1]");
    const LabelledSample sample = to_sample(table);
    Rng rng(mix_seed(seed, 0));
    Split split = label_split(sample, 100.0 * (1.0 - *o.unlabel_frac), rng);
    for (const auto& w : split.warnings) manifest.warn(w);
    data = std::move(split.data);
    source_rows = std::move(split.source_rows);
    opts.truth = std::move(split.truth);
  } else {
    data = to_dataset(table, &source_rows);
  }

  int groups = data.groups();
  if (!o.groups.empty()) {
    const auto g = parse_int_list(o.groups);
    if (g.size() != 1) throw InputError("fit takes a single --groups value");
    groups = g.front();
  } else if (table.class_names.empty()) {
    throw InputError("no labelled rows; pass --groups");
  }

  const Family family = parse_family(o.family);
  const CovarianceStructure structure = CovarianceStructure::parse(o.structure);
  const FitConfig cfg = fit_config(o, seed);
  FitRecord r = evaluate_fit(data, groups, family, structure, cfg, opts);
  if (!r.ok) {
    std::cerr << "fsc: numerical failure: " << r.error << '\n';
    manifest.write();
    return kExitNumerical;
  }
  for (const auto& w : r.warnings) manifest.warn(w);
  const FitResult& f = *r.fit;

  write_json(fs::path(o.out) / "model.json", model_to_json(f.model, f.weight));
  manifest.add_output("model.json");

  std::vector<std::string> header{"row", "labelled"};
  for (int g = 1; g <= groups; ++g) header.push_back("z" + std::to_string(g));
  if (family == Family::StudentT) {
    for (int g = 1; g <= groups; ++g) header.push_back("w" + std::to_string(g));
  }
  header.push_back("map");
  const Matrix z = f.responsibilities.stacked();
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    std::vector<std::string> row{std::to_string(source_rows[static_cast<std::size_t>(i)] + 1),
                                 i < data.n_labelled() ? "1" : "0"};
    for (int g = 0; g < groups; ++g) row.push_back(format_double(z(i, g)));
    if (family == Family::StudentT) {
      for (int g = 0; g < groups; ++g) row.push_back(format_double(f.responsibilities.scale(i, g)));
    }
    row.push_back(std::to_string(r.partition[static_cast<std::size_t>(i)] + 1));
    rows.push_back(std::move(row));
  }
  write_csv(fs::path(o.out) / "responsibilities.csv", header, rows);
  manifest.add_output("responsibilities.csv");

  std::vector<std::vector<std::string>> crit;
  for (Criterion c : kAllCriteria) crit.push_back({std::string(to_string(c)), format_double(r.value(c))});
  crit.push_back({"loglik", format_double(r.loglik)});
  crit.push_back({"params", std::to_string(r.param_count)});
  crit.push_back({"iterations", std::to_string(r.n_iterations)});
  crit.push_back({"converged", r.converged ? "1" : "0"});
  write_csv(fs::path(o.out) / "criteria.csv", {"criterion", "value"}, crit);
  manifest.add_output("criteria.csv");
  manifest.write();

  std::cout << "fit " << family_name(family) << " " << r.structure.code() << " G=" << groups
            << " alpha=" << format_double(r.alpha) << " loglik=" << format_double(r.loglik)
            << " iterations=" << r.n_iterations << (r.converged ? "" : " (not converged)") << '\n';
  return kExitOk;
}

int run_select(const Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  fs::create_directories(o.out);
  Manifest manifest("select", o, seed);

  const LabelledTable table = read_labelled_csv(o.data, o.label_col);
  const Family family = parse_family(o.family);
  const WeightGrid grid = weight_grid(o);
  const Criterion final_criterion = parse_criterion(o.criterion);
  const SelectionOptions base_opts = selection_options(o);
  FitConfig cfg = fit_config(o, seed);

  std::vector<CovarianceStructure> structures;
  if (o.procedure == 0) {
    structures.push_back(CovarianceStructure::parse(o.structure));
  } else if (o.structures.empty() || o.structures == "all") {
    structures = implemented_structures();
  } else {
    for (const auto& code : split_list(o.structures)) structures.push_back(CovarianceStructure::parse(code));
  }

  struct Run {
    SelectionReport report;
    bool has_truth = false;
  };
  std::vector<Run> runs;

  auto run_once = [&](const DataSet& data, std::optional<Partition> truth, std::uint64_t fit_seed) {
    SelectionOptions opts = base_opts;
    opts.truth = std::move(truth);
    FitConfig c = cfg;
    c.seed = fit_seed;
    std::vector<int> groups = o.groups.empty() ? std::vector<int>{data.groups()} : parse_int_list(o.groups);
    Run run;
    run.has_truth = opts.truth.has_value();
    if (o.procedure == 0) {
      if (groups.size() != 1) throw InputError("a fixed-model search takes a single --groups value");
      run.report = weight_grid_search(data, groups.front(), family, structures.front(), grid, c, opts);
      run.report.weight_criterion = final_criterion;
      reselect(run.report, opts);
    } else {
      run.report = select_model_then_weight(o.procedure, data, groups, structures, family, grid, c, opts,
                                            final_criterion);
    }
    runs.push_back(std::move(run));
  };

  if (!o.percents.empty()) {
    const auto p = parse_percents(o.percents);
    if (p.size() != 1) throw InputError("select takes a single --p value");
    if (o.splits < 1) throw InputError("--splits must be >= 1");
    const LabelledSample sample = to_sample(table);
    for (int s = 0; s < o.splits; ++s) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
      Split split = label_split(sample, p.front(), rng);
      for (const auto& w : split.warnings) manifest.warn("split " + std::to_string(s + 1) + ": " + w);
      run_once(split.data, std::move(split.truth), mix_seed(seed, 1000 + static_cast<std::uint64_t>(s)));
    }
  } else {
    if (table.class_names.empty() && o.groups.empty()) throw InputError("no labelled rows; pass --groups");
    run_once(to_dataset(table), std::nullopt, seed);
  }

  std::vector<std::string> header{"split", "alpha", "groups", "structure", "candidate", "ok", "converged",
                                  "iterations", "loglik", "params"};
  for (const auto& h : criterion_header()) header.push_back(h);
  header.push_back("error");
  header.push_back("warnings");
  std::vector<std::vector<std::string>> rows;
  json summary;
  summary["procedure"] = o.procedure;
  summary["criterion"] = o.criterion;
  summary["splits"] = json::array();

  std::vector<plot::BoxGroup> boxes;
  for (Criterion c : kAllCriteria) {
    if (c != Criterion::ARI) boxes.push_back({std::string(to_string(c)), {}});
  }
  boxes.push_back({"best", {}});

  for (std::size_t s = 0; s < runs.size(); ++s) {
    const SelectionReport& rep = runs[s].report;
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      const FitRecord& r = rep.records[i];
      const bool candidate = std::find(rep.candidates.begin(), rep.candidates.end(), i) != rep.candidates.end();
      std::vector<std::string> row{std::to_string(s + 1), format_double(r.alpha), std::to_string(r.groups),
                                   r.structure.code(), candidate ? "1" : "0", r.ok ? "1" : "0",
                                   r.converged ? "1" : "0", std::to_string(r.n_iterations),
                                   r.ok ? format_double(r.loglik) : "NA", std::to_string(r.param_count)};
      append_values(row, r.values);
      row.push_back(r.error);
      std::string warnings;
      for (const auto& w : r.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
      row.push_back(std::move(warnings));
      rows.push_back(std::move(row));
    }

    json js;
    js["split"] = s + 1;
    js["chosen"] = json::object();
    std::size_t box = 0;
    for (Criterion c : kAllCriteria) {
      const auto& pick = rep.chosen[static_cast<std::size_t>(c)];
      if (!pick) {
        js["chosen"][std::string(to_string(c))] = nullptr;
      } else {
        const FitRecord& r = rep.records[*pick];
        js["chosen"][std::string(to_string(c))] = {{"alpha", r.alpha},
                                                   {"groups", r.groups},
                                                   {"structure", r.structure.code()},
                                                   {"value", r.value(c)},
                                                   {"ARI", runs[s].has_truth ? json(r.value(Criterion::ARI)) : json(nullptr)}};
      }
      if (c != Criterion::ARI) {
        if (pick && runs[s].has_truth) boxes[box].values.push_back(rep.records[*pick].value(Criterion::ARI));
        ++box;
      }
    }
    if (runs[s].has_truth) {
      if (const auto& best = rep.chosen[static_cast<std::size_t>(Criterion::ARI)]) {
        js["best_ari"] = rep.records[*best].value(Criterion::ARI);
        boxes.back().values.push_back(rep.records[*best].value(Criterion::ARI));
      }
    }
    if (rep.final_choice) {
      const FitRecord& r = rep.records[*rep.final_choice];
      js["final"] = {{"criterion", o.criterion}, {"alpha", r.alpha}, {"groups", r.groups},
                     {"structure", r.structure.code()}};
      std::cout << "split " << s + 1 << ": " << o.criterion << " chose alpha=" << format_double(r.alpha)
                << " model=" << r.model_code();
      if (runs[s].has_truth) std::cout << " ARI=" << format_double(r.value(Criterion::ARI));
      std::cout << '\n';
    } else {
      js["final"] = nullptr;
      std::cout << "split " << s + 1 << ": no successful fit\n";
    }
    summary["splits"].push_back(js);
  }
  write_csv(fs::path(o.out) / "selection.csv", header, rows);
  write_json(fs::path(o.out) / "selection.json", summary);
  manifest.add_output("selection.csv");
  manifest.add_output("selection.json");

  const bool any_truth = std::any_of(runs.begin(), runs.end(), [](const Run& r) { return r.has_truth; });
  if (o.plots && any_truth) {
    plot::BoxChart chart{"ARI at the weight chosen by each criterion", "ARI", boxes};
    write_text(fs::path(o.out) / "criteria_ari.svg", plot::render(chart));
    manifest.add_output("criteria_ari.svg");
  }
  manifest.write();
  return kExitOk;
}

int run_simulate(const Options& o) {
  const std::uint64_t seed = resolve_seed(o);
  fs::create_directories(o.out);
  Manifest manifest("simulate", o, seed);

  ExperimentConfig cfg;
  if (o.scenario == "two-group-t") {
    cfg.scenario = Scenario::two_group_t(o.delta);
  } else if (o.scenario == "three-group-t") {
    cfg.scenario = Scenario::three_group_t();
  } else if (o.scenario == "two-group-gaussian") {
    cfg.scenario = Scenario::two_group_gaussian(o.delta);
  } else {
    if (o.data.empty()) throw InputError("--scenario file needs --data");
    cfg.scenario = Scenario::from_file(to_sample(read_labelled_csv(o.data, o.label_col)));
  }
  cfg.percents = o.percents.empty() ? std::vector<double>{10, 20, 30, 40, 50, 60, 70, 80, 90}
                                    : parse_percents(o.percents);
  cfg.grid = weight_grid(o);
  cfg.replications = o.reps;
  cfg.family = parse_family(o.family);
  cfg.structure = CovarianceStructure::parse(o.structure);
  cfg.fit = fit_config(o, seed);
  cfg.selection = selection_options(o);
  cfg.seed = seed;

  const ExperimentResult result = run_experiment(cfg);

  std::vector<std::string> header{"replication", "percent", "alpha", "seed", "ok", "ari"};
  for (Criterion c : kAllCriteria) {
    if (c != Criterion::ARI) header.emplace_back(to_string(c));
  }
  header.push_back("error");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : result.records) {
    std::vector<std::string> row{std::to_string(r.replication + 1), format_double(r.percent),
                                 format_double(r.alpha), std::to_string(r.seed), r.ok ? "1" : "0",
                                 format_double(r.ari)};
    for (Criterion c : kAllCriteria) {
      if (c != Criterion::ARI) row.push_back(format_double(r.criteria[static_cast<std::size_t>(c)]));
    }
    row.push_back(r.error);
    rows.push_back(std::move(row));
  }
  write_csv(fs::path(o.out) / "results.csv", header, rows);
  manifest.add_output("results.csv");

  json summary;
  summary["scenario"] = cfg.scenario.name();
  summary["delta"] = cfg.scenario.delta;
  summary["replications"] = cfg.replications;
  summary["cells"] = json::array();
  for (const auto& c : result.summaries) {
    summary["cells"].push_back({{"percent", c.percent},
                                {"alpha", c.alpha},
                                {"mean_ari", std::isnan(c.mean_ari) ? json(nullptr) : json(c.mean_ari)},
                                {"sd_ari", std::isnan(c.sd_ari) ? json(nullptr) : json(c.sd_ari)},
                                {"n_ok", c.n_ok},
                                {"n_failed", c.n_failed}});
  }
  summary["chosen_alpha"] = json::array();
  for (const auto& [p, a] : result.chosen_alpha) summary["chosen_alpha"].push_back({{"percent", p}, {"alpha", a}});
  write_json(fs::path(o.out) / "summary.json", summary);
  manifest.add_output("summary.json");

  if (o.plots) {
    plot::LineChart chart{"Mean ARI by labelled percentage (" + cfg.scenario.name() + ")", "% labelled",
                          "mean ARI", {}, {}};
    for (double a : cfg.grid.alphas) {
      plot::Series s{"alpha=" + format_double(a), {}, {}};
      for (const auto& c : result.summaries) {
        if (c.alpha != a) continue;
        s.x.push_back(c.percent);
        s.y.push_back(c.mean_ari);
      }
      chart.series.push_back(std::move(s));
    }
    plot::Band one{{}, {}, {}, 0.35}, two{{}, {}, {}, 0.15};
    for (const auto& [p, a] : result.chosen_alpha) {
      for (const auto& c : result.summaries) {
        if (c.percent != p || c.alpha != a) continue;
        for (auto [band, k] : {std::pair{&one, 1.0}, std::pair{&two, 2.0}}) {
          band->x.push_back(p);
          band->lower.push_back(c.mean_ari - k * c.sd_ari);
          band->upper.push_back(c.mean_ari + k * c.sd_ari);
        }
      }
    }
    chart.bands = {two, one};
    write_text(fs::path(o.out) / "ari_by_percent.svg", plot::render(chart));
    manifest.add_output("ari_by_percent.svg");
  }
  manifest.write();

  for (const auto& [p, a] : result.chosen_alpha) {
    std::cout << "p=" << format_double(p) << "%: best mean ARI at alpha=" << format_double(a) << '\n';
  }
  return kExitOk;
}

int run_ari(const Options& o) {
  const Partition a = read_partition_csv(o.part_a);
  const Partition b = read_partition_csv(o.part_b);
  std::cout << format_score(ari(a, b)) << '\n';
  return kExitOk;
}

}  // namespace fsc::cli
