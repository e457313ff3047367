#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fsc/errors.hpp"

namespace {

using fsc::cli::Options;

void data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "Input CSV");
  cmd->add_option("--label-col", o.label_col, "Label column name or 1-based index; empty/NA cells are unlabelled");
}

void model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "gaussian or t")->check(CLI::IsMember({"gaussian", "t"}))->capture_default_str();
  cmd->add_option("--structure", o.structure, "Covariance structure code")->capture_default_str();
  cmd->add_option("--variant", o.variant, "Likelihood variant")
      ->check(CLI::IsMember({"original", "alt"}))
      ->capture_default_str();
  cmd->add_flag("--constrain-nu", o.constrain_nu, "Share one degrees-of-freedom value across components");
  cmd->add_option("--n-starts", o.n_starts, "k-means restarts per initialisation")->capture_default_str();
  cmd->add_option("--em-starts", o.em_starts, "Independent EM chains")->capture_default_str();
  cmd->add_option("--max-iter", o.max_iterations, "EM iteration cap")->capture_default_str();
}

void run_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Master seed (falls back to FSC_SEED, then 1)");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = logical cores)")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void selection_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--grid", o.grid, "Weight grid a:b:step or comma list")->capture_default_str();
  cmd->add_option("--scatter-points", o.scatter_points, "Rows entering W")
      ->check(CLI::IsMember({"all", "unlabelled"}))
      ->capture_default_str();
  cmd->add_option("--ari-points", o.ari_points, "Rows scored by ARI")
      ->check(CLI::IsMember({"all", "unlabelled"}))
      ->capture_default_str();
  cmd->add_option("--u-direction", o.u_direction, "Whether U is maximised or minimised")
      ->check(CLI::IsMember({"max", "min"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 0; i < argc; ++i) o.command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Fractionally supervised classification with Gaussian and t mixtures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FSC_VERSION);

  auto* fit = app.add_subcommand("fit", "Fit one model at one weight");
  data_flags(fit, o);
  model_flags(fit, o);
  run_flags(fit, o);
  fit->add_option("--alpha", o.alpha, "Labelled weight in [0, 1] (default 0.5)");
  fit->add_option("--groups", o.groups, "Number of components (default: number of classes)");
  fit->add_option("--unlabel-frac", o.unlabel_frac, "Hide labels of this fraction of rows (fully labelled input)");
  fit->add_option("--grid", o.grid, "Unused by fit; accepted for symmetry");
  fit->get_option("--data")->required();

  auto* select = app.add_subcommand("select", "Weight selection over a grid");
  data_flags(select, o);
  model_flags(select, o);
  run_flags(select, o);
  selection_flags(select, o);
  select->add_option("--alpha", o.alpha, "Single weight instead of a grid");
  select->add_option("--criterion", o.criterion, "Criterion that picks the final weight")
      ->check(CLI::IsMember({"BIC", "ICL", "E", "A", "U", "trW", "detW", "ARI"}))
      ->capture_default_str();
  select->add_option("--procedure", o.procedure, "0 = fixed model, 1 = model by BIC per weight, 2 = model by criterion")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  select->add_option("--structures", o.structures, "Comma list of structure codes for procedures 1/2 (default: all implemented)");
  select->add_option("--groups", o.groups, "Comma list of component counts (default: number of classes)");
  select->add_option("--p", o.percents, "Labelled percentage for random splits (fully labelled input)");
  select->add_option("--splits", o.splits, "Random splits when --p is given")->capture_default_str();
  select->add_flag("!--no-plots", o.plots, "Skip SVG output");
  select->get_option("--data")->required();

  auto* simulate = app.add_subcommand("simulate", "Replicated simulation over labelled percentages and weights");
  data_flags(simulate, o);
  model_flags(simulate, o);
  run_flags(simulate, o);
  selection_flags(simulate, o);
  simulate->add_option("--scenario", o.scenario, "two-group-t, three-group-t, two-group-gaussian or file")
      ->check(CLI::IsMember({"two-group-t", "three-group-t", "two-group-gaussian", "file"}))
      ->capture_default_str();
  simulate->add_option("--delta", o.delta, "Mean separation")->capture_default_str();
  simulate->add_option("--reps", o.reps, "Replications")->capture_default_str();
  simulate->add_option("--p", o.percents, "Comma list of labelled percentages (default 10,20,...,90)");
  simulate->add_flag("!--no-plots", o.plots, "Skip SVG output");

  auto* ari = app.add_subcommand("ari", "Adjusted Rand index of two partition files");
  ari->add_option("--a", o.part_a, "First partition CSV")->required();
  ari->add_option("--b", o.part_b, "Second partition CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fsc::cli::kExitOk : fsc::cli::kExitUsage;
  }
  if (o.threads <= 0) o.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  try {
    if (fit->parsed()) return fsc::cli::run_fit(o);
    if (select->parsed()) return fsc::cli::run_select(o);
    if (simulate->parsed()) return fsc::cli::run_simulate(o);
    if (ari->parsed()) return fsc::cli::run_ari(o);
  } catch (const fsc::NumericalError& e) {
    std::cerr << "fsc: numerical failure: " << e.what() << '\n';
    return fsc::cli::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "fsc: " << e.what() << '\n';
    return fsc::cli::kExitUsage;
  }
  return fsc::cli::kExitUsage;
}
