#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

struct Options {
  std::string command_line;

  std::string data;
  std::string label_col;
  std::string family = "t";
  std::string structure = "UUUU";
  std::string structures;
  std::optional<double> alpha;
  std::string grid = "0:1:0.1";
  std::string variant = "original";
  std::string criterion = "detW";
  int procedure = 0;
  std::string percents;
  int splits = 1;
  int reps = 30;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
  bool constrain_nu = false;
  std::string scatter_points = "all";
  std::string ari_points = "all";
  std::string u_direction = "max";

  std::optional<double> unlabel_frac;
  std::string groups;
  std::string scenario = "two-group-t";
  double delta = 3.0;
  int n_starts = 50;
  int em_starts = 1;
  int max_iterations = 1000;
  bool plots = true;

  std::string part_a;
  std::string part_b;
};

int run_fit(const Options& o);
int run_select(const Options& o);
int run_simulate(const Options& o);
int run_ari(const Options& o);

}  // namespace fsc::cli
