#pragma once

#include <string>
#include <vector>

namespace fsc::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Shaded band around a series; one lower/upper value per x.
struct Band {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  double opacity = 0.2;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Band> bands;
};

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

struct BoxChart {
  std::string title;
  std::string y_label;
  std::vector<BoxGroup> groups;
};

std::string render(const LineChart& chart);
std::string render(const BoxChart& chart);

}  // namespace fsc::plot
