#include "svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace fsc::plot {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 64;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 56;

constexpr std::array<const char*, 11> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf", "#000000"};

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), end);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x1 == x0 ? 0.5 : (x - x0) / (x1 - x0)) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y1 == y0 ? 0.5 : (y - y0) / (y1 - y0)) * (kHeight - kTop - kBottom);
  }
};

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title) + "</text>\n";
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label,
                 const std::vector<double>& x_ticks) {
  std::string s;
  const double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(right) + "\" y2=\"" +
       num(bottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(bottom) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = f.y0 + (f.y1 - f.y0) * i / 5.0;
    const double y = f.py(v);
    s += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + num(v) + "</text>\n";
  }
  for (double v : x_ticks) {
    const double x = f.px(v);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(x) + "\" y2=\"" + num(bottom + 4) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\">" + num(v) +
         "</text>\n";
  }
  s += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(kHeight - 14) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num((top + bottom) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
  return s;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string render(const LineChart& chart) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::vector<double> ticks;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
      if (std::find(ticks.begin(), ticks.end(), s.x[i]) == ticks.end()) ticks.push_back(s.x[i]);
    }
  }
  for (const auto& b : chart.bands) {
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (std::isfinite(b.lower[i])) y0 = std::min(y0, b.lower[i]);
      if (std::isfinite(b.upper[i])) y1 = std::max(y1, b.upper[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  y0 = std::min(y0, 0.0);
  y1 = std::max(y1, 1.0);
  const Frame f{x0, x1, y0, y1};

  std::string s = header(chart.title);
  for (const auto& b : chart.bands) {
    std::string pts;
    for (std::size_t i = 0; i < b.x.size(); ++i) pts += num(f.px(b.x[i])) + "," + num(f.py(b.upper[i])) + " ";
    for (std::size_t i = b.x.size(); i-- > 0;) pts += num(f.px(b.x[i])) + "," + num(f.py(b.lower[i])) + " ";
    s += "<polygon points=\"" + pts + "\" fill=\"gray\" fill-opacity=\"" + num(b.opacity) + "\" stroke=\"none\"/>\n";
  }
  s += axes(f, chart.x_label, chart.y_label, ticks);
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& ser = chart.series[k];
    const char* colour = kPalette[k % kPalette.size()];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (std::isfinite(ser.y[i])) pts += num(f.px(ser.x[i])) + "," + num(f.py(ser.y[i])) + " ";
    }
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 18) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly + 4) + "\">" + escape(ser.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string render(const BoxChart& chart) {
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& g : chart.groups) {
    for (double v : g.values) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  y1 = std::max(y1, y0 + 1e-6);
  const auto n = static_cast<double>(chart.groups.size());
  const Frame f{0.0, std::max(1.0, n), y0, y1};

  std::string s = header(chart.title);
  s += axes(f, "", chart.y_label, {});
  const double slot = (kWidth - kLeft - kRight) / std::max(1.0, n);
  for (std::size_t k = 0; k < chart.groups.size(); ++k) {
    std::vector<double> v;
    for (double x : chart.groups[k].values) {
      if (std::isfinite(x)) v.push_back(x);
    }
    const double cx = kLeft + slot * (static_cast<double>(k) + 0.5);
    s += "<text x=\"" + num(cx) + "\" y=\"" + num(kHeight - kBottom + 18) + "\" text-anchor=\"middle\">" +
         escape(chart.groups[k].label) + "</text>\n";
    if (v.empty()) continue;
    const double q1 = quantile(v, 0.25), med = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const double iqr = q3 - q1;
    double lo = q1, hi = q3;
    for (double x : v) {
      if (x >= q1 - 1.5 * iqr) lo = std::min(lo, x);
      if (x <= q3 + 1.5 * iqr) hi = std::max(hi, x);
    }
    const double half = slot * 0.25;
    s += "<line x1=\"" + num(cx) + "\" y1=\"" + num(f.py(lo)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
         num(f.py(hi)) + "\" stroke=\"black\"/>\n";
    s += "<rect x=\"" + num(cx - half) + "\" y=\"" + num(f.py(q3)) + "\" width=\"" + num(2 * half) +
         "\" height=\"" + num(std::max(0.5, f.py(q1) - f.py(q3))) +
         "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(cx - half) + "\" y1=\"" + num(f.py(med)) + "\" x2=\"" + num(cx + half) + "\" y2=\"" +
         num(f.py(med)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double x : v) {
      if (x < lo || x > hi) {
        s += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(f.py(x)) + "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
      }
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace fsc::plot
