#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "phivar/path_io.hpp"

namespace phivar::cli {

namespace {

constexpr double kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) {
      const double pad = std::max(std::fabs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

Series decimate(const Series& s, std::size_t max_points) {
  const std::size_t n = std::min(s.x.size(), s.y.size());
  if (n <= max_points || max_points < 4) return s;
  const std::size_t buckets = (max_points - 2) / 2;
  std::vector<std::size_t> keep{0};
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t first = 1 + b * (n - 2) / buckets;
    const std::size_t last = 1 + (b + 1) * (n - 2) / buckets;
    if (first >= last) continue;
    const auto [mn, mx] = std::minmax_element(s.y.begin() + first, s.y.begin() + last);
    const std::size_t i = mn - s.y.begin(), j = mx - s.y.begin();
    keep.push_back(std::min(i, j));
    if (i != j) keep.push_back(std::max(i, j));
  }
  keep.push_back(n - 1);
  Series out{s.label, {}, {}};
  for (auto k : keep) {
    out.x.push_back(s.x[k]);
    out.y.push_back(s.y[k]);
  }
  return out;
}

void write_svg(std::ostream& out, const Chart& chart) {
  std::vector<Series> series;
  Range xr, yr;
  for (const auto& s : chart.series) {
    series.push_back(decimate(s));
    for (double v : series.back().x) xr.add(v);
    for (double v : series.back().y) yr.add(v);
  }
  if (chart.rule) yr.add(*chart.rule);
  xr.finish();
  yr.finish();
  const double w = kSvgWidth - kLeft - kRight, h = kSvgHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kSvgWidth << ' ' << kSvgHeight
      << "\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kSvgWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
  out << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop) << "\" width=\"" << coord(w) << "\" height=\""
      << coord(h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4, yv = yr.lo + (yr.hi - yr.lo) * i / 4;
    out << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(kTop + h + 18) << "\" text-anchor=\"middle\">"
        << format_double(std::round(xv * 1e6) / 1e6) << "</text>\n";
    out << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(py(yv) + 4) << "\" text-anchor=\"end\">"
        << format_double(std::round(yv * 1e6) / 1e6) << "</text>\n";
  }
  out << "<text x=\"" << coord(kLeft + w / 2) << "\" y=\"" << kSvgHeight - 14 << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << coord(kTop + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << coord(kTop + h / 2) << ")\">" << escape(chart.y_label) << "</text>\n";
  if (chart.rule) {
    out << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(py(*chart.rule)) << "\" x2=\"" << coord(kLeft + w)
        << "\" y2=\"" << coord(py(*chart.rule)) << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << coord(kLeft + w - 4) << "\" y=\"" << coord(py(*chart.rule) - 6)
        << "\" text-anchor=\"end\" fill=\"#666\">" << escape(chart.rule_label) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < series[i].x.size(); ++k) {
      if (!std::isfinite(series[i].y[k])) continue;
      out << coord(px(series[i].x[k])) << ',' << coord(py(series[i].y[k])) << ' ';
    }
    out << "\"/>\n";
    if (!series[i].label.empty()) {
      out << "<text x=\"" << coord(kLeft + 10) << "\" y=\"" << coord(kTop + 16 + 16.0 * i) << "\" fill=\"" << color
          << "\">" << escape(series[i].label) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace phivar::cli
