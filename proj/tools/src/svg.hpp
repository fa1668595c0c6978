#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace phivar::cli {

inline constexpr std::size_t kSvgMaxPoints = 8192;
inline constexpr int kSvgWidth = 960;
inline constexpr int kSvgHeight = 540;

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> rule;  // horizontal reference line
  std::string rule_label;
};

// Keeps at most `max_points` points: both endpoints plus the minimum and
// maximum of each bucket, in index order.
Series decimate(const Series& s, std::size_t max_points = kSvgMaxPoints);

// Line chart with a fixed 0 0 960 540 viewBox.
void write_svg(std::ostream& out, const Chart& chart);

}  // namespace phivar::cli
