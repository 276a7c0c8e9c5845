#pragma once

#include <optional>
#include <string>
#include <vector>

namespace collapsar::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  /// Optional vertical marker, e.g. the first zero of a profile.
  std::optional<double> x_marker;
  std::string marker_label;
};

/// Standalone SVG document with one polyline per series. Non-finite points
/// (and non-positive ones on a log axis) are dropped.
std::string line_plot(const std::vector<Series>& series, const Axes& axes);

/// Heat map of log10 |values| (row-major, rows x cols). Rows are labelled
/// with row_labels; columns span the unit interval.
std::string heat_map(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                     const std::vector<double>& row_labels, const Axes& axes);

}  // namespace collapsar::svg
