#include "collapsar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace collapsar::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 1e-300 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(std::abs(hi) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

std::string header(const Axes& axes) {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + (kWidth - kLeft - kRight) / 2, escape(axes.title));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + (kWidth - kLeft - kRight) / 2, kHeight - 15, escape(axes.x_label));
  out += fmt::format(
      "<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      kTop + (kHeight - kTop - kBottom) / 2, escape(axes.y_label));
  return out;
}

std::string tick_label(double v) { return fmt::format("{:.3g}", v); }

}  // namespace

std::string line_plot(const std::vector<Series>& series, const Axes& axes) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  auto yv = [&](double y) { return axes.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!axes.log_y || y > 0.0); };

  Range rx, ry;
  if (axes.x_marker && std::isfinite(*axes.x_marker)) rx.add(*axes.x_marker);
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) {
        rx.add(s.x[i]);
        ry.add(yv(s.y[i]));
      }
  rx.settle();
  ry.settle();

  auto px = [&](double x) { return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::string out = header(axes);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, pw, ph);
  for (int k = 0; k <= 5; ++k) {
    const double fx = rx.lo + (rx.hi - rx.lo) * k / 5.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * k / 5.0;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        px(fx), kTop + ph + 16, tick_label(fx));
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
        kLeft - 6, py(fy) + 4, axes.log_y ? "1e" + tick_label(fy) : tick_label(fy));
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", px(fx), kTop,
                       kTop + ph);
  }

  if (axes.x_marker && std::isfinite(*axes.x_marker)) {
    const double mx = px(*axes.x_marker);
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#555\" stroke-dasharray=\"5,4\"/>\n",
                       mx, kTop, kTop + ph);
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#555\">{}</text>\n",
        mx + 4, kTop + 14, escape(axes.marker_label));
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string pts;
    const auto& ser = series[s];
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i)
      if (usable(ser.x[i], ser.y[i])) pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(yv(ser.y[i])));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>\n",
        kLeft + pw + 10, kTop + 16 + 18.0 * s, color, escape(ser.label));
  }
  out += "</svg>\n";
  return out;
}

std::string heat_map(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                     const std::vector<double>& row_labels, const Axes& axes) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  Range rv;
  for (double v : values)
    if (std::isfinite(v) && v != 0.0) rv.add(std::log10(std::abs(v)));
  rv.settle();

  auto color = [&](double v) {
    if (!(std::isfinite(v) && v != 0.0)) return std::string("#ffffff");
    const double s = std::clamp((std::log10(std::abs(v)) - rv.lo) / (rv.hi - rv.lo), 0.0, 1.0);
    // dark blue -> yellow
    const int r = static_cast<int>(std::lround(20 + 235 * s));
    const int g = static_cast<int>(std::lround(30 + 200 * s));
    const int b = static_cast<int>(std::lround(120 - 90 * s));
    return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
  };

  std::string out = header(axes);
  const double cw = cols ? pw / static_cast<double>(cols) : pw;
  const double rh = rows ? ph / static_cast<double>(rows) : ph;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols && i * cols + j < values.size(); ++j)
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         kLeft + j * cw, kTop + i * rh, cw + 0.3, rh + 0.3, color(values[i * cols + j]));
    if (i < row_labels.size())
      out += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
          kLeft - 6, kTop + (i + 0.5) * rh + 4, tick_label(row_labels[i]));
  }
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, pw, ph);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">0</text>\n",
                     kLeft, kTop + ph + 16);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1</text>\n",
                     kLeft + pw, kTop + ph + 16);
  // colour bar
  for (int k = 0; k < 20; ++k) {
    const double s = k / 19.0;
    const double v = std::pow(10.0, rv.lo + s * (rv.hi - rv.lo));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n", kLeft + pw + 20,
                       kTop + ph - (k + 1) * ph / 20, ph / 20 + 0.3, color(v));
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">1e{:.1f}</text>\n",
                     kLeft + pw + 40, kTop + 10, rv.hi);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">1e{:.1f}</text>\n",
                     kLeft + pw + 40, kTop + ph, rv.lo);
  out += "</svg>\n";
  return out;
}

}  // namespace collapsar::svg
