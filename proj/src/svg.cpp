#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sedm/report.hpp"
#include "sedm/text.hpp"

namespace sedm {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string fmt(double v) { return format_fixed(v, 2); }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 1.0, hi += 1.0;
  }
};

void open_svg(std::ostream& out, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" viewBox=\"0 0 "
      << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostream& out, const Range& x, const Range& y, const std::string& x_label, const std::string& y_label, bool x_ticks) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
      << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 5.0;
    const double py = y0 - (y0 - y1) * i / 5.0;
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    if (!x_ticks) continue;
    const double u = x.lo + (x.hi - x.lo) * i / 5.0;
    const double px = x0 + (x1 - x0) * i / 5.0;
    out << "<text x=\"" << fmt(px) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << fmt(u) << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (y0 + y1) / 2
      << ")\">" << escape(y_label) << "</text>\n</g>\n";
}

}  // namespace

void write_line_chart_svg(std::ostream& out, const LineChart& chart) {
  Range x, y;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.name + "' has mismatched x and y lengths");
    for (double v : s.x) x.add(v);
    for (double v : s.y) y.add(v);
  }
  if (chart.reference_y) y.add(*chart.reference_y);
  x.settle();
  y.settle();
  const double pad = 0.05 * (y.hi - y.lo);
  y.lo -= pad;
  y.hi += pad;

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double v) { return x0 + (v - x.lo) / (x.hi - x.lo) * (x1 - x0); };
  auto py = [&](double v) { return y0 - (v - y.lo) / (y.hi - y.lo) * (y0 - y1); };

  open_svg(out, chart.title);
  axes(out, x, y, chart.x_label, chart.y_label, true);
  if (chart.reference_y) {
    out << "<line x1=\"" << x0 << "\" y1=\"" << fmt(py(*chart.reference_y)) << "\" x2=\"" << x1 << "\" y2=\""
        << fmt(py(*chart.reference_y)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n"
        << "<text x=\"" << x1 + 6 << "\" y=\"" << fmt(py(*chart.reference_y) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"gray\">" << escape(chart.reference_label) << "</text>\n";
  }
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline data-series=\"" << escape(s.name) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
    out << "\"/>\n";
    const double ly = kTop + 20 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << x1 + 10 << "\" y1=\"" << ly << "\" x2=\"" << x1 + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << x1 + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_bar_chart_svg(std::ostream& out, const BarChart& chart) {
  if (chart.labels.size() != chart.values.size()) throw std::invalid_argument("bar chart labels and values differ in length");
  Range x, y;
  y.add(0.0);
  for (double v : chart.values) y.add(v);
  y.settle();
  y.hi += 0.1 * (y.hi - y.lo);

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto py = [&](double v) { return y0 - (v - y.lo) / (y.hi - y.lo) * (y0 - y1); };
  open_svg(out, chart.title);
  axes(out, x, y, "", chart.y_label, false);
  const double slot = (x1 - x0) / std::max<std::size_t>(1, chart.values.size());
  for (std::size_t k = 0; k < chart.values.size(); ++k) {
    const double left = x0 + slot * (static_cast<double>(k) + 0.2);
    const double top = py(std::max(0.0, chart.values[k]));
    const double bottom = py(std::min(0.0, chart.values[k]));
    out << "<rect data-label=\"" << escape(chart.labels[k]) << "\" x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
        << fmt(slot * 0.6) << "\" height=\"" << fmt(bottom - top) << "\" fill=\"" << kPalette[k % std::size(kPalette)] << "\"/>\n"
        << "<text x=\"" << fmt(left + slot * 0.3) << "\" y=\"" << fmt(top - 6)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << format_fixed(chart.values[k], 3)
        << "</text>\n"
        << "<text x=\"" << fmt(left + slot * 0.3) << "\" y=\"" << y0 + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(chart.labels[k]) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_edac_svg(std::ostream& out, const MapeReport& report) {
  LineChart chart;
  chart.title = "Estimated duration at completion";
  chart.x_label = "control time";
  chart.y_label = "EDAC (periods)";
  chart.reference_y = report.rd;
  chart.reference_label = "RD " + format_fixed(report.rd, 2);
  for (const auto& s : report.series) {
    Series line{to_string(s.method), {}, {}};
    for (const auto& f : s.forecasts) {
      line.x.push_back(f.control_time);
      line.y.push_back(f.edac);
    }
    chart.series.push_back(std::move(line));
  }
  write_line_chart_svg(out, chart);
}

void write_mape_svg(std::ostream& out, const MapeReport& report) {
  BarChart chart;
  chart.title = "MAPE of the final duration estimate";
  chart.y_label = "MAPE (%)";
  for (const auto& s : report.series) {
    chart.labels.push_back(to_string(s.method));
    chart.values.push_back(s.mape);
  }
  write_bar_chart_svg(out, chart);
}

}  // namespace sedm
