#include "arvdm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace arvdm {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 40.0, kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double transform(double v, bool log_scale) {
  if (!log_scale) return v;
  if (v <= 0.0)
    throw ParseError("plot: log axis requires strictly positive values");
  return std::log10(v);
}

}  // namespace

std::string render_line_chart(const CsvTable& table, const PlotSpec& spec) {
  const int xcol = table.column_index(spec.x_column);
  if (xcol < 0) throw ParseError("plot: unknown x column '" + spec.x_column + "'");
  std::vector<int> ycols;
  for (const std::string& name : spec.y_columns) {
    const int c = table.column_index(name);
    if (c < 0) throw ParseError("plot: unknown y column '" + name + "'");
    ycols.push_back(c);
  }
  if (ycols.empty()) throw ParseError("plot: no y columns given");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& row : table.rows) {
    const double x = transform(row[xcol], spec.log_x);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    for (int c : ycols) {
      const double y = transform(row[c], spec.log_y);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  auto py = [&](double y) {
    return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-size=\"16\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">" << spec.title
        << "</text>\n";

  // Axes box and ticks.
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(kWidth - kLeft - kRight) << "\" height=\""
      << num(kHeight - kTop - kBottom)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 5.0;
    const double fy = ymin + (ymax - ymin) * t / 5.0;
    const double raw_x = spec.log_x ? std::pow(10.0, fx) : fx;
    const double raw_y = spec.log_y ? std::pow(10.0, fy) : fy;
    svg << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(kHeight - kBottom)
        << "\" x2=\"" << num(px(fx)) << "\" y2=\"" << num(kHeight - kBottom + 5)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kHeight - kBottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << tick_label(raw_x) << "</text>\n";
    svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(fy))
        << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(py(fy))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
        << tick_label(raw_y) << "</text>\n";
  }
  svg << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\""
      << num(kHeight - 12)
      << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">"
      << spec.x_column << (spec.log_x ? " (log)" : "") << "</text>\n";

  // Series.
  for (std::size_t s = 0; s < ycols.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (r) svg << ' ';
      svg << num(px(transform(table.rows[r][xcol], spec.log_x))) << ','
          << num(py(transform(table.rows[r][ycols[s]], spec.log_y)));
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << num(kWidth - kRight - 8) << "\" y=\""
        << num(kTop + 16 + 16 * static_cast<double>(s))
        << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "fill=\"" << color << "\">" << spec.y_columns[s]
        << (spec.log_y ? " (log)" : "") << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace arvdm
