#include "pecnet/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pecnet/errors.hpp"

namespace pecnet {

namespace {

constexpr double kW = 640, kH = 420;
constexpr double kL = 70, kR = 20, kT = 40, kB = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b"};

std::string num(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& xs,
                      const std::vector<PlotSeries>& series) {
  if (xs.empty() || series.empty())
    throw ConfigError("write_line_chart: nothing to plot");
  for (const PlotSeries& s : series)
    if (s.ys.size() != xs.size())
      throw ConfigError("write_line_chart: series '" + s.name +
                        "' length mismatch");

  double x0 = xs.front(), x1 = xs.front();
  for (double x : xs) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
  }
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const PlotSeries& s : series)
    for (double y : s.ys) {
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;

  const auto px = [&](double x) {
    return kL + (x - x0) / (x1 - x0) * (kW - kL - kR);
  };
  const auto py = [&](double y) {
    return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB);
  };

  std::ofstream os(path);
  if (!os) throw IoError("cannot open plot file: " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << title << "</text>\n";

  // axes + ticks
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR
     << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
     << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = x0 + (x1 - x0) * i / nticks;
    const double fy = y0 + (y1 - y0) * i / nticks;
    os << "<line x1=\"" << px(fx) << "\" y1=\"" << kH - kB << "\" x2=\""
       << px(fx) << "\" y2=\"" << kH - kB + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(fx) << "\" y=\"" << kH - kB + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(fx) << "</text>\n";
    os << "<line x1=\"" << kL - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kL
       << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kL - 8 << "\" y=\"" << py(fy) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << num(fy) << "</text>\n";
  }
  os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">"
     << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
        " transform=\"rotate(-90 16 "
     << (kT + kH - kB) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof *kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      os << px(xs[i]) << "," << py(series[s].ys[i]) << " ";
    os << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      os << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(series[s].ys[i])
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    // legend
    const double ly = kT + 14 + 16 * static_cast<double>(s);
    os << "<line x1=\"" << kW - kR - 120 << "\" y1=\"" << ly << "\" x2=\""
       << kW - kR - 98 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - kR - 92 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name
       << "</text>\n";
  }
  os << "</svg>\n";
  if (!os) throw IoError("plot write failed: " + path);
}

}  // namespace pecnet
