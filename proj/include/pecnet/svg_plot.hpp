#pragma once

#include <string>
#include <vector>

namespace pecnet {

struct PlotSeries {
  std::string name;
  std::vector<double> ys;  // one per x
};

// Static vector-graphics line chart (pure side output; never feeds back into
// metrics).
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& xs,
                      const std::vector<PlotSeries>& series);

}  // namespace pecnet
