#ifndef COLOC_SVG_HPP
#define COLOC_SVG_HPP

#include <string>
#include <vector>

namespace coloc {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN points are skipped
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool step = false;  // draw as right-continuous steps
};

/// Minimal standalone SVG line chart.
std::string svg_line_chart(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Square grid of values in [0, 1]; NaN cells drawn blank.
std::string svg_heatmap(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& values,
                        const std::string& title);

}  // namespace coloc

#endif  // COLOC_SVG_HPP
