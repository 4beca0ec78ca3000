#include "coloc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "coloc/common.hpp"

namespace coloc {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v) >= 1e4 || (std::abs(v) < 1e-2 && v != 0)) {
    std::snprintf(buf, sizeof buf, "%.1e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.3g", v);
  }
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  auto tx = [&](double x) { return options.log_x ? std::log10(x) : x; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isnan(s.y[i]) || std::isnan(s.x[i]) || (options.log_x && s.x[i] <= 0)) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  ymin = std::min(ymin, 0.0);
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(options.title) + "</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double xv = options.log_x ? std::pow(10.0, fx) : fx;
    const double gx = kLeft + pw * i / 4.0;
    out += "<text x=\"" + num(gx) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           tick_label(xv) + "</text>\n";
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double gy = kTop + ph - ph * i / 4.0;
    out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(gy + 4) + "\" text-anchor=\"end\">" + tick_label(yv) +
           "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
         escape(options.x_label) + (options.log_x ? " (log scale)" : "") + "</text>\n";
  out += "<text transform=\"translate(16," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(options.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string path;
    bool pen = false;
    double last_y = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isnan(s.y[i]) || std::isnan(s.x[i]) || (options.log_x && s.x[i] <= 0)) {
        pen = false;
        continue;
      }
      if (!pen) {
        path += "M" + num(px(s.x[i])) + " " + num(py(s.y[i])) + " ";
        pen = true;
      } else {
        if (options.step) path += "L" + num(px(s.x[i])) + " " + num(py(last_y)) + " ";
        path += "L" + num(px(s.x[i])) + " " + num(py(s.y[i])) + " ";
      }
      last_y = s.y[i];
    }
    out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.8\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + num(kWidth - kRight + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(kWidth - kRight + 32) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 38) + "\" y=\"" + num(ly) + "\">" + escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_heatmap(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& values,
                        const std::string& title) {
  const double n = static_cast<double>(labels.size());
  const double cell = 32, left = 130, top = 130;
  const double size_x = left + cell * n + 20, size_y = top + cell * n + 20;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(size_x) + "\" height=\"" +
                    num(size_y) + "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(size_x / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = top + cell * static_cast<double>(i);
    out += "<text x=\"" + num(left - 4) + "\" y=\"" + num(y + cell / 2 + 3) + "\" text-anchor=\"end\">" +
           escape(labels[i]) + "</text>\n";
    const double x = left + cell * static_cast<double>(i) + cell / 2;
    out += "<text transform=\"translate(" + num(x + 3) + "," + num(top - 4) + ") rotate(-60)\">" +
           escape(labels[i]) + "</text>\n";
    for (std::size_t j = 0; j < labels.size() && j < values[i].size(); ++j) {
      const double v = values[i][j];
      const double cx = left + cell * static_cast<double>(j);
      if (std::isnan(v)) {
        out += "<rect x=\"" + num(cx) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" +
               num(cell) + "\" fill=\"#eee\"/>\n";
        continue;
      }
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v, 0.0, 1.0))));
      char colour[16];
      std::snprintf(colour, sizeof colour, "#%02x%02xff", shade, shade);
      out += "<rect x=\"" + num(cx) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
             "\" fill=\"" + colour + "\"><title>" + escape(labels[i]) + " / " + escape(labels[j]) + ": " +
             format_double(v) + "</title></rect>\n";
      out += "<text x=\"" + num(cx + cell / 2) + "\" y=\"" + num(y + cell / 2 + 3) +
             "\" text-anchor=\"middle\" font-size=\"8\" fill=\"" + (v > 0.6 ? "white" : "black") + "\">" +
             num(v) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace coloc
