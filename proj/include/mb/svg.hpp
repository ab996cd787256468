#pragma once

#include <string>
#include <vector>

namespace mb {

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> yerr;  // optional stderr band, empty or same length
};

struct PlotOptions {
  std::string title;
  std::string xlabel = "t";
  std::string ylabel = "cumulative expected regret";
  bool loglog = false;
  int width = 860;
  int height = 560;
};

// Hand-emitted SVG: axes, tick labels, one polyline per series, optional
// translucent stderr bands, legend.  Empty input yields empty axes (the
// caller warns).  In loglog mode nonpositive points are dropped.
std::string render_svg_plot(const std::vector<PlotSeries>& series,
                            const PlotOptions& opt);
void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& opt);

}  // namespace mb
