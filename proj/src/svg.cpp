#include "mb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mb/csv.hpp"

namespace mb {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string f2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool loglog) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", loglog ? std::exp(v) : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series,
                            const PlotOptions& opt) {
  const double L = 72, R = 24, T = 42, B = 52;
  const double W = opt.width, H = opt.height;
  const double pw = W - L - R, ph = H - T - B;

  // transformed data (log space when loglog); nonpositive points dropped
  struct XY {
    std::vector<double> xs, ys, lo, hi;
  };
  std::vector<XY> data(series.size());
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& ps = series[s];
    for (std::size_t i = 0; i < ps.xs.size() && i < ps.ys.size(); ++i) {
      double x = ps.xs[i], y = ps.ys[i];
      double e = i < ps.yerr.size() ? ps.yerr[i] : 0.0;
      double lo = y - e, hi = y + e;
      if (opt.loglog) {
        if (!(x > 0.0) || !(y > 0.0)) continue;
        lo = lo > 0.0 ? std::log(lo) : std::log(y) - 1.0;
        hi = std::log(hi);
        x = std::log(x);
        y = std::log(y);
      }
      if (!any) {
        xmin = xmax = x;
        ymin = lo;
        ymax = hi;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, lo);
        ymax = std::max(ymax, hi);
      }
      data[s].xs.push_back(x);
      data[s].ys.push_back(y);
      data[s].lo.push_back(lo);
      data[s].hi.push_back(hi);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" + std::to_string(opt.height) +
         "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " +
         std::to_string(opt.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg += "<text x=\"" + f2(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" +
           escape(opt.title) + "</text>\n";

  // bands first so lines draw on top
  for (std::size_t s = 0; s < data.size(); ++s) {
    const XY& d = data[s];
    bool has_err = s < series.size() && !series[s].yerr.empty();
    if (d.xs.size() < 2 || !has_err) continue;
    std::string pts;
    for (std::size_t i = 0; i < d.xs.size(); ++i)
      pts += f2(px(d.xs[i])) + "," + f2(py(d.hi[i])) + " ";
    for (std::size_t i = d.xs.size(); i-- > 0;)
      pts += f2(px(d.xs[i])) + "," + f2(py(d.lo[i])) + " ";
    svg += "<polygon points=\"" + pts + "\" fill=\"" +
           kPalette[s % kPaletteSize] + "\" fill-opacity=\"0.15\" "
           "stroke=\"none\"/>\n";
  }

  // axes box + ticks
  svg += "<rect x=\"" + f2(L) + "\" y=\"" + f2(T) + "\" width=\"" + f2(pw) +
         "\" height=\"" + f2(ph) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  const int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    double fx = xmin + (xmax - xmin) * i / kTicks;
    double fy = ymin + (ymax - ymin) * i / kTicks;
    double gx = px(fx), gy = py(fy);
    svg += "<line x1=\"" + f2(gx) + "\" y1=\"" + f2(T + ph) + "\" x2=\"" +
           f2(gx) + "\" y2=\"" + f2(T + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + f2(gx) + "\" y=\"" + f2(T + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + tick_label(fx, opt.loglog) + "</text>\n";
    svg += "<line x1=\"" + f2(L - 5) + "\" y1=\"" + f2(gy) + "\" x2=\"" + f2(L) +
           "\" y2=\"" + f2(gy) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + f2(L - 8) + "\" y=\"" + f2(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + tick_label(fy, opt.loglog) + "</text>\n";
  }
  svg += "<text x=\"" + f2(L + pw / 2) + "\" y=\"" + f2(H - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + escape(opt.xlabel) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + f2(T + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " + f2(T + ph / 2) + ")\">" +
         escape(opt.ylabel) + "</text>\n";

  // polylines
  for (std::size_t s = 0; s < data.size(); ++s) {
    const XY& d = data[s];
    if (d.xs.empty()) continue;
    std::string pts;
    for (std::size_t i = 0; i < d.xs.size(); ++i)
      pts += f2(px(d.xs[i])) + "," + f2(py(d.ys[i])) + " ";
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           kPalette[s % kPaletteSize] + "\" stroke-width=\"1.8\"/>\n";
  }

  // legend, top right inside the plot area
  double lx = L + pw - 190, ly = T + 12;
  for (std::size_t s = 0; s < series.size(); ++s) {
    double row = ly + 18 * static_cast<double>(s);
    svg += "<line x1=\"" + f2(lx) + "\" y1=\"" + f2(row) + "\" x2=\"" +
           f2(lx + 26) + "\" y2=\"" + f2(row) + "\" stroke=\"" +
           kPalette[s % kPaletteSize] + "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + f2(lx + 32) + "\" y=\"" + f2(row + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(series[s].label) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& opt) {
  write_text_file(path, render_svg_plot(series, opt));
}

}  // namespace mb
