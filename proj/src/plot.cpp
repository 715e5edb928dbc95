#include "threatnet/plot.hpp"

#include "threatnet/error.hpp"
#include "threatnet/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>

namespace threatnet {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 520;
constexpr double kLeft = 70;
constexpr double kTop = 40;
constexpr double kPlot = 400;  // square plot area

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

double px(double pfa) { return kLeft + std::clamp(pfa, 0.0, 1.0) * kPlot; }
double py(double pd) { return kTop + (1.0 - std::clamp(pd, 0.0, 1.0)) * kPlot; }

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

}  // namespace

std::string roc_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  if (series.empty()) throw InputError("nothing to plot");
  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       kLeft + kPlot / 2, escape(title));
  }

  // Grid and axes.
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                       px(v), py(0), px(v), py(1));
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                       px(0), py(v), px(1), py(v));
    if (i % 2 == 0) {
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.1f}</text>\n", px(v),
                         py(0) + 18, v);
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", px(0) - 6,
                         py(v) + 4, v);
    }
  }
  svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, kPlot, kPlot);
  svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n",
                     px(0), py(0), px(1), py(1));
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">PFA</text>\n", kLeft + kPlot / 2,
                     py(0) + 38);
  svg += fmt::format(
      "<text x=\"20\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1f})\">PD</text>\n",
      kTop + kPlot / 2, kTop + kPlot / 2);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % kPalette.size()];
    const auto& pts = series[s].curve.points;
    // Error band: upper edge forward, lower edge backward.
    std::string band;
    for (const auto& p : pts) band += fmt::format("{:.2f},{:.2f} ", px(p.pfa), py(p.pd + p.se));
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band += fmt::format("{:.2f},{:.2f} ", px(it->pfa), py(it->pd - it->se));
    }
    if (!band.empty()) band.pop_back();
    svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n", band, colour);

    std::string line;
    for (const auto& p : pts) line += fmt::format("{:.2f},{:.2f} ", px(p.pfa), py(p.pd));
    if (!line.empty()) line.pop_back();
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, colour);

    const double ly = kTop + 16 + 18.0 * static_cast<double>(s);
    const double lx = kLeft + kPlot + 10;
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       lx, ly - 4, lx + 18, ly - 4, colour);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 22, ly,
                       escape(series[s].label));
  }
  svg += "</svg>\n";
  return svg;
}

void write_roc_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                   const std::string& title) {
  const std::string svg = roc_svg(series, title);
  auto out = io::open_output(path);
  out << svg;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace threatnet
