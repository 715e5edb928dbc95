#pragma once

#include "threatnet/evaluation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace threatnet {

struct PlotSeries {
  std::string label;
  RocCurve curve;
};

/// ROC chart: PFA on x, PD on y, one polyline per series, a shaded ±1 SE
/// band, and a legend. Output depends only on the inputs.
std::string roc_svg(const std::vector<PlotSeries>& series, const std::string& title = {});

void write_roc_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                   const std::string& title = {});

}  // namespace threatnet
