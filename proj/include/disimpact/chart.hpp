#pragma once

#include <string>
#include <vector>

#include "disimpact/export.hpp"

namespace disimpact {

struct ChartOptions {
  std::string title;
  int width{800};
  int height{420};
};

struct Chart {
  std::string svg;
  std::size_t polylines{0};
  std::vector<std::string> warnings;
};

/// Line chart with one polyline per series, weeks on the x-axis and the
/// index on a fixed (0, pi) y-axis. Output depends only on the input, so
/// identical tables render to identical bytes. An empty table yields axes
/// only plus a warning.
Chart render_line_chart(const SeriesTable& table, const ChartOptions& options = {});

}  // namespace disimpact
