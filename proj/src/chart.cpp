#include "disimpact/chart.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "disimpact/time.hpp"

namespace disimpact {

namespace {

constexpr std::array<const char*, 11> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                                  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

Chart render_line_chart(const SeriesTable& table, const ChartOptions& options) {
  constexpr double left = 60, right = 150, top = 40, bottom = 50;
  const double w = options.width;
  const double h = options.height;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const auto x_of = [&](std::size_t i) {
    const auto n = table.weeks.size();
    return n <= 1 ? left + plot_w / 2 : left + plot_w * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  const auto y_of = [&](double v) {
    v = std::clamp(v, 0.0, std::numbers::pi);
    return top + plot_h * (1.0 - v / std::numbers::pi);
  };

  Chart chart;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << fixed(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << xml_escape(options.title) << "</text>\n";
  }

  // Axes and y ticks at multiples of pi/4.
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + plot_h) << "\" x2=\"" << fixed(left + plot_w)
      << "\" y2=\"" << fixed(top + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left) << "\" y2=\""
      << fixed(top + plot_h) << "\"/>\n";
  svg << "</g>\n";
  static constexpr std::array<const char*, 5> kTickLabels = {"0", "π/4", "π/2", "3π/4", "π"};
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = y_of(std::numbers::pi * k / 4.0);
    svg << "<line x1=\"" << fixed(left - 4) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left) << "\" y2=\""
        << fixed(y) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">" << kTickLabels[k]
        << "</text>\n";
  }
  if (!table.weeks.empty()) {
    const std::size_t n = table.weeks.size();
    const std::size_t step = std::max<std::size_t>(1, (n + 7) / 8);
    for (std::size_t i = 0; i < n; i += step) {
      svg << "<text x=\"" << fixed(x_of(i)) << "\" y=\"" << fixed(top + plot_h + 18)
          << "\" text-anchor=\"middle\">" << format_date(table.weeks[i]) << "</text>\n";
    }
  }
  svg << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(h - 8)
      << "\" text-anchor=\"middle\">week</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(top + plot_h / 2) << ")\">impact index</text>\n";
  svg << "</g>\n";

  if (table.weeks.empty() || table.series.empty()) {
    chart.warnings.push_back("empty series: chart has axes only");
  } else {
    for (std::size_t s = 0; s < table.series.size(); ++s) {
      const auto& series = table.series[s];
      const char* colour = kPalette[s % kPalette.size()];
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (i > 0) svg << ' ';
        svg << fixed(x_of(i)) << ',' << fixed(y_of(series.values[i]));
      }
      svg << "\"/>\n";
      const double ly = top + 14.0 * static_cast<double>(s) + 6;
      svg << "<line x1=\"" << fixed(left + plot_w + 12) << "\" y1=\"" << fixed(ly) << "\" x2=\""
          << fixed(left + plot_w + 32) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << colour
          << "\" stroke-width=\"2\"/>";
      svg << "<text x=\"" << fixed(left + plot_w + 36) << "\" y=\"" << fixed(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(series.name) << "</text>\n";
      ++chart.polylines;
    }
  }
  svg << "</svg>\n";
  chart.svg = svg.str();
  return chart;
}

}  // namespace disimpact
