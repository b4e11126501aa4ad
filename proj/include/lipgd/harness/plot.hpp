#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lipgd/harness/csv.hpp"

namespace lipgd::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  /// ±1 std band; may be empty.
  std::vector<double> std;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Standalone SVG document with one line per series and a shaded band.
std::string render_svg(const PlotSpec& spec);

struct PlotReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

/// Metrics plotted by default.
const std::vector<std::string>& default_plot_metrics();

/// One SVG per (metric, axis value) against t with the arms overlaid, plus
/// final-value-vs-axis plots when the table holds several axis values.
/// Metrics whose values are all NaN are skipped with a warning.
PlotReport emit_plots(const AggregateTable& table, const std::filesystem::path& out_dir,
                      const std::vector<std::string>& metrics = default_plot_metrics());

}  // namespace lipgd::harness
