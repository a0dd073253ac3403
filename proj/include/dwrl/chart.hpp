#pragma once

#include <string>
#include <vector>

namespace dwrl {

// One plotted line: x/y pairs in drawing order.
struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Extract two named columns from a CSV file with a header row.
Series read_series_csv(const std::string& path, const std::string& x_col,
                       const std::string& y_col, const std::string& label);

struct HLine {
  double y = 0.0;
  std::string label;
};

struct ChartOptions {
  int width = 880;
  int height = 520;
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "mean episode return";
  std::vector<HLine> hlines;  // dashed horizontal reference lines
};

// Multi-series line chart emitted as self-contained SVG text. Axis bounds are
// the data extent (reference lines included) padded by 5% per side; the
// bounds and plot box are recorded in a machine-readable comment so emitted
// figures can be verified by parsing them back. Output depends only on the
// inputs, so re-rendering reproduces files byte-identically.
std::string render_curves_svg(const std::vector<Series>& series, const ChartOptions& options);
void render_curves(const std::vector<Series>& series, const ChartOptions& options,
                   const std::string& out_path);

// Grouped bar chart: one bar per (group, series) pair. Bars grow from zero,
// so negative values hang below the baseline.
struct BarGroup {
  std::string category;
  std::vector<double> values;  // one per series label
};

std::string render_bars_svg(const std::vector<std::string>& series_labels,
                            const std::vector<BarGroup>& groups, const ChartOptions& options);
void render_bars(const std::vector<std::string>& series_labels,
                 const std::vector<BarGroup>& groups, const ChartOptions& options,
                 const std::string& out_path);

}  // namespace dwrl
