#include "dwrl/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dwrl/error.hpp"

namespace dwrl {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

// Plot box margins inside the canvas.
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 44.0;
constexpr double kMarginBottom = 56.0;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
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

struct Domain {
  double lo = 0.0, hi = 1.0;

  // 5% of the span added on each side; a flat span gets a unit pad so the
  // data stays strictly inside the box.
  static Domain padded(double min_v, double max_v) {
    double pad = 0.05 * (max_v - min_v);
    if (pad <= 0.0) pad = 0.5;
    return {min_v - pad, max_v + pad};
  }
};

struct Frame {
  Domain x, y;
  double plot_x0, plot_y0, plot_w, plot_h;

  double to_px(double v) const { return plot_x0 + (v - x.lo) / (x.hi - x.lo) * plot_w; }
  double to_py(double v) const { return plot_y0 + plot_h - (v - y.lo) / (y.hi - y.lo) * plot_h; }
};

void open_svg(std::ostringstream& os, const ChartOptions& opt, const Frame& f) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
  os << "<!-- domain x " << num(f.x.lo) << " " << num(f.x.hi) << " y " << num(f.y.lo) << " "
     << num(f.y.hi) << " box " << px(f.plot_x0) << " " << px(f.plot_y0) << " " << px(f.plot_w)
     << " " << px(f.plot_h) << " -->\n";
  os << "<rect width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    os << "<text x=\"" << px(opt.width / 2.0)
       << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << xml_escape(opt.title) << "</text>\n";
  }
}

void draw_axes(std::ostringstream& os, const ChartOptions& opt, const Frame& f) {
  // Plot border.
  os << "<rect x=\"" << px(f.plot_x0) << "\" y=\"" << px(f.plot_y0) << "\" width=\""
     << px(f.plot_w) << "\" height=\"" << px(f.plot_h)
     << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  // Five ticks per axis, end ticks exactly at the domain bounds.
  for (int i = 0; i < 5; ++i) {
    const double tx = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
    const double cx = f.to_px(tx);
    os << "<line x1=\"" << px(cx) << "\" y1=\"" << px(f.plot_y0 + f.plot_h) << "\" x2=\"" << px(cx)
       << "\" y2=\"" << px(f.plot_y0 + f.plot_h + 5) << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << px(cx) << "\" y=\"" << px(f.plot_y0 + f.plot_h + 20)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(tx)
       << "</text>\n";
    const double ty = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    const double cy = f.to_py(ty);
    os << "<line x1=\"" << px(f.plot_x0 - 5) << "\" y1=\"" << px(cy) << "\" x2=\"" << px(f.plot_x0)
       << "\" y2=\"" << px(cy) << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << px(f.plot_x0 - 8) << "\" y=\"" << px(cy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(ty)
       << "</text>\n";
  }
  os << "<text x=\"" << px(f.plot_x0 + f.plot_w / 2.0) << "\" y=\"" << px(opt.height - 12.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << xml_escape(opt.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << px(f.plot_y0 + f.plot_h / 2.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << px(f.plot_y0 + f.plot_h / 2.0) << ")\">" << xml_escape(opt.y_label) << "</text>\n";
}

void draw_hlines(std::ostringstream& os, const ChartOptions& opt, const Frame& f) {
  for (const auto& h : opt.hlines) {
    const double cy = f.to_py(h.y);
    os << "<line x1=\"" << px(f.plot_x0) << "\" y1=\"" << px(cy) << "\" x2=\""
       << px(f.plot_x0 + f.plot_w) << "\" y2=\"" << px(cy)
       << "\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\n";
    if (!h.label.empty()) {
      os << "<text x=\"" << px(f.plot_x0 + f.plot_w - 6) << "\" y=\"" << px(cy - 5)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">"
         << xml_escape(h.label) << "</text>\n";
    }
  }
}

void draw_legend(std::ostringstream& os, const std::vector<std::string>& labels, const Frame& f) {
  const double x = f.plot_x0 + 10.0;
  double y = f.plot_y0 + 14.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    os << "<rect x=\"" << px(x) << "\" y=\"" << px(y - 8) << "\" width=\"14\" height=\"4\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << px(x + 20) << "\" y=\"" << px(y)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(labels[i])
       << "</text>\n";
    y += 18.0;
  }
}

Frame make_frame(const ChartOptions& opt, double xmin, double xmax, double ymin, double ymax) {
  Frame f;
  f.x = Domain::padded(xmin, xmax);
  f.y = Domain::padded(ymin, ymax);
  f.plot_x0 = kMarginLeft;
  f.plot_y0 = kMarginTop;
  f.plot_w = opt.width - kMarginLeft - kMarginRight;
  f.plot_h = opt.height - kMarginTop - kMarginBottom;
  if (f.plot_w <= 0 || f.plot_h <= 0) throw DomainError("chart canvas too small for the margins");
  return f;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw StateError("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace

Series read_series_csv(const std::string& path, const std::string& x_col,
                       const std::string& y_col, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");

  std::vector<std::string> cols;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) cols.push_back(field);
  }
  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return i;
    }
    throw ParseError(path + ":1: no column named '" + name + "'");
  };
  const std::size_t xi = find_col(x_col);
  const std::size_t yi = find_col(y_col);

  Series s;
  s.label = label;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() <= std::max(xi, yi)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected at least " +
                       std::to_string(std::max(xi, yi) + 1) + " fields, found " +
                       std::to_string(fields.size()));
    }
    try {
      std::size_t pos = 0;
      const double x = std::stod(fields[xi], &pos);
      if (pos != fields[xi].size()) throw std::invalid_argument("trailing characters");
      pos = 0;
      const double y = std::stod(fields[yi], &pos);
      if (pos != fields[yi].size()) throw std::invalid_argument("trailing characters");
      s.x.push_back(x);
      s.y.push_back(y);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric value");
    }
  }
  if (s.x.empty()) throw ParseError(path + ": no data rows");
  return s;
}

std::string render_curves_svg(const std::vector<Series>& series, const ChartOptions& options) {
  if (series.empty()) throw DomainError("no series to plot");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.empty()) throw DomainError("series '" + s.label + "' has no points");
    if (s.x.size() != s.y.size()) {
      throw DimensionError("series '" + s.label + "' has " + std::to_string(s.x.size()) +
                           " x values but " + std::to_string(s.y.size()) + " y values");
    }
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  for (const auto& h : options.hlines) {
    ymin = std::min(ymin, h.y);
    ymax = std::max(ymax, h.y);
  }

  const Frame f = make_frame(options, xmin, xmax, ymin, ymax);
  std::ostringstream os;
  open_svg(os, options, f);
  draw_axes(os, options, f);
  draw_hlines(os, options, f);
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[i % kPaletteSize]
       << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t p = 0; p < series[i].x.size(); ++p) {
      if (p) os << ' ';
      os << px(f.to_px(series[i].x[p])) << ',' << px(f.to_py(series[i].y[p]));
    }
    os << "\"/>\n";
  }
  std::vector<std::string> labels;
  for (const auto& s : series) labels.push_back(s.label);
  draw_legend(os, labels, f);
  os << "</svg>\n";
  return os.str();
}

void render_curves(const std::vector<Series>& series, const ChartOptions& options,
                   const std::string& out_path) {
  write_text_file(out_path, render_curves_svg(series, options));
}

std::string render_bars_svg(const std::vector<std::string>& series_labels,
                            const std::vector<BarGroup>& groups, const ChartOptions& options) {
  if (series_labels.empty()) throw DomainError("no bar series to plot");
  if (groups.empty()) throw DomainError("no bar groups to plot");
  double ymin = 0.0, ymax = 0.0;  // bars grow from zero, keep it in frame
  for (const auto& g : groups) {
    if (g.values.size() != series_labels.size()) {
      throw DimensionError("group '" + g.category + "' has " + std::to_string(g.values.size()) +
                           " values for " + std::to_string(series_labels.size()) + " series");
    }
    for (double v : g.values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }

  const Frame f = make_frame(options, 0.0, static_cast<double>(groups.size()), ymin, ymax);
  std::ostringstream os;
  open_svg(os, options, f);

  // Axes without x ticks; categories label themselves under each group.
  os << "<rect x=\"" << px(f.plot_x0) << "\" y=\"" << px(f.plot_y0) << "\" width=\""
     << px(f.plot_w) << "\" height=\"" << px(f.plot_h)
     << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (int i = 0; i < 5; ++i) {
    const double ty = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    const double cy = f.to_py(ty);
    os << "<line x1=\"" << px(f.plot_x0 - 5) << "\" y1=\"" << px(cy) << "\" x2=\"" << px(f.plot_x0)
       << "\" y2=\"" << px(cy) << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << px(f.plot_x0 - 8) << "\" y=\"" << px(cy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(ty)
       << "</text>\n";
  }
  os << "<text x=\"" << px(f.plot_x0 + f.plot_w / 2.0) << "\" y=\"" << px(options.height - 12.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << xml_escape(options.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << px(f.plot_y0 + f.plot_h / 2.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << px(f.plot_y0 + f.plot_h / 2.0) << ")\">" << xml_escape(options.y_label) << "</text>\n";

  const double zero_y = f.to_py(0.0);
  os << "<line x1=\"" << px(f.plot_x0) << "\" y1=\"" << px(zero_y) << "\" x2=\""
     << px(f.plot_x0 + f.plot_w) << "\" y2=\"" << px(zero_y) << "\" stroke=\"#888888\"/>\n";

  const double group_w = f.plot_w / static_cast<double>(groups.size());
  const double slot_w = group_w / static_cast<double>(series_labels.size() + 1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.plot_x0 + group_w * static_cast<double>(g);
    for (std::size_t s = 0; s < series_labels.size(); ++s) {
      const double v = groups[g].values[s];
      const double bx = gx + slot_w * (static_cast<double>(s) + 0.5);
      const double top = std::min(f.to_py(v), zero_y);
      const double bh = std::fabs(f.to_py(v) - zero_y);
      os << "<rect class=\"bar\" x=\"" << px(bx) << "\" y=\"" << px(top) << "\" width=\""
         << px(slot_w * 0.9) << "\" height=\"" << px(bh) << "\" fill=\""
         << kPalette[s % kPaletteSize] << "\"/>\n";
    }
    os << "<text x=\"" << px(gx + group_w / 2.0) << "\" y=\"" << px(f.plot_y0 + f.plot_h + 20)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << xml_escape(groups[g].category) << "</text>\n";
  }
  draw_legend(os, series_labels, f);
  draw_hlines(os, options, f);
  os << "</svg>\n";
  return os.str();
}

void render_bars(const std::vector<std::string>& series_labels, const std::vector<BarGroup>& groups,
                 const ChartOptions& options, const std::string& out_path) {
  write_text_file(out_path, render_bars_svg(series_labels, groups, options));
}

}  // namespace dwrl
