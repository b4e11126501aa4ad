#include "lipgd/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace lipgd::harness {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

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

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(s.x[i]);
      const double sd = i < s.std.size() && std::isfinite(s.std[i]) ? s.std[i] : 0.0;
      yr.add(s.mean[i] - sd);
      yr.add(s.mean[i] + sd);
    }
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";

  // Axes and ticks.
  o << "<g stroke=\"#333\" fill=\"none\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
    << "\" height=\"" << ph << "\"/></g>\n<g fill=\"#333\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    o << "<text x=\"" << px(fx) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << fmt(fx)
      << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << "</text>\n</g>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* color = kColors[si % std::size(kColors)];
    o << "<g class=\"series\" data-label=\"" << escape(s.label) << "\">\n";
    if (!s.std.empty()) {
      std::ostringstream upper, lower;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.mean[i]) || !std::isfinite(s.std[i])) continue;
        upper << px(s.x[i]) << ',' << py(s.mean[i] + s.std[i]) << ' ';
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        if (!std::isfinite(s.mean[i]) || !std::isfinite(s.std[i])) continue;
        lower << px(s.x[i]) << ',' << py(s.mean[i] - s.std[i]) << ' ';
      }
      o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"" << upper.str()
        << lower.str() << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.mean[i])) o << px(s.x[i]) << ',' << py(s.mean[i]) << ' ';
    o << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(si);
    o << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 32
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

const std::vector<std::string>& default_plot_metrics() {
  static const std::vector<std::string> metrics{"lip_bound", "lip_empirical", "mse_risk", "huber_risk",
                                                "grad_norm", "norm_W_op",     "norm_B"};
  return metrics;
}

PlotReport emit_plots(const AggregateTable& table, const std::filesystem::path& out_dir,
                      const std::vector<std::string>& metrics) {
  PlotReport report;
  if (table.rows.empty()) {
    report.warnings.push_back("aggregate has no rows; nothing to plot");
    return report;
  }
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> arms;
  std::vector<double> values;
  for (const auto& row : table.rows) {
    if (std::find(arms.begin(), arms.end(), row.arm) == arms.end()) arms.push_back(row.arm);
    if (std::find(values.begin(), values.end(), row.value) == values.end()) values.push_back(row.value);
  }
  std::sort(values.begin(), values.end());
  const std::string axis = table.rows.front().axis;

  auto write = [&](const std::string& stem, const PlotSpec& spec) {
    const auto path = out_dir / (stem + ".svg");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << render_svg(spec);
    report.written.push_back(path);
  };

  for (const auto& metric : metrics) {
    const auto it = std::find(table.metrics.begin(), table.metrics.end(), metric);
    if (it == table.metrics.end()) {
      report.warnings.push_back("metric '" + metric + "' not in aggregate; skipped");
      continue;
    }
    const std::size_t k = static_cast<std::size_t>(it - table.metrics.begin());
    const bool any = std::any_of(table.rows.begin(), table.rows.end(),
                                 [&](const AggregateRow& r) { return std::isfinite(r.mean[k]); });
    if (!any) {
      report.warnings.push_back("metric '" + metric + "' has no finite values; skipped");
      continue;
    }

    std::map<std::string, Series> finals;
    for (double v : values) {
      PlotSpec spec{metric + " (" + axis + " = " + fmt(v) + ")", "t", metric, {}};
      for (const auto& arm : arms) {
        Series s{arm, {}, {}, {}};
        for (const auto& row : table.rows) {
          if (row.arm != arm || row.value != v) continue;
          s.x.push_back(static_cast<double>(row.t));
          s.mean.push_back(row.mean[k]);
          s.std.push_back(row.std[k]);
        }
        if (s.x.empty()) continue;
        auto& f = finals[arm];
        f.label = arm;
        f.x.push_back(v);
        f.mean.push_back(s.mean.back());
        f.std.push_back(s.std.back());
        spec.series.push_back(std::move(s));
      }
      write(metric + "_" + axis + fmt(v), spec);
    }
    if (values.size() > 1) {
      PlotSpec spec{"final " + metric + " vs " + axis, axis, metric, {}};
      for (const auto& arm : arms)
        if (finals.count(arm)) spec.series.push_back(finals[arm]);
      write("final_" + metric + "_vs_" + axis, spec);
    }
  }
  return report;
}

}  // namespace lipgd::harness
