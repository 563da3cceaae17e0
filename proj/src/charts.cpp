#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hudtrack/error.hpp"
#include "hudtrack/export.hpp"

namespace hudtrack::exporter {
namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 420;
constexpr int kPanelWidth = 440;
constexpr int kPlotTop = 50;
constexpr int kPlotHeight = 300;
constexpr int kPlotLeft = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

std::string num(double v) { return format_fixed(v, 2); }

/// Smallest 1/2/2.5/5 x 10^k not below v.
double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= v) return m * mag;
  return 10.0 * mag;
}

struct Panel {
  double x0;         // left of the plot area
  double width;
  double y_max;      // axis maximum
  double x_min = 0;  // for continuous x
  double x_max = 1;

  double y(double v) const { return kPlotTop + kPlotHeight * (1.0 - v / y_max); }
  double x(double v) const { return x0 + width * (v - x_min) / (x_max - x_min); }
};

class Svg {
 public:
  explicit Svg(const std::string& title) {
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
            std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) + ' ' +
            std::to_string(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2.0, 20, title, "middle", 15);
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
            std::to_string(size) + "\">" + s + "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const char* color, double width = 1.0) {
    out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
            "\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const char* color) {
    out_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
            "\" fill=\"" + color + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color, bool markers) {
    if (pts.empty()) return;
    out_ += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ += ' ';
      out_ += num(pts[i].first) + ',' + num(pts[i].second);
    }
    out_ += "\"/>\n";
    if (markers)
      for (const auto& [x, y] : pts)
        out_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
  }

  void raw(const std::string& s) { out_ += s; }

  /// Frame, y ticks and the data/axis maxima as attributes for inspection.
  void axes(const Panel& p, const std::string& title, const std::string& y_label, double data_max) {
    raw("<g class=\"axis\" data-axis-max=\"" + num(p.y_max) + "\" data-max=\"" + num(data_max) + "\">\n");
    line(p.x0, kPlotTop, p.x0, kPlotTop + kPlotHeight, "black");
    line(p.x0, kPlotTop + kPlotHeight, p.x0 + p.width, kPlotTop + kPlotHeight, "black");
    for (int i = 0; i <= 5; ++i) {
      const double v = p.y_max * i / 5.0;
      const double y = p.y(v);
      line(p.x0 - 4, y, p.x0, y, "black");
      line(p.x0, y, p.x0 + p.width, y, "#dddddd", 0.5);
      text(p.x0 - 6, y + 4, format_fixed(v, v < 10.0 ? 1 : 0), "end", 10);
    }
    raw("</g>\n");
    text(p.x0 + p.width / 2, kPlotTop - 10, title, "middle", 13);
    text(p.x0 - 45, kPlotTop + kPlotHeight / 2.0, y_label, "middle", 11);
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
};

void legend(Svg& svg, double x, double y, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    svg.rect(x, y + 16.0 * i - 9, 10, 10, kPalette[i % 7]);
    svg.text(x + 14, y + 16.0 * i, names[i], "start", 11);
  }
}

/// Grouped bars, one group per interval.
void bar_groups(Svg& svg, const Panel& p, const analysis::SamplingReport& report,
                const std::vector<std::vector<double>>& series) {
  const std::size_t groups = report.intervals.size();
  const double group_w = p.width / static_cast<double>(groups);
  const double bar_w = group_w * 0.7 / static_cast<double>(series.size());
  for (std::size_t g = 0; g < groups; ++g) {
    svg.raw("<g class=\"bar-group\" data-interval=\"" + std::to_string(report.intervals[g].interval_s) + "\">\n");
    const double gx = p.x0 + group_w * g + group_w * 0.15;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = series[s][g];
      svg.rect(gx + bar_w * s, p.y(v), bar_w, kPlotTop + kPlotHeight - p.y(v), kPalette[s % 7]);
    }
    svg.text(p.x0 + group_w * (g + 0.5), kPlotTop + kPlotHeight + 16,
             std::to_string(report.intervals[g].interval_s) + " s", "middle", 11);
    svg.raw("</g>\n");
  }
}

double max_of(const std::vector<std::vector<double>>& series) {
  double m = 0.0;
  for (const auto& s : series)
    for (double v : s) m = std::max(m, v);
  return m;
}

std::string counts_chart(const analysis::SamplingReport& report) {
  Svg svg("Raw and cleaned point counts per sampling interval");
  std::vector<std::vector<double>> counts(2);
  std::vector<double> removal;
  for (const auto& r : report.intervals) {
    counts[0].push_back(static_cast<double>(r.raw_count));
    counts[1].push_back(static_cast<double>(r.clean_count));
    removal.push_back(r.retention.removal_pct);
  }
  const double count_max = max_of(counts);
  Panel left{kPlotLeft, kPanelWidth - 40, nice_ceiling(count_max)};
  svg.axes(left, "Point counts", "points", count_max);
  bar_groups(svg, left, report, counts);
  legend(svg, left.x0 + left.width - 80, kPlotTop + 14, {"raw", "clean"});

  const double removal_max = *std::max_element(removal.begin(), removal.end());
  Panel right{kPlotLeft + kPanelWidth + 40, kPanelWidth - 40, nice_ceiling(std::max(removal_max, 1.0))};
  svg.axes(right, "Removed by filtering", "%", removal_max);
  const double step = right.width / static_cast<double>(removal.size());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < removal.size(); ++i) {
    pts.emplace_back(right.x0 + step * (i + 0.5), right.y(removal[i]));
    svg.text(right.x0 + step * (i + 0.5), kPlotTop + kPlotHeight + 16,
             std::to_string(report.intervals[i].interval_s) + " s", "middle", 11);
  }
  svg.polyline(pts, kPalette[3], true);
  return svg.finish();
}

std::string speeds_chart(const analysis::SamplingReport& report) {
  Svg svg("Speed profiles and deviation from the baseline");
  double t_min = 0.0, t_max = 1.0, v_max = 0.0;
  bool any = false;
  for (const auto& r : report.intervals)
    for (const auto& s : r.speed_series) {
      t_min = any ? std::min(t_min, s.t) : s.t;
      t_max = any ? std::max(t_max, s.t) : s.t;
      v_max = std::max(v_max, s.value);
      any = true;
    }
  if (!(t_max > t_min)) t_max = t_min + 1.0;
  Panel left{kPlotLeft, kPanelWidth - 40, nice_ceiling(v_max)};
  left.x_min = t_min;
  left.x_max = t_max;
  svg.axes(left, "Haversine segment speed", "km/h", v_max);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < report.intervals.size(); ++i) {
    const auto& r = report.intervals[i];
    names.push_back(std::to_string(r.interval_s) + " s");
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : r.speed_series) pts.emplace_back(left.x(s.t), left.y(s.value));
    svg.polyline(pts, kPalette[i % 7], false);
  }
  svg.text(left.x0 + left.width / 2, kPlotTop + kPlotHeight + 30, "time (s)", "middle", 11);
  legend(svg, left.x0 + left.width - 50, kPlotTop + 14, names);

  std::vector<double> rmse;
  for (const auto& r : report.intervals) rmse.push_back(r.rmse_vs_baseline ? r.rmse_vs_baseline->rmse : 0.0);
  const double rmse_max = *std::max_element(rmse.begin(), rmse.end());
  Panel right{kPlotLeft + kPanelWidth + 40, kPanelWidth - 40, nice_ceiling(std::max(rmse_max, 1.0))};
  svg.axes(right, "Speed RMSE against the baseline", "km/h", rmse_max);
  const double step = right.width / static_cast<double>(rmse.size());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < rmse.size(); ++i) {
    pts.emplace_back(right.x0 + step * (i + 0.5), right.y(rmse[i]));
    svg.text(right.x0 + step * (i + 0.5), kPlotTop + kPlotHeight + 16,
             std::to_string(report.intervals[i].interval_s) + " s", "middle", 11);
  }
  svg.polyline(pts, kPalette[3], true);
  return svg.finish();
}

std::string methods_chart(const analysis::SamplingReport& report) {
  Svg svg("Distance and mean speed by calculation method");
  std::vector<std::string> names;
  for (const auto& r : report.intervals)
    if (!r.speeds.empty()) {
      for (const auto& s : r.speeds) names.push_back(s.method);
      break;
    }
  std::vector<std::vector<double>> dist(names.size()), speed(names.size());
  for (const auto& r : report.intervals)
    for (std::size_t m = 0; m < names.size(); ++m) {
      dist[m].push_back(m < r.speeds.size() ? r.speeds[m].distance_km : 0.0);
      speed[m].push_back(m < r.speeds.size() ? r.speeds[m].mean : 0.0);
    }
  const double dist_max = max_of(dist);
  Panel left{kPlotLeft, kPanelWidth - 40, nice_ceiling(dist_max)};
  svg.axes(left, "Path length", "km", dist_max);
  if (!names.empty()) bar_groups(svg, left, report, dist);
  legend(svg, left.x0 + left.width - 80, kPlotTop + 14, names);

  const double speed_max = max_of(speed);
  Panel right{kPlotLeft + kPanelWidth + 40, kPanelWidth - 40, nice_ceiling(speed_max)};
  svg.axes(right, "Mean segment speed", "km/h", speed_max);
  if (!names.empty()) bar_groups(svg, right, report, speed);
  return svg.finish();
}

}  // namespace

ChartSet render_charts(const analysis::SamplingReport& report) {
  if (report.intervals.empty()) throw Error(ErrorCode::NothingToRender, "report has no interval");
  return {counts_chart(report), speeds_chart(report), methods_chart(report)};
}

}  // namespace hudtrack::exporter
