// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/indices.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/store.hpp"
#include "ethdec/timeseries.hpp"

namespace ethdec {

/// Shortest decimal form that round-trips to the same double, so
/// emitted CSV re-parses to exactly the in-memory value.
inline std::string fmt_double(double v) { return nlohmann::json(v).dump(); }

/// Fixed 7-decimal form used by the divergence table.
inline std::string fmt_fixed7(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

/// Five heat bands over [0,1], green to red, at 0.2 steps.
inline int heat_band(double v) {
  if (v < 0.2) return 0;
  if (v < 0.4) return 1;
  if (v < 0.6) return 2;
  if (v < 0.8) return 3;
  return 4;
}

// ---------------------------------------------------------------------
// Per-date index report
// ---------------------------------------------------------------------

/// The four index values (plus tail ratios) for each distribution
/// metric stored on one date, and the raw values of any stored scalar
/// metrics.
struct IndexReport {
  struct Row {
    MetricId metric;
    double gini;
    double hhi;
    HhiClass hhi_class;
    double shannon_normalized;
    double atkinson;
    TailRatios tails;
  };
  struct ScalarRow {
    MetricId metric;
    double value;
  };
  Date date;
  std::vector<Row> rows;
  std::vector<ScalarRow> scalars;
};

inline IndexReport index_report(const SnapshotStore& store, Date date,
                                const MetricRegistry& registry, double epsilon = 0.5,
                                std::optional<MetricId> only = std::nullopt) {
  IndexReport report;
  report.date = date;
  for (const auto& row : registry.rows()) {
    if (only && row.id != *only) continue;
    auto snap = store.try_read(date, row.id);
    if (!snap) continue;
    if (row.kind == MetricKind::Scalar) {
      report.scalars.push_back({row.id, snap->value()});
      continue;
    }
    const ShareDistribution& d = snap->distribution();
    const double theta = hhi(d);
    report.rows.push_back({row.id, gini(d), theta, hhi_classify(theta),
                           shannon_normalized(d),
                           family_index(IndexFamily::Atkinson, row.id, d, epsilon),
                           tail_ratios(d)});
  }
  if (report.rows.empty() && report.scalars.empty()) {
    throw MissingDataError("no snapshots stored for " + date.to_string());
  }
  return report;
}

inline std::string indices_csv(const IndexReport& report) {
  std::string out =
      "metric,gini,hhi_rescaled,hhi_class,shannon_normalized,atkinson,palma,p90_p10,p50_p10\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  for (const auto& r : report.rows) {
    out += csv_field(to_string(r.metric));
    out += ',' + fmt_double(r.gini);
    out += ',' + fmt_double(r.hhi);
    out += ',' + std::string(to_string(r.hhi_class));
    out += ',' + fmt_double(r.shannon_normalized);
    out += ',' + fmt_double(r.atkinson);
    out += ',' + opt(r.tails.palma);
    out += ',' + opt(r.tails.p90_p10);
    out += ',' + opt(r.tails.p50_p10);
    out += '\n';
  }
  return out;
}

inline std::string scalars_csv(const IndexReport& report) {
  std::string out = "metric,value\n";
  for (const auto& s : report.scalars) {
    out += csv_field(to_string(s.metric));
    out += ',' + fmt_double(s.value);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------
// Range averages (the color-coded overview table)
// ---------------------------------------------------------------------

/// Arithmetic means of each daily index per metric over a date range.
/// Days without a snapshot are excluded from the mean and reflected in
/// the coverage count.
struct AveragesTable {
  struct Row {
    MetricId metric;
    double mean_gini;
    double mean_hhi;
    double mean_shannon_normalized;
    double mean_atkinson;
    int days_covered;
  };
  Date begin;
  Date end;
  int days_in_range;
  std::vector<Row> rows;
};

inline AveragesTable averages_table(const SnapshotStore& store, Date begin, Date end,
                                    const MetricRegistry& registry, double epsilon = 0.5) {
  if (begin > end) throw InvalidArgumentError("empty date range");
  AveragesTable table;
  table.begin = begin;
  table.end = end;
  table.days_in_range = static_cast<int>(end - begin) + 1;
  for (MetricId id : registry.distribution_metrics()) {
    double sum_gini = 0.0, sum_hhi = 0.0, sum_shannon = 0.0, sum_atkinson = 0.0;
    int covered = 0;
    for (Date day = begin; day <= end; day = day.plus_days(1)) {
      auto snap = store.try_read(day, id);
      if (!snap) continue;
      const ShareDistribution& d = snap->distribution();
      sum_gini += gini(d);
      sum_hhi += hhi(d);
      sum_shannon += shannon_normalized(d);
      sum_atkinson += family_index(IndexFamily::Atkinson, id, d, epsilon);
      ++covered;
    }
    if (covered == 0) continue;
    table.rows.push_back({id, sum_gini / covered, sum_hhi / covered,
                          sum_shannon / covered, sum_atkinson / covered, covered});
  }
  return table;
}

inline std::string averages_csv(const AveragesTable& table) {
  std::string out =
      "metric,mean_gini,mean_hhi_rescaled,mean_shannon_normalized,mean_atkinson,days_covered\n";
  for (const auto& r : table.rows) {
    out += csv_field(to_string(r.metric));
    out += ',' + fmt_double(r.mean_gini);
    out += ',' + fmt_double(r.mean_hhi);
    out += ',' + fmt_double(r.mean_shannon_normalized);
    out += ',' + fmt_double(r.mean_atkinson);
    out += ',' + std::to_string(r.days_covered);
    out += '\n';
  }
  return out;
}

/// ANSI-colored table for terminals; cells are tinted by heat band
/// (green = dispersed, red = concentrated).
inline std::string averages_terminal(const AveragesTable& table, bool color = true) {
  static const char* band_codes[5] = {"\x1b[38;5;46m", "\x1b[38;5;118m", "\x1b[38;5;226m",
                                      "\x1b[38;5;208m", "\x1b[38;5;196m"};
  auto cell = [&](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    if (!color) return std::string(buf);
    return std::string(band_codes[heat_band(v)]) + buf + "\x1b[0m";
  };
  std::string out = "index averages " + table.begin.to_string() + " .. " +
                    table.end.to_string() + " (" + std::to_string(table.days_in_range) +
                    " days)\n";
  char header[128];
  std::snprintf(header, sizeof(header), "%-28s %8s %8s %8s %8s %6s\n", "metric", "gini",
                "hhi", "shannon", "atkinson", "days");
  out += header;
  for (const auto& r : table.rows) {
    char name[32];
    std::snprintf(name, sizeof(name), "%-28s", std::string(to_string(r.metric)).c_str());
    out += name;
    out += ' ' + cell(r.mean_gini) + "   " + cell(r.mean_hhi) + "   " +
           cell(r.mean_shannon_normalized) + "   " + cell(r.mean_atkinson);
    char days[12];
    std::snprintf(days, sizeof(days), " %6d", r.days_covered);
    out += days;
    out += '\n';
  }
  out += "note: atkinson uses aversion 0.5; staked-by-pool scales it by the top pool's share\n";
  return out;
}

// ---------------------------------------------------------------------
// First-vs-last divergence table
// ---------------------------------------------------------------------

/// Normalized JSD between the first and the last stored day of each
/// distribution metric, values carried at 7-decimal precision.
struct JsdTable {
  struct Row {
    MetricId metric;
    Date first;
    Date last;
    double jsd;  ///< rounded to 7 decimals
  };
  std::vector<Row> rows;
};

inline JsdTable jsd_table(const SnapshotStore& store, Date end) {
  JsdTable table;
  const MetricRegistry registry = MetricRegistry::defaults();
  for (MetricId id : registry.distribution_metrics()) {
    std::vector<Date> dates = store.dates(id);
    while (!dates.empty() && dates.back() > end) dates.pop_back();
    if (dates.size() < 2) continue;
    const double raw = jsd_between(store, id, dates.front(), dates.back());
    table.rows.push_back({id, dates.front(), dates.back(), std::round(raw * 1e7) / 1e7});
  }
  if (table.rows.empty()) {
    throw InsufficientDataError("divergence table needs at least 2 stored days");
  }
  return table;
}

inline std::string jsd_table_csv(const JsdTable& table) {
  std::string out = "metric,first_date,last_date,jsd\n";
  for (const auto& r : table.rows) {
    out += csv_field(to_string(r.metric));
    out += ',' + r.first.to_string();
    out += ',' + r.last.to_string();
    out += ',' + fmt_fixed7(r.jsd);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------
// Interval divergences
// ---------------------------------------------------------------------

inline std::string jsd_intervals_csv(
    const std::vector<std::pair<MetricId, JsdIntervals>>& rows, Date end) {
  std::string out = "metric,end_date,jsd_1d,jsd_30d,jsd_60d,jsd_90d\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  for (const auto& [metric, intervals] : rows) {
    out += csv_field(to_string(metric));
    out += ',' + end.to_string();
    out += ',' + opt(intervals.one_day);
    out += ',' + opt(intervals.thirty_day);
    out += ',' + opt(intervals.sixty_day);
    out += ',' + opt(intervals.ninety_day);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------
// Per-metric index time series
// ---------------------------------------------------------------------

/// One index family evaluated per metric per day over a range; the
/// per-metric counterpart of the aggregate series. Days without a
/// snapshot are simply absent from that metric's points.
struct IndexSeries {
  struct Point {
    Date date;
    double value;
  };
  struct MetricSeries {
    MetricId metric;
    std::vector<Point> points;
  };
  IndexFamily family = IndexFamily::Gini;
  Date begin;
  Date end;
  std::vector<MetricSeries> rows;  ///< registry order; metrics with >= 1 day
};

inline IndexSeries index_series(const SnapshotStore& store, IndexFamily family,
                                const MetricRegistry& registry, Date begin, Date end,
                                double epsilon = 0.5) {
  if (begin > end) throw InvalidArgumentError("empty date range");
  IndexSeries series;
  series.family = family;
  series.begin = begin;
  series.end = end;
  for (MetricId id : registry.distribution_metrics()) {
    IndexSeries::MetricSeries row;
    row.metric = id;
    for (Date day = begin; day <= end; day = day.plus_days(1)) {
      auto snap = store.try_read(day, id);
      if (!snap) continue;
      row.points.push_back({day, family_index(family, id, snap->distribution(), epsilon)});
    }
    if (!row.points.empty()) series.rows.push_back(std::move(row));
  }
  return series;
}

/// Long format: one row per (date, family, metric).
inline std::string index_series_csv(const std::vector<IndexSeries>& series_list) {
  std::string out = "date,family,metric,value\n";
  for (const auto& series : series_list) {
    for (const auto& row : series.rows) {
      for (const auto& p : row.points) {
        out += p.date.to_string();
        out += ',' + std::string(to_string(series.family));
        out += ',' + csv_field(to_string(row.metric));
        out += ',' + fmt_double(p.value);
        out += '\n';
      }
    }
  }
  return out;
}

/// One polyline per metric for a single family.
inline std::string index_series_svg(const IndexSeries& series);

// ---------------------------------------------------------------------
// Master series
// ---------------------------------------------------------------------

/// Long-format series with the aggregate's intermediate terms kept for
/// audit (the value is only meaningful relative to itself over time).
inline std::string master_series_csv(const std::vector<MasterSeries>& series_list) {
  std::string out = "date,family,gamma,geomean,min_beta,max_beta,flagged,missing\n";
  for (const auto& series : series_list) {
    for (const auto& e : series.entries) {
      out += e.date.to_string();
      out += ',' + std::string(to_string(series.family));
      if (e.value) {
        out += ',' + fmt_double(e.value->gamma);
        out += ',' + fmt_double(e.value->geomean);
        out += ',' + fmt_double(e.value->min_beta);
        out += ',' + fmt_double(e.value->max_beta);
      } else {
        out += ",,,,";
      }
      out += e.flagged ? ",true" : ",false";
      std::string missing;
      for (MetricId id : e.missing) {
        if (!missing.empty()) missing += ';';
        missing += to_string(id);
      }
      out += ',' + csv_field(missing);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Lorenz curve
// ---------------------------------------------------------------------

inline std::string lorenz_csv(const std::vector<LorenzPoint>& points) {
  std::string out = "cumulative_population,cumulative_share\n";
  for (const auto& p : points) {
    out += fmt_double(p.population);
    out += ',' + fmt_double(p.share);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------

namespace svg_detail {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y) in data space
};

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline constexpr const char* kPalette[12] = {
    "#1b7f3b", "#b03a2e", "#2e6fb0", "#b08a2e", "#6a2eb0", "#2eb0a4",
    "#7f1b4e", "#4e7f1b", "#1b4e7f", "#7f5e1b", "#3b1b7f", "#1b7f6e"};

/// Self-contained line chart. Deterministic output: fixed canvas,
/// fixed-precision coordinates, no timestamps.
inline std::string line_chart(const std::string& title,
                              const std::vector<Series>& series,
                              const std::vector<std::pair<double, std::string>>& x_ticks,
                              const std::string& y_label) {
  const double width = 920, height = 430;
  const double left = 70, right = 30, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  y_min = std::min(y_min, 0.0);

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"920\" height=\"430\" "
         "viewBox=\"0 0 920 430\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"920\" height=\"430\" fill=\"white\"/>\n";
  out += "<text x=\"460\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";

  // axes
  out += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(top) + "\" x2=\"" +
         fmt_coord(left) + "\" y2=\"" + fmt_coord(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt_coord(left) + "\" y1=\"" + fmt_coord(top + plot_h) +
         "\" x2=\"" + fmt_coord(left + plot_w) + "\" y2=\"" + fmt_coord(top + plot_h) +
         "\" stroke=\"black\"/>\n";

  // y ticks
  for (int k = 0; k <= 4; ++k) {
    const double y = y_min + (y_max - y_min) * k / 4.0;
    const double yy = py(y);
    out += "<line x1=\"" + fmt_coord(left - 4) + "\" y1=\"" + fmt_coord(yy) + "\" x2=\"" +
           fmt_coord(left) + "\" y2=\"" + fmt_coord(yy) + "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%.3g", y);
    out += "<text x=\"" + fmt_coord(left - 8) + "\" y=\"" + fmt_coord(yy + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  out += "<text x=\"16\" y=\"" + fmt_coord(top + plot_h / 2) +
         "\" transform=\"rotate(-90 16 " + fmt_coord(top + plot_h / 2) +
         ")\" text-anchor=\"middle\">" + y_label + "</text>\n";

  // x ticks
  for (const auto& [x, label] : x_ticks) {
    const double xx = px(x);
    out += "<line x1=\"" + fmt_coord(xx) + "\" y1=\"" + fmt_coord(top + plot_h) +
           "\" x2=\"" + fmt_coord(xx) + "\" y2=\"" + fmt_coord(top + plot_h + 4) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt_coord(xx) + "\" y=\"" + fmt_coord(top + plot_h + 18) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
  }

  // series
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].points.empty()) continue;
    const char* color = kPalette[s % 12];
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) {
      out += fmt_coord(px(x)) + "," + fmt_coord(py(y)) + " ";
    }
    out += "\"/>\n";
    const double ly = top + 14 * static_cast<double>(s);
    out += "<line x1=\"" + fmt_coord(left + plot_w - 130) + "\" y1=\"" + fmt_coord(ly) +
           "\" x2=\"" + fmt_coord(left + plot_w - 110) + "\" y2=\"" + fmt_coord(ly) +
           "\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + fmt_coord(left + plot_w - 104) + "\" y=\"" + fmt_coord(ly + 4) +
           "\">" + series[s].name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace svg_detail

/// One polyline per index family; days without a value are skipped.
inline std::string master_series_svg(const std::vector<MasterSeries>& series_list) {
  std::vector<svg_detail::Series> chart_series;
  std::optional<Date> origin;
  for (const auto& series : series_list) {
    if (!series.entries.empty() && !origin) origin = series.entries.front().date;
  }
  for (const auto& series : series_list) {
    svg_detail::Series s;
    s.name = to_string(series.family);
    for (const auto& e : series.entries) {
      if (e.value) {
        s.points.emplace_back(static_cast<double>(e.date - *origin), e.value->gamma);
      }
    }
    chart_series.push_back(std::move(s));
  }

  std::vector<std::pair<double, std::string>> ticks;
  if (origin) {
    std::int64_t span = 0;
    for (const auto& series : series_list) {
      if (!series.entries.empty()) {
        span = std::max(span, series.entries.back().date - *origin);
      }
    }
    const std::int64_t step = std::max<std::int64_t>(1, span / 6);
    for (std::int64_t d = 0; d <= span; d += step) {
      ticks.emplace_back(static_cast<double>(d), origin->plus_days(d).to_string());
    }
  }
  return svg_detail::line_chart("aggregate index by day", chart_series, ticks, "gamma");
}

inline std::string index_series_svg(const IndexSeries& series) {
  std::vector<svg_detail::Series> chart_series;
  for (const auto& row : series.rows) {
    svg_detail::Series s;
    s.name = to_string(row.metric);
    for (const auto& p : row.points) {
      s.points.emplace_back(static_cast<double>(p.date - series.begin), p.value);
    }
    chart_series.push_back(std::move(s));
  }
  std::vector<std::pair<double, std::string>> ticks;
  const std::int64_t span = series.end - series.begin;
  const std::int64_t step = std::max<std::int64_t>(1, span / 6);
  for (std::int64_t d = 0; d <= span; d += step) {
    ticks.emplace_back(static_cast<double>(d), series.begin.plus_days(d).to_string());
  }
  return svg_detail::line_chart(std::string(to_string(series.family)) + " by metric and day",
                                chart_series, ticks, std::string(to_string(series.family)));
}

/// Lorenz polyline with the equality diagonal for reference.
inline std::string lorenz_svg(const std::vector<LorenzPoint>& points,
                              const std::string& title) {
  std::vector<svg_detail::Series> series(2);
  series[0].name = "equality";
  series[0].points = {{0.0, 0.0}, {1.0, 1.0}};
  series[1].name = "lorenz";
  for (const auto& p : points) series[1].points.emplace_back(p.population, p.share);
  std::vector<std::pair<double, std::string>> ticks;
  for (int k = 0; k <= 4; ++k) {
    char label[8];
    std::snprintf(label, sizeof(label), "%.2f", k / 4.0);
    ticks.emplace_back(k / 4.0, label);
  }
  return svg_detail::line_chart(title, series, ticks, "cumulative share");
}

}  // namespace ethdec
