#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "capflow/domain.hpp"
#include "capflow/errors.hpp"

namespace capflow {

enum class ChartSeries { rates, shares };

inline ChartSeries parse_chart_series(std::string_view name) {
  if (name == "rates") return ChartSeries::rates;
  if (name == "shares") return ChartSeries::shares;
  throw UnsupportedFormat("unknown chart series: " + std::string(name));
}

struct ChartOptions {
  int width = 840;
  int height = 520;
  int margin_left = 64;
  int margin_right = 16;
  int margin_top = 48;
  int margin_bottom = 44;
  int max_x_ticks = 12;
};

namespace detail {

inline std::string svg_num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string text(buf);
  if (text == "-0.00") text = "0.00";
  return text;
}

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Percent-axis tick step: smallest step from a fixed menu that keeps the
// tick count at or below 9.
inline double percent_step(double span) {
  for (double step : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 25.0, 50.0, 100.0, 200.0, 500.0}) {
    if (span / step <= 8.0) return step;
  }
  return 1000.0;
}

inline std::string percent_label(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", value);
  return buf;
}

}  // namespace detail

// Deterministic SVG line chart of one country's annual series, in percent
// per year. The zero line is always drawn when it falls inside the range, so
// negative growth and return years read directly off the chart. Gaps in the
// year sequence break the polyline rather than bridging it.
inline std::string render_line_chart(std::span<const IndicatorRow> rows,
                                     ChartSeries series,
                                     const ChartOptions& options = {}) {
  if (rows.size() < 2) {
    throw InsufficientSeries("render_line_chart: need at least two rows");
  }
  std::vector<const IndicatorRow*> ordered;
  ordered.reserve(rows.size());
  for (const auto& row : rows) ordered.push_back(&row);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->year < b->year; });
  const std::string& country = ordered.front()->country;
  for (const auto* row : ordered) {
    if (row->country != country) {
      throw InvalidObservation("render_line_chart: rows span more than one country");
    }
  }
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->year == ordered[i - 1]->year) {
      throw DuplicateYear(country + ": duplicate chart year " +
                          std::to_string(ordered[i]->year));
    }
  }

  struct SeriesDef {
    const char* label;
    const char* color;
    double (*pick)(const IndicatorRow&);
  };
  std::vector<SeriesDef> defs;
  std::string subtitle;
  if (series == ChartSeries::rates) {
    subtitle = "cash flow, growth and return rates";
    defs = {{"f(K)", "#1f77b4", [](const IndicatorRow& r) { return r.cash_flow_rate; }},
            {"g(K)", "#2ca02c", [](const IndicatorRow& r) { return r.growth_rate; }},
            {"r(K)", "#d62728", [](const IndicatorRow& r) { return r.return_rate; }}};
  } else {
    subtitle = "labor and capital shares in consumption";
    defs = {{"labor", "#1f77b4", [](const IndicatorRow& r) { return r.labor_share; }},
            {"capital", "#d62728", [](const IndicatorRow& r) { return r.capital_share; }}};
  }

  double value_low = 0.0, value_high = 0.0;  // percent units; zero always included
  for (const auto* row : ordered) {
    for (const auto& def : defs) {
      const double v = def.pick(*row) * 100.0;
      value_low = std::min(value_low, v);
      value_high = std::max(value_high, v);
    }
  }
  const double step = detail::percent_step(value_high - value_low);
  double axis_low = std::floor(value_low / step) * step;
  double axis_high = std::ceil(value_high / step) * step;
  if (axis_high == axis_low) axis_high = axis_low + step;

  const int year_low = ordered.front()->year;
  const int year_high = ordered.back()->year;
  const int year_span = std::max(1, year_high - year_low);
  const int year_step =
      std::max(1, (year_span + options.max_x_ticks - 1) / options.max_x_ticks);

  const double plot_w =
      static_cast<double>(options.width - options.margin_left - options.margin_right);
  const double plot_h =
      static_cast<double>(options.height - options.margin_top - options.margin_bottom);
  const auto x_of = [&](double year) {
    return options.margin_left + (year - year_low) / year_span * plot_w;
  };
  const auto y_of = [&](double percent) {
    return options.margin_top + (axis_high - percent) / (axis_high - axis_low) * plot_h;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(options.width) + "\" height=\"" + std::to_string(options.height) +
         "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + detail::svg_num(options.margin_left) +
         "\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\" fill=\"#111111\">" +
         detail::xml_escape(country) + ": " + subtitle + "</text>\n";

  // horizontal percent gridlines, darker at zero
  for (double tick = axis_low; tick <= axis_high + 0.5 * step; tick += step) {
    const double y = y_of(tick);
    const bool zero = std::fabs(tick) < 0.25 * step;
    svg += "<line x1=\"" + detail::svg_num(options.margin_left) + "\" y1=\"" +
           detail::svg_num(y) + "\" x2=\"" +
           detail::svg_num(options.width - options.margin_right) + "\" y2=\"" +
           detail::svg_num(y) + "\" stroke=\"" + (zero ? "#444444" : "#dddddd") +
           "\" stroke-width=\"" + (zero ? "1.5" : "1") + "\"/>\n";
    svg += "<text x=\"" + detail::svg_num(options.margin_left - 8) + "\" y=\"" +
           detail::svg_num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
           "text-anchor=\"end\">" +
           detail::percent_label(zero ? 0.0 : tick) + "</text>\n";
  }

  // year ticks
  for (int year = year_low; year <= year_high; year += year_step) {
    const double x = x_of(year);
    const double base = options.height - options.margin_bottom;
    svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(base) +
           "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" + detail::svg_num(base + 5) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(base + 20) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
           "text-anchor=\"middle\">" +
           std::to_string(year) + "</text>\n";
  }
  // axis frame
  {
    const double base = options.height - options.margin_bottom;
    svg += "<line x1=\"" + detail::svg_num(options.margin_left) + "\" y1=\"" +
           detail::svg_num(options.margin_top) + "\" x2=\"" +
           detail::svg_num(options.margin_left) + "\" y2=\"" + detail::svg_num(base) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(options.margin_left) + "\" y1=\"" +
           detail::svg_num(base) + "\" x2=\"" +
           detail::svg_num(options.width - options.margin_right) + "\" y2=\"" +
           detail::svg_num(base) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  }

  // one polyline per run of consecutive years; lone points become dots
  for (const auto& def : defs) {
    std::size_t start = 0;
    while (start < ordered.size()) {
      std::size_t stop = start + 1;
      while (stop < ordered.size() &&
             ordered[stop]->year == ordered[stop - 1]->year + 1) {
        ++stop;
      }
      if (stop - start == 1) {
        svg += "<circle cx=\"" + detail::svg_num(x_of(ordered[start]->year)) + "\" cy=\"" +
               detail::svg_num(y_of(def.pick(*ordered[start]) * 100.0)) +
               "\" r=\"2.5\" fill=\"" + def.color + "\"/>\n";
      } else {
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += def.color;
        svg += "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = start; i < stop; ++i) {
          if (i > start) svg += ' ';
          svg += detail::svg_num(x_of(ordered[i]->year)) + "," +
                 detail::svg_num(y_of(def.pick(*ordered[i]) * 100.0));
        }
        svg += "\"/>\n";
      }
      start = stop;
    }
  }

  // legend
  {
    double x = options.margin_left + 8.0;
    const double y = options.margin_top - 14.0;
    for (const auto& def : defs) {
      svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(y) +
             "\" x2=\"" + detail::svg_num(x + 18) + "\" y2=\"" + detail::svg_num(y) +
             "\" stroke=\"" + def.color + "\" stroke-width=\"2\"/>\n";
      svg += "<text x=\"" + detail::svg_num(x + 23) + "\" y=\"" + detail::svg_num(y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#111111\">" +
             detail::xml_escape(def.label) + "</text>\n";
      x += 23.0 + 9.0 * static_cast<double>(std::string_view(def.label).size()) + 16.0;
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace capflow
