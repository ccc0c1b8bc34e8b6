#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/domain.hpp"
#include "capflow/errors.hpp"
#include "capflow/indicators.hpp"
#include "capflow/numeric.hpp"

namespace capflow {

enum class TableFormat { csv, text, markdown, latex };

inline TableFormat parse_format(std::string_view name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "txt" || name == "text") return TableFormat::text;
  if (name == "md" || name == "markdown") return TableFormat::markdown;
  if (name == "tex" || name == "latex") return TableFormat::latex;
  throw UnsupportedFormat("unknown table format: " + std::string(name));
}

struct ColumnSpec {
  std::string name;
  bool numeric = false;  // right-aligned in layouts that align
};

// A rendered-cell table: the builders fix row order (the declared ranking)
// and number formatting, the format renderers only lay the strings out.
struct ReportTable {
  std::string title;
  std::vector<ColumnSpec> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> footnotes;
};

struct ReportOptions {
  int percent_decimals = 1;
  double threshold = kHighCashFlowThreshold;  // marker + count in the rates table
  double labor_share_cutoff = 0.80;           // strict; footer count in the shares table
  int min_year_pairs = 5;                     // countries below this are left out of ranked tables
};

inline std::string format_percent(double fraction, int decimals) {
  return format_fixed(fraction * 100.0, decimals);
}

// Ranking rule shared by every table: descending mean income per capita,
// ties broken by ascending country code; countries without an income key
// rank last (marked, not dropped).
inline bool ranking_less(const CountrySummary& a, const CountrySummary& b) {
  const bool a_ranked = a.avg_income_per_capita.has_value();
  const bool b_ranked = b.avg_income_per_capita.has_value();
  if (a_ranked != b_ranked) return a_ranked;
  if (a_ranked && *a.avg_income_per_capita != *b.avg_income_per_capita) {
    return *a.avg_income_per_capita > *b.avg_income_per_capita;
  }
  return a.country < b.country;
}

namespace detail {

struct RankedSummaries {
  std::vector<const CountrySummary*> ordered;
  std::size_t excluded = 0;  // dropped by the min-year-pairs filter
};

inline RankedSummaries rank_and_filter(std::span<const CountrySummary> summaries,
                                       int min_year_pairs) {
  RankedSummaries out;
  for (const auto& summary : summaries) {
    if (summary.year_pairs < min_year_pairs) {
      ++out.excluded;
      continue;
    }
    out.ordered.push_back(&summary);
  }
  std::sort(out.ordered.begin(), out.ordered.end(),
            [](const auto* a, const auto* b) { return ranking_less(*a, *b); });
  return out;
}

inline std::string country_cell(const CountrySummary& summary, bool mark_high_flow) {
  std::string cell = summary.country;
  if (mark_high_flow && summary.high_cash_flow) cell += " *";
  if (!summary.avg_income_per_capita) cell += " !";
  return cell;
}

inline void append_shared_footnotes(ReportTable& table, const RankedSummaries& ranked,
                                    const ReportOptions& options) {
  bool any_unranked = false;
  for (const auto* summary : ranked.ordered) {
    if (!summary->avg_income_per_capita) any_unranked = true;
  }
  if (any_unranked) {
    table.footnotes.push_back("! income per capita unavailable; listed last, unranked");
  }
  if (ranked.excluded > 0) {
    table.footnotes.push_back(std::to_string(ranked.excluded) +
                              " countries left out: fewer than " +
                              std::to_string(options.min_year_pairs) + " year pairs");
  }
}

}  // namespace detail

// Country table of mean cash flow, growth and return rates, in percent per
// year, ranked by income per capita. Countries whose mean cash flow rate
// exceeds the threshold (strictly) carry a marker and are counted in the
// footer.
inline ReportTable build_rates_table(std::span<const CountrySummary> summaries,
                                     const ReportOptions& options = {}) {
  if (summaries.empty()) throw EmptyDerivation("build_rates_table: no summaries");
  const auto ranked = detail::rank_and_filter(summaries, options.min_year_pairs);
  if (ranked.ordered.empty()) {
    throw EmptyDerivation("build_rates_table: no country meets the year-pairs minimum");
  }

  ReportTable table;
  table.title = "cash flow, growth and return on market-value capital";
  table.columns = {{"country", false}, {"years", true},  {"f(K) %", true},
                   {"g(K) %", true},   {"r(K) %", true}};
  std::size_t high_count = 0;
  for (const auto* summary : ranked.ordered) {
    if (summary->high_cash_flow) ++high_count;
    table.rows.push_back({detail::country_cell(*summary, true),
                          std::to_string(summary->year_pairs),
                          format_percent(summary->avg_cash_flow_rate, options.percent_decimals),
                          format_percent(summary->avg_growth_rate, options.percent_decimals),
                          format_percent(summary->avg_return_rate, options.percent_decimals)});
  }
  table.footnotes.push_back(
      "mean f(K) above " + format_percent(options.threshold, options.percent_decimals) +
      "% in " + std::to_string(high_count) + " of " +
      std::to_string(ranked.ordered.size()) + " countries" +
      (high_count > 0 ? " (marked *)" : ""));
  detail::append_shared_footnotes(table, ranked, options);
  return table;
}

// Country table of mean labor and capital shares in consumption, with footer
// counts of countries below the labor-share cutoff, overall and split by
// income half (the lower half holds the floor(n/2) poorest ranked countries).
inline ReportTable build_shares_table(std::span<const CountrySummary> summaries,
                                      const ReportOptions& options = {}) {
  if (summaries.empty()) throw EmptyDerivation("build_shares_table: no summaries");
  const auto ranked = detail::rank_and_filter(summaries, options.min_year_pairs);
  if (ranked.ordered.empty()) {
    throw EmptyDerivation("build_shares_table: no country meets the year-pairs minimum");
  }

  ReportTable table;
  table.title = "labor and capital shares in consumption";
  table.columns = {
      {"country", false}, {"years", true}, {"labor %", true}, {"capital %", true}};
  std::size_t below_total = 0;
  for (const auto* summary : ranked.ordered) {
    if (summary->avg_labor_share < options.labor_share_cutoff) ++below_total;
    table.rows.push_back({detail::country_cell(*summary, false),
                          std::to_string(summary->year_pairs),
                          format_percent(summary->avg_labor_share, options.percent_decimals),
                          format_percent(summary->avg_capital_share, options.percent_decimals)});
  }
  const std::string cutoff_text =
      format_percent(options.labor_share_cutoff, options.percent_decimals) + "%";
  table.footnotes.push_back("labor share below " + cutoff_text + " in " +
                            std::to_string(below_total) + " of " +
                            std::to_string(ranked.ordered.size()) + " countries");

  std::vector<const CountrySummary*> with_income;
  for (const auto* summary : ranked.ordered) {
    if (summary->avg_income_per_capita) with_income.push_back(summary);
  }
  if (with_income.size() >= 2) {
    const std::size_t lower_size = with_income.size() / 2;
    const std::size_t upper_size = with_income.size() - lower_size;
    std::size_t below_upper = 0, below_lower = 0;
    for (std::size_t i = 0; i < with_income.size(); ++i) {
      if (with_income[i]->avg_labor_share >= options.labor_share_cutoff) continue;
      (i < upper_size ? below_upper : below_lower) += 1;
    }
    table.footnotes.push_back(
        "by income rank, labor share below " + cutoff_text + ": top half " +
        std::to_string(below_upper) + " of " + std::to_string(upper_size) +
        ", bottom half " + std::to_string(below_lower) + " of " +
        std::to_string(lower_size));
  }
  detail::append_shared_footnotes(table, ranked, options);
  return table;
}

// Weighted mean of the four reference component rates; equal weights when
// the series carries none.
inline double weighted_reference_rate(const ReferenceSeries& reference) {
  const std::array<double, 4> weights =
      reference.weights.value_or(std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
  const std::array<double, 4> components = {reference.dividend_rate, reference.rental_rate,
                                            reference.bill_rate, reference.bond_rate};
  double mean = 0.0;
  for (std::size_t i = 0; i < 4; ++i) mean += weights[i] * components[i];
  return mean;
}

struct ComparisonOptions {
  int percent_decimals = 1;
  int min_year_pairs = 5;
  double band_low = 0.03;   // inclusive
  double band_high = 0.06;  // inclusive
};

// Side-by-side table of our derived rates against a user-supplied set of
// directly researched cash-flow components, for the overlapping countries.
// The footer counts how many of our mean cash flow rates fall inside the
// configured band.
inline ReportTable build_comparison_table(std::span<const CountrySummary> summaries,
                                          std::span<const ReferenceSeries> references,
                                          const ComparisonOptions& options = {}) {
  if (!(options.band_low < options.band_high)) {
    throw InvalidConfig("build_comparison_table: band lower bound must be below upper");
  }
  const auto ranked = detail::rank_and_filter(
      summaries, options.min_year_pairs);

  ReportTable table;
  table.title = "derived rates beside directly researched cash-flow components";
  table.columns = {{"country", false},   {"f(K) %", true},  {"g(K) %", true},
                   {"r(K) %", true},     {"dividends %", true}, {"rentals %", true},
                   {"bills %", true},    {"bonds %", true}, {"reference mean %", true},
                   {"gap %", true}};

  bool any_default_weights = false;
  std::size_t in_band = 0;
  for (const auto* summary : ranked.ordered) {
    const ReferenceSeries* reference = nullptr;
    for (const auto& candidate : references) {
      if (candidate.country == summary->country) {
        reference = &candidate;
        break;
      }
    }
    if (!reference) continue;
    if (!reference->weights) any_default_weights = true;
    const double reference_mean = weighted_reference_rate(*reference);
    const double gap = summary->avg_cash_flow_rate - reference_mean;
    const double f = summary->avg_cash_flow_rate;
    if (f >= options.band_low && f <= options.band_high) ++in_band;
    const int d = options.percent_decimals;
    table.rows.push_back({detail::country_cell(*summary, false),
                          format_percent(f, d),
                          format_percent(summary->avg_growth_rate, d),
                          format_percent(summary->avg_return_rate, d),
                          format_percent(reference->dividend_rate, d),
                          format_percent(reference->rental_rate, d),
                          format_percent(reference->bill_rate, d),
                          format_percent(reference->bond_rate, d),
                          format_percent(reference_mean, d),
                          format_percent(gap, d)});
  }
  if (table.rows.empty()) {
    throw NoOverlap("build_comparison_table: no country appears in both inputs");
  }
  if (any_default_weights) {
    table.footnotes.push_back("equal component weights 0.25 used where the reference file supplies none");
  }
  const int d = options.percent_decimals;
  table.footnotes.push_back("mean f(K) within [" + format_percent(options.band_low, d) +
                            "%, " + format_percent(options.band_high, d) + "%] for " +
                            std::to_string(in_band) + " of " +
                            std::to_string(table.rows.size()) + " compared countries");
  ReportOptions shared;
  shared.min_year_pairs = options.min_year_pairs;
  detail::append_shared_footnotes(table, ranked, shared);
  return table;
}

namespace detail {

inline std::string csv_cell(std::string_view cell, char delimiter) {
  const bool needs_quotes = cell.find(delimiter) != std::string_view::npos ||
                            cell.find('"') != std::string_view::npos ||
                            cell.find('\n') != std::string_view::npos;
  if (!needs_quotes) return std::string(cell);
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

inline std::string latex_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '%': out += "\\%"; break;
      case '&': out += "\\&"; break;
      case '#': out += "\\#"; break;
      case '_': out += "\\_"; break;
      case '$': out += "\\$"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string render_csv(const ReportTable& table) {
  std::string out = "# " + table.title + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(table.columns[i].name, ',');
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i], ',');
    }
    out += '\n';
  }
  for (const auto& note : table.footnotes) out += "# " + note + "\n";
  return out;
}

inline std::string render_text(const ReportTable& table) {
  std::vector<std::size_t> widths(table.columns.size());
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    widths[i] = table.columns[i].name.size();
  }
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  const auto emit_row = [&](const std::vector<std::string>& cells, std::string& out) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += "  ";
      const std::size_t pad = widths[i] - cells[i].size();
      if (table.columns[i].numeric) line += std::string(pad, ' ') + cells[i];
      else line += cells[i] + std::string(pad, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };

  std::string out = table.title + "\n\n";
  std::vector<std::string> header;
  for (const auto& column : table.columns) header.push_back(column.name);
  emit_row(header, out);
  for (const auto& row : table.rows) emit_row(row, out);
  if (!table.footnotes.empty()) out += '\n';
  for (const auto& note : table.footnotes) out += note + "\n";
  return out;
}

inline std::string render_markdown(const ReportTable& table) {
  std::string out = "**" + table.title + "**\n\n";
  out += '|';
  for (const auto& column : table.columns) out += ' ' + column.name + " |";
  out += "\n|";
  for (const auto& column : table.columns) {
    out += column.numeric ? " ---: |" : " :--- |";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    out += '|';
    for (const auto& cell : row) out += ' ' + cell + " |";
    out += '\n';
  }
  if (!table.footnotes.empty()) out += '\n';
  for (const auto& note : table.footnotes) out += note + "\n";
  return out;
}

inline std::string render_latex(const ReportTable& table) {
  std::string out = "% " + table.title + "\n";
  out += "\\begin{tabular}{";
  for (const auto& column : table.columns) out += column.numeric ? 'r' : 'l';
  out += "}\n\\hline\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += " & ";
    out += latex_escape(table.columns[i].name);
  }
  out += " \\\\\n\\hline\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += " & ";
      out += latex_escape(row[i]);
    }
    out += " \\\\\n";
  }
  out += "\\hline\n\\end{tabular}\n";
  for (const auto& note : table.footnotes) out += "% " + note + "\n";
  return out;
}

}  // namespace detail

inline std::string render(const ReportTable& table, TableFormat format) {
  switch (format) {
    case TableFormat::csv: return detail::render_csv(table);
    case TableFormat::text: return detail::render_text(table);
    case TableFormat::markdown: return detail::render_markdown(table);
    case TableFormat::latex: return detail::render_latex(table);
  }
  throw UnsupportedFormat("render: unhandled table format");
}

}  // namespace capflow
