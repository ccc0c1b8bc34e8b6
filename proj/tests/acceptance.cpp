// Acceptance suite: exercises every top-level requirement end to end and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "capflow/artifacts.hpp"
#include "capflow/indicators.hpp"
#include "capflow/ingestion.hpp"
#include "capflow/oracle.hpp"
#include "capflow/reporting.hpp"
#include "capflow/svg_chart.hpp"

using namespace capflow;

namespace {

namespace fsys = std::filesystem;

fsys::path fixture_path(const std::string& name) {
  return fsys::path(CAPFLOW_FIXTURE_DIR) / name;
}

fsys::path golden_path(const std::string& name) {
  return fsys::path(CAPFLOW_GOLDEN_DIR) / name;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

PanelMap load_fixture() {
  std::ifstream in(fixture_path("wid_fixture.csv"));
  auto parsed = parse_long_file(in);
  if (!parsed.diagnostics.malformed.empty()) {
    throw std::runtime_error("fixture has malformed rows");
  }
  return assemble_panels(parsed.records, VariableMap{});
}

// a synthetic economy read back as a country panel: year-end capital levels
// with the year's consumption and pay flows
std::vector<PanelObservation> economy_as_panel(const std::vector<EconomyState>& economy) {
  std::vector<PanelObservation> panel;
  PanelObservation base;
  base.country = "SIM";
  base.year = 2000;
  base.consumption = economy.front().consumption;
  base.pay = economy.front().pay;
  base.capital = economy.front().capital_prev;
  panel.push_back(base);
  for (const auto& state : economy) {
    PanelObservation obs;
    obs.country = "SIM";
    obs.year = 2000 + state.year;
    obs.consumption = state.consumption;
    obs.pay = state.pay;
    obs.capital = state.capital;
    panel.push_back(obs);
  }
  return panel;
}

double row_identity_residual(const IndicatorRow& row) {
  double worst = identity_residual(
      row.return_rate, row.growth_rate + row.cash_flow_rate,
      std::fabs(row.growth_rate) + std::fabs(row.cash_flow_rate));
  worst = std::max(worst, identity_residual(
                              row.net_profit, row.capital_change + row.cash_flow,
                              std::fabs(row.capital_change) + std::fabs(row.cash_flow)));
  worst = std::max(worst,
                   identity_residual(row.labor_share + row.capital_share, 1.0, 1.0));
  return worst;
}

std::string fmt_residual(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", value);
  return buf;
}

Outcome criterion_identity_suite() {
  Outcome outcome;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto economy = generate_economy(seed, 50, 20);
    const auto report = verify_all_identities(economy, 1e-9);
    for (const auto& check : report.checks) {
      worst = std::max(worst, check.max_residual);
      if (!check.pass) {
        outcome.fail("seed " + std::to_string(seed) + ": " + check.label +
                     " residual " + fmt_residual(check.max_residual));
      }
    }
  }
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  if (elapsed > 10.0) {
    outcome.fail("runtime " + std::to_string(elapsed) + " s exceeds 10 s");
  }
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2f s", elapsed);
  outcome.note("1000 economies, worst residual " + fmt_residual(worst) + ", " + timing);
  return outcome;
}

Outcome criterion_row_exactness() {
  Outcome outcome;
  double worst = 0.0;
  std::size_t rows_checked = 0;
  const auto check_rows = [&](const std::vector<IndicatorRow>& rows) {
    for (const auto& row : rows) {
      worst = std::max(worst, row_identity_residual(row));
      ++rows_checked;
    }
  };
  for (const auto& [country, observations] : load_fixture()) {
    check_rows(derive_panel(observations));
  }
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    check_rows(derive_panel(economy_as_panel(generate_economy(seed, 25, 30))));
  }
  if (worst > 1e-12) outcome.fail("worst row residual " + fmt_residual(worst));
  outcome.note(std::to_string(rows_checked) + " rows, worst residual " +
               fmt_residual(worst));
  return outcome;
}

Outcome criterion_scale_invariance() {
  Outcome outcome;
  double worst = 0.0;
  const auto panels = load_fixture();
  for (const auto& [country, observations] : panels) {
    const auto baseline = derive_panel(observations);
    for (const double lambda : {1e-6, 1.0, 1e6}) {
      auto scaled = observations;
      for (auto& obs : scaled) {
        obs.consumption *= lambda;
        obs.pay *= lambda;
        obs.capital *= lambda;
      }
      const auto rows = derive_panel(scaled);
      if (rows.size() != baseline.size()) {
        outcome.fail(country + ": row count changed under scaling");
        continue;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto pick :
             {&IndicatorRow::cash_flow_rate, &IndicatorRow::growth_rate,
              &IndicatorRow::return_rate, &IndicatorRow::labor_share,
              &IndicatorRow::capital_share}) {
          worst = std::max(worst, relative_gap(rows[i].*pick, baseline[i].*pick));
        }
      }
    }
  }
  if (worst > 1e-12) outcome.fail("worst rate drift " + fmt_residual(worst));
  outcome.note("scales 1e-6, 1, 1e6; worst drift " + fmt_residual(worst));
  return outcome;
}

Outcome criterion_fixture_oracle() {
  Outcome outcome;
  const auto panels = load_fixture();

  std::vector<IndicatorRow> derived;
  std::vector<CountrySummary> summaries;
  for (const auto& [country, observations] : panels) {
    const auto rows = derive_panel(observations);
    derived.insert(derived.end(), rows.begin(), rows.end());
    summaries.push_back(summarize(rows, observations));
  }

  std::ifstream expected_rows_in(fixture_path("expected_indicators.tsv"));
  const auto expected_rows = read_indicators(expected_rows_in);
  std::ifstream expected_summaries_in(fixture_path("expected_summaries.tsv"));
  const auto expected_summaries = read_summaries(expected_summaries_in);

  if (derived.size() != expected_rows.size()) {
    outcome.fail("row count " + std::to_string(derived.size()) + " vs expected " +
                 std::to_string(expected_rows.size()));
  } else {
    for (std::size_t i = 0; i < derived.size(); ++i) {
      if (!(derived[i] == expected_rows[i])) {
        outcome.fail("row " + derived[i].country + "/" +
                     std::to_string(derived[i].year) + " differs from the ledger");
        break;
      }
    }
  }
  if (!(summaries == expected_summaries.summaries)) {
    outcome.fail("summaries differ from the hand-computed ledger");
  }

  const struct {
    const char* stem;
    ReportTable (*build)(std::span<const CountrySummary>, const ReportOptions&);
  } tables[] = {{"rates", &build_rates_table}, {"shares", &build_shares_table}};
  const struct {
    const char* extension;
    TableFormat format;
  } formats[] = {{"csv", TableFormat::csv},
                 {"txt", TableFormat::text},
                 {"md", TableFormat::markdown},
                 {"tex", TableFormat::latex}};
  std::size_t goldens = 0;
  for (const auto& table_spec : tables) {
    const auto table = table_spec.build(summaries, {});
    for (const auto& format_spec : formats) {
      const std::string name =
          std::string(table_spec.stem) + "." + format_spec.extension;
      if (render(table, format_spec.format) != read_file(golden_path(name))) {
        outcome.fail("golden mismatch: " + name);
      }
      ++goldens;
    }
  }
  for (const auto& [country, observations] : panels) {
    const auto rows = derive_panel(observations);
    for (const auto series : {ChartSeries::rates, ChartSeries::shares}) {
      const std::string name =
          country + (series == ChartSeries::rates ? "_rates.svg" : "_shares.svg");
      if (render_line_chart(rows, series) != read_file(golden_path(name))) {
        outcome.fail("golden mismatch: " + name);
      }
      ++goldens;
    }
  }
  outcome.note("ledger bit-exact, " + std::to_string(goldens) + " golden files");
  return outcome;
}

Outcome criterion_threshold() {
  Outcome outcome;
  std::vector<PanelObservation> panel;
  for (int year = 2000; year <= 2002; ++year) {
    PanelObservation obs;
    obs.country = "EDGE";
    obs.year = year;
    obs.consumption = 150.0;
    obs.pay = 50.0;       // cash flow 100 against capital 1000: rate 0.1 exactly
    obs.capital = 1000.0;
    panel.push_back(obs);
  }
  const auto rows = derive_panel(panel);
  const auto at_threshold = summarize(rows, panel);
  if (at_threshold.avg_cash_flow_rate != 0.10) {
    outcome.fail("constructed mean is not exactly 0.10");
  }
  if (at_threshold.high_cash_flow) {
    outcome.fail("mean of exactly 0.10 was flagged");
  }

  auto nudged = rows;
  for (auto& row : nudged) row.cash_flow_rate = 0.10 + 1e-9;
  if (!summarize(nudged, panel).high_cash_flow) {
    outcome.fail("mean of 0.10 + 1e-9 was not flagged");
  }
  outcome.note("strict inequality at the 10% boundary");
  return outcome;
}

Outcome criterion_stationary() {
  Outcome outcome;
  double worst_zero = 0.0, worst_growth = 0.0;
  std::vector<PanelObservation> constant;
  for (int year = 2000; year <= 2005; ++year) {
    PanelObservation obs;
    obs.country = "FLAT";
    obs.year = year;
    obs.consumption = 100.0;
    obs.pay = 60.0;
    obs.capital = 1000.0;
    constant.push_back(obs);
  }
  for (const auto& check : stationary_check(derive_panel(constant))) {
    if (check.growth_rate != 0.0) {
      outcome.fail("constant capital produced nonzero growth");
    }
    worst_zero = std::max(
        worst_zero, identity_residual(check.return_rate, check.consumption_rate,
                                      std::fabs(check.return_rate)));
    if (!check.near_stationary) outcome.fail("zero growth not marked stationary");
  }

  const auto feed = [&](const std::vector<IndicatorRow>& rows) {
    for (const auto& check : stationary_check(rows)) {
      worst_growth = std::max(
          worst_growth,
          identity_residual(check.return_rate - check.consumption_rate,
                            check.growth_rate,
                            std::fabs(check.return_rate) +
                                std::fabs(check.consumption_rate)));
    }
  };
  for (const auto& [country, observations] : load_fixture()) {
    feed(derive_panel(observations));
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    feed(derive_panel(economy_as_panel(generate_economy(seed, 20, 25))));
  }
  if (worst_zero > 1e-12) {
    outcome.fail("return vs consumption rate at zero growth: " + fmt_residual(worst_zero));
  }
  if (worst_growth > 1e-12) {
    outcome.fail("return minus consumption rate vs growth: " + fmt_residual(worst_growth));
  }
  outcome.note("worst residuals " + fmt_residual(worst_zero) + " (zero growth), " +
               fmt_residual(worst_growth) + " (all rows)");
  return outcome;
}

Outcome criterion_comparison_band() {
  Outcome outcome;
  std::ifstream summaries_in(fixture_path("summaries_16.tsv"));
  const auto summaries = read_summaries(summaries_in);
  std::ifstream reference_in(fixture_path("reference_16.csv"));
  const auto references = read_reference(reference_in);
  if (summaries.summaries.size() != 16 || references.size() != 16) {
    outcome.fail("compare fixture is not 16 countries");
    return outcome;
  }

  // the hand-computed weighted means, gaps and band verdicts
  std::ifstream expected_in(fixture_path("expected_reference.tsv"));
  std::string line;
  std::getline(expected_in, line);  // header
  std::size_t expected_in_band = 0, checked = 0;
  double worst = 0.0;
  while (std::getline(expected_in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string country, weighted_text, gap_text, in_band_text;
    std::getline(fields, country, '\t');
    std::getline(fields, weighted_text, '\t');
    std::getline(fields, gap_text, '\t');
    std::getline(fields, in_band_text, '\t');
    const double expected_weighted = *parse_double(weighted_text);
    const double expected_gap = *parse_double(gap_text);
    if (in_band_text == "1") ++expected_in_band;

    const ReferenceSeries* reference = nullptr;
    const CountrySummary* summary = nullptr;
    for (const auto& candidate : references) {
      if (candidate.country == country) reference = &candidate;
    }
    for (const auto& candidate : summaries.summaries) {
      if (candidate.country == country) summary = &candidate;
    }
    if (!reference || !summary) {
      outcome.fail(country + " missing from the fixtures");
      continue;
    }
    const double weighted = weighted_reference_rate(*reference);
    worst = std::max(worst, identity_residual(weighted, expected_weighted, 1.0));
    worst = std::max(worst,
                     identity_residual(summary->avg_cash_flow_rate - weighted,
                                       expected_gap, 1.0));
    ++checked;
  }
  if (checked != 16) outcome.fail("expected 16 hand-computed rows");
  if (worst > 1e-12) outcome.fail("weighted mean residual " + fmt_residual(worst));

  const auto table =
      build_comparison_table(summaries.summaries, references, ComparisonOptions{});
  if (table.rows.size() != 16) {
    outcome.fail("comparison has " + std::to_string(table.rows.size()) + " rows");
  }
  const std::string wanted = "mean f(K) within [3.0%, 6.0%] for " +
                             std::to_string(expected_in_band) +
                             " of 16 compared countries";
  bool found = false;
  for (const auto& note : table.footnotes) {
    if (note == wanted) found = true;
  }
  if (!found) outcome.fail("band footnote does not say: " + wanted);
  outcome.note("16 weighted means to 1e-12, " + std::to_string(expected_in_band) +
               " in the default band");
  return outcome;
}

Outcome criterion_diagnostic_counts() {
  Outcome outcome;
  const auto panels = load_fixture();
  std::vector<CountrySummary> summaries;
  for (const auto& [country, observations] : panels) {
    summaries.push_back(summarize(derive_panel(observations), observations));
  }
  const auto rates = build_rates_table(summaries, {});
  const auto shares = build_shares_table(summaries, {});
  bool high_count = false, half_count = false;
  for (const auto& note : rates.footnotes) {
    if (note.find("mean f(K) above 10.0% in 1 of 3 countries") != std::string::npos) {
      high_count = true;
    }
  }
  for (const auto& note : shares.footnotes) {
    if (note.find("bottom half 1 of 1") != std::string::npos) half_count = true;
  }
  if (!high_count) outcome.fail("high cash-flow count line missing");
  if (!half_count) outcome.fail("low-income-half labor-share count line missing");
  outcome.note(
      "count lines render; no tolerance enforced, source data vintages drift");
  return outcome;
}

Outcome criterion_performance() {
  Outcome outcome;
  std::ostringstream file;
  file << "country;variable;year;value\n";
  for (int c = 0; c < 68; ++c) {
    const std::string country = "C" + std::to_string(100 + c);
    for (int year = 1960; year < 2020; ++year) {
      const double base = 1000.0 + 7.0 * c + 0.5 * (year - 1960);
      file << country << ";mcongo;" << year << ";" << 0.2 * base << "\n";
      file << country << ";mconhn;" << year << ";" << 0.8 * base << "\n";
      file << country << ";mnninc;" << year << ";" << 1.2 * base << "\n";
      file << country << ";wlabsh;" << year << ";0.7\n";
      file << country << ";mnweal;" << year << ";" << 5.0 * base << "\n";
      file << country << ";anninc;" << year << ";" << 40.0 * base << "\n";
      file << country << ";xlcusp;" << year << ";2.5\n";
    }
  }
  const std::string payload = file.str();

  const auto start = std::chrono::steady_clock::now();
  std::istringstream in(payload);
  const auto parsed = parse_long_file(in);
  const auto panels = assemble_panels(parsed.records, VariableMap{});
  std::vector<IndicatorRow> rows;
  std::vector<CountrySummary> summaries;
  for (const auto& [country, observations] : panels) {
    auto derived = derive_panel(observations);
    summaries.push_back(summarize(derived, observations));
    rows.insert(rows.end(), derived.begin(), derived.end());
  }
  const auto rates_text = render(build_rates_table(summaries, {}), TableFormat::text);
  const auto shares_text = render(build_shares_table(summaries, {}), TableFormat::text);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  if (panels.size() != 68) outcome.fail("expected 68 countries");
  if (rows.size() != 68 * 59) outcome.fail("expected 4012 rows");
  if (rates_text.empty() || shares_text.empty()) outcome.fail("reports came back empty");
  if (elapsed >= 1.0) {
    outcome.fail("pipeline took " + std::to_string(elapsed) + " s");
  }
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.3f s", elapsed);
  outcome.note("68 countries x 60 years in " + std::string(timing));
  return outcome;
}

}  // namespace

int main() {
  const struct {
    const char* name;
    Outcome (*run)();
  } criteria[] = {
      {"synthetic-economy identity suite", &criterion_identity_suite},
      {"row-level linear identities", &criterion_row_exactness},
      {"scale invariance of rates and shares", &criterion_scale_invariance},
      {"fixture ledger and golden files", &criterion_fixture_oracle},
      {"strict high cash-flow threshold", &criterion_threshold},
      {"stationary-state relations", &criterion_stationary},
      {"reference comparison and band count", &criterion_comparison_band},
      {"diagnostic count lines", &criterion_diagnostic_counts},
      {"pipeline performance", &criterion_performance},
  };

  int failures = 0;
  int index = 0;
  for (const auto& criterion : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    if (!outcome.pass) ++failures;
    std::cout << "[" << index << "] " << criterion.name << " ... "
              << (outcome.pass ? "pass" : "FAIL");
    if (!outcome.detail.empty()) std::cout << " (" << outcome.detail << ")";
    std::cout << "\n";
  }
  std::cout << (failures == 0 ? "acceptance: all criteria pass"
                              : "acceptance: " + std::to_string(failures) +
                                    " criteria FAILED")
            << " (" << std::size(criteria) << " total)\n";
  return failures == 0 ? 0 : 1;
}
