// capflow: derives cash flow, growth and return rates and consumption factor
// shares from national-accounts panel exports, renders ranked country tables
// and charts, and ships a seeded synthetic-economy mode that machine-checks
// the underlying bookkeeping identities.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capflow/artifacts.hpp"
#include "capflow/indicators.hpp"
#include "capflow/ingestion.hpp"
#include "capflow/oracle.hpp"
#include "capflow/reporting.hpp"
#include "capflow/svg_chart.hpp"

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string panel_path;
  std::vector<std::string> variable_overrides;
  std::string delimiter = "auto";
  double threshold = capflow::kHighCashFlowThreshold;
  double epsilon_g = capflow::kStationaryEpsilon;
  int min_year_pairs = 5;
  std::string format = "txt";
  std::string table = "rates";
  std::string out_path;
  std::string out_dir = ".";
  std::string indicators_path = "indicators.tsv";
  std::string summaries_path = "summaries.tsv";
  std::string reference_path;
  std::vector<double> band = {0.03, 0.06};
  std::string series = "rates";
  std::vector<std::string> countries;
  int percent_decimals = 1;
  std::uint64_t seed = 42;
  int households = 50;
  int years = 20;
  double tolerance = 1e-9;
};

void validate_common(const RunConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw capflow::InvalidConfig("threshold must lie strictly between 0 and 1");
  }
  if (!(config.epsilon_g > 0.0)) {
    throw capflow::InvalidConfig("epsilon-g must be positive");
  }
  if (config.min_year_pairs < 2) {
    throw capflow::InvalidConfig("min-years must be at least 2");
  }
  if (config.band.size() != 2 || !(config.band[0] < config.band[1])) {
    throw capflow::InvalidConfig("band lower bound must be below the upper bound");
  }
}

char parse_delimiter_flag(const std::string& flag) {
  if (flag == "auto") return '\0';
  if (flag == ";") return ';';
  if (flag == ",") return ',';
  throw capflow::InvalidConfig("delimiter must be auto, ';' or ','");
}

capflow::VariableMap build_variable_map(const std::vector<std::string>& overrides) {
  capflow::VariableMap map;
  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw capflow::InvalidConfig("variable override must look like field=code: " + entry);
    }
    const auto field = capflow::panel_field_from_name(entry.substr(0, eq));
    if (!field) {
      std::string known;
      for (const auto name : capflow::kPanelFieldNames) {
        if (!known.empty()) known += ", ";
        known += name;
      }
      throw capflow::InvalidConfig("unknown panel field in \"" + entry +
                                   "\"; known fields: " + known);
    }
    map.remap(*field, entry.substr(eq + 1));
  }
  return map;
}

capflow::PanelMap ingest_inputs(const RunConfig& config,
                                capflow::AssembleDiagnostics* assemble_diag) {
  capflow::ParseConfig parse_config;
  parse_config.delimiter = parse_delimiter_flag(config.delimiter);
  parse_config.variables = build_variable_map(config.variable_overrides);

  std::vector<capflow::RawRecord> records;
  for (const auto& path : config.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw capflow::MissingInput("cannot open input file: " + path);
    auto result = capflow::parse_long_file(in, parse_config);
    const auto& diag = result.diagnostics;
    std::cerr << path << ": " << diag.accepted << " records accepted, "
              << diag.malformed.size() << " malformed, " << diag.unrecognized_total()
              << " unrecognized (delimiter '" << diag.delimiter << "')\n";
    for (const auto& bad : diag.malformed) {
      std::cerr << "  line " << bad.line_number << ": " << bad.reason << "\n";
    }
    for (const auto& [code, count] : diag.unrecognized) {
      std::cerr << "  unrecognized variable " << code << ": " << count << " records\n";
    }
    records.insert(records.end(), result.records.begin(), result.records.end());
  }
  auto panels = capflow::assemble_panels(records, parse_config.variables, assemble_diag);
  for (const auto& warning : assemble_diag->warnings) {
    std::cerr << "  " << warning << "\n";
  }
  for (const auto& [country, completeness] : assemble_diag->per_country) {
    if (completeness.years_complete == 0) {
      std::cerr << "  " << country << ": no usable years ("
                << completeness.years_seen << " seen)\n";
    }
  }
  return panels;
}

capflow::PanelMap load_panels(const RunConfig& config) {
  if (!config.panel_path.empty() && !config.inputs.empty()) {
    throw capflow::InvalidConfig("give either raw --input files or one --panel file");
  }
  if (!config.panel_path.empty()) {
    std::ifstream in(config.panel_path, std::ios::binary);
    if (!in) throw capflow::MissingInput("cannot open panel file: " + config.panel_path);
    return capflow::read_panel(in);
  }
  if (config.inputs.empty()) {
    throw capflow::InvalidConfig("compute needs raw --input files or a --panel file");
  }
  capflow::AssembleDiagnostics diag;
  return ingest_inputs(config, &diag);
}

void emit(const RunConfig& config, const std::string& content) {
  if (config.out_path.empty()) {
    std::cout << content;
    return;
  }
  capflow::write_text_atomic(config.out_path, content);
  std::cerr << "wrote " << config.out_path << "\n";
}

capflow::SummariesFile load_summaries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw capflow::MissingInput("missing indicator file: " + path);
  return capflow::read_summaries(in);
}

std::vector<capflow::IndicatorRow> load_indicators(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw capflow::MissingInput("missing indicator file: " + path);
  return capflow::read_indicators(in);
}

int cmd_ingest(const RunConfig& config) {
  validate_common(config);
  capflow::AssembleDiagnostics diag;
  const auto panels = ingest_inputs(config, &diag);
  std::size_t observations = 0;
  for (const auto& [country, list] : panels) observations += list.size();
  std::ostringstream out;
  capflow::write_panel(out, panels);
  capflow::write_text_atomic(config.out_path, out.str());
  std::cerr << "wrote " << observations << " observations for " << panels.size()
            << " countries to " << config.out_path << "\n";
  return 0;
}

int cmd_compute(const RunConfig& config) {
  validate_common(config);
  const auto panels = load_panels(config);

  std::vector<capflow::IndicatorRow> all_rows;
  std::vector<capflow::CountrySummary> summaries;
  std::vector<capflow::StationaryCheck> stationary;
  for (const auto& [country, observations] : panels) {
    capflow::DerivePanelDiagnostics diag;
    auto rows = capflow::derive_panel(observations, &diag);
    for (const auto& warning : diag.warnings) std::cerr << warning << "\n";
    if (rows.empty()) continue;
    summaries.push_back(capflow::summarize(rows, observations, config.threshold));
    auto checks = capflow::stationary_check(rows, config.epsilon_g);
    stationary.insert(stationary.end(), checks.begin(), checks.end());
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }

  const fs::path dir(config.out_dir);
  {
    std::ostringstream out;
    capflow::write_indicators(out, all_rows);
    capflow::write_text_atomic(dir / "indicators.tsv", out.str());
  }
  {
    std::ostringstream out;
    capflow::write_summaries(out, summaries, config.threshold);
    capflow::write_text_atomic(dir / "summaries.tsv", out.str());
  }
  {
    std::ostringstream out;
    capflow::write_stationary(out, stationary, config.epsilon_g);
    capflow::write_text_atomic(dir / "stationary.tsv", out.str());
  }
  std::cerr << "derived " << all_rows.size() << " indicator rows for "
            << summaries.size() << " countries into " << config.out_dir << "\n";
  return 0;
}

int cmd_report(const RunConfig& config) {
  validate_common(config);
  const auto file = load_summaries(config.summaries_path);
  capflow::ReportOptions options;
  options.percent_decimals = config.percent_decimals;
  options.threshold = file.threshold;
  options.min_year_pairs = config.min_year_pairs;
  const auto table = config.table == "shares"
                         ? capflow::build_shares_table(file.summaries, options)
                         : capflow::build_rates_table(file.summaries, options);
  emit(config, capflow::render(table, capflow::parse_format(config.format)));
  return 0;
}

int cmd_compare(const RunConfig& config) {
  validate_common(config);
  const auto file = load_summaries(config.summaries_path);
  std::ifstream in(config.reference_path, std::ios::binary);
  if (!in) {
    throw capflow::MissingInput("cannot open reference file: " + config.reference_path);
  }
  const auto references =
      capflow::read_reference(in, parse_delimiter_flag(config.delimiter));
  capflow::ComparisonOptions options;
  options.percent_decimals = config.percent_decimals;
  options.min_year_pairs = config.min_year_pairs;
  options.band_low = config.band[0];
  options.band_high = config.band[1];
  const auto table = capflow::build_comparison_table(file.summaries, references, options);
  emit(config, capflow::render(table, capflow::parse_format(config.format)));
  return 0;
}

int cmd_chart(const RunConfig& config) {
  validate_common(config);
  const auto rows = load_indicators(config.indicators_path);
  std::map<std::string, std::vector<capflow::IndicatorRow>> by_country;
  for (const auto& row : rows) by_country[row.country].push_back(row);

  const auto series = capflow::parse_chart_series(config.series);
  const fs::path dir(config.out_dir);
  std::size_t written = 0;
  for (const auto& [country, country_rows] : by_country) {
    if (!config.countries.empty() &&
        std::find(config.countries.begin(), config.countries.end(), country) ==
            config.countries.end()) {
      continue;
    }
    if (country_rows.size() < 2) {
      std::cerr << country << ": fewer than two rows, no chart\n";
      continue;
    }
    const auto svg = capflow::render_line_chart(country_rows, series);
    const fs::path target = dir / (country + "_" + config.series + ".svg");
    capflow::write_text_atomic(target, svg);
    ++written;
  }
  if (written == 0) {
    throw capflow::InsufficientSeries("chart: no country had two or more rows");
  }
  std::cerr << "wrote " << written << " charts to " << config.out_dir << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  validate_common(config);
  const auto economy =
      capflow::generate_economy(config.seed, config.households, config.years);
  const auto report = capflow::verify_all_identities(economy, config.tolerance);
  std::cout << "synthetic economy: seed " << config.seed << ", " << config.households
            << " households, " << config.years << " years\n";
  std::cout << report.to_text();
  if (report.all_pass()) {
    std::cout << "all identities hold (" << report.checks.size() << "/"
              << report.checks.size() << ") at tolerance "
              << capflow::format_double(report.tolerance) << "\n";
    return 0;
  }
  std::cout << report.failed_count() << " of " << report.checks.size()
            << " identities FAILED at tolerance "
            << capflow::format_double(report.tolerance) << "\n";
  return 1;
}

std::string single_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  int exit_code = 0;

  CLI::App app{
      "derive cash flow, growth and return rates and consumption factor shares "
      "from national-accounts panel data"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand(
      "ingest", "parse long-format exports and write the assembled panel");
  ingest->add_option("--input", config.inputs, "long-format input file (repeatable)")
      ->required();
  ingest->add_option("--out", config.out_path, "panel output path")->required();
  ingest->add_option("--delimiter", config.delimiter, "auto, ';' or ','");
  ingest->add_option("--map", config.variable_overrides,
                     "variable override, field=code (repeatable)");
  ingest->callback([&] { exit_code = cmd_ingest(config); });

  auto* compute = app.add_subcommand(
      "compute", "derive indicator rows, country summaries and stationary checks");
  compute->add_option("--input", config.inputs, "long-format input file (repeatable)");
  compute->add_option("--panel", config.panel_path, "previously ingested panel file");
  compute->add_option("--out-dir", config.out_dir, "directory for the artifacts");
  compute->add_option("--threshold", config.threshold,
                      "high cash-flow flag threshold (fraction)");
  compute->add_option("--epsilon-g", config.epsilon_g,
                      "near-stationary bound on |g| (fraction)");
  compute->add_option("--delimiter", config.delimiter, "auto, ';' or ','");
  compute->add_option("--map", config.variable_overrides,
                      "variable override, field=code (repeatable)");
  compute->callback([&] { exit_code = cmd_compute(config); });

  auto* report = app.add_subcommand("report", "render a ranked country table");
  report->add_option("--summaries", config.summaries_path, "summaries artifact path");
  report->add_option("--table", config.table, "rates or shares")
      ->check(CLI::IsMember({"rates", "shares"}));
  report->add_option("--format", config.format, "csv, txt, md or tex");
  report->add_option("--min-years", config.min_year_pairs,
                     "least year pairs for a country to be listed");
  report->add_option("--decimals", config.percent_decimals, "percent decimals")
      ->check(CLI::Range(0, 12));
  report->add_option("--out", config.out_path, "write here instead of stdout");
  report->callback([&] { exit_code = cmd_report(config); });

  auto* compare = app.add_subcommand(
      "compare", "set derived rates beside a researched reference file");
  compare->add_option("--summaries", config.summaries_path, "summaries artifact path");
  compare->add_option("--reference", config.reference_path, "reference rates file")
      ->required();
  compare->add_option("--band", config.band, "agreement band, two fractions")
      ->expected(2);
  compare->add_option("--format", config.format, "csv, txt, md or tex");
  compare->add_option("--min-years", config.min_year_pairs,
                      "least year pairs for a country to be listed");
  compare->add_option("--decimals", config.percent_decimals, "percent decimals")
      ->check(CLI::Range(0, 12));
  compare->add_option("--delimiter", config.delimiter, "auto, ';' or ','");
  compare->add_option("--out", config.out_path, "write here instead of stdout");
  compare->callback([&] { exit_code = cmd_compare(config); });

  auto* chart = app.add_subcommand("chart", "write one SVG line chart per country");
  chart->add_option("--indicators", config.indicators_path, "indicators artifact path");
  chart->add_option("--series", config.series, "rates or shares")
      ->check(CLI::IsMember({"rates", "shares"}));
  chart->add_option("--out-dir", config.out_dir, "directory for the charts");
  chart->add_option("--country", config.countries, "only these countries (repeatable)");
  chart->callback([&] { exit_code = cmd_chart(config); });

  auto* simulate = app.add_subcommand(
      "simulate", "generate a seeded synthetic economy and verify every identity");
  simulate->add_option("--seed", config.seed, "generator seed");
  simulate->add_option("--households", config.households, "household count")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--years", config.years, "year count")->check(CLI::Range(2, 100000));
  simulate->add_option("--tolerance", config.tolerance, "max relative residual")
      ->check(CLI::PositiveNumber);
  simulate->callback([&] { exit_code = cmd_simulate(config); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: cli: " << single_line(e.what()) << "\n";
    return 1;
  } catch (const capflow::IoFailure& e) {
    std::cerr << "error: " << e.code() << ": " << single_line(e.what()) << "\n";
    return 2;
  } catch (const capflow::Error& e) {
    std::cerr << "error: " << e.code() << ": " << single_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << single_line(e.what()) << "\n";
    return 2;
  }
  return exit_code;
}
