#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/domain.hpp"
#include "capflow/errors.hpp"
#include "capflow/indicators.hpp"
#include "capflow/ingestion.hpp"
#include "capflow/numeric.hpp"

namespace capflow {

// Intermediate artifacts are tab-delimited text with a schema-version line,
// so they diff cleanly and any language can consume them. Doubles are
// written in shortest round-trip form: serializing and reading back is
// lossless at full precision.

inline constexpr std::string_view kArtifactMissing = "NA";

namespace detail {

inline constexpr char kTab = '\t';

inline std::string schema_line(std::string_view kind) {
  return "# capflow " + std::string(kind) + " 1";
}

struct ArtifactReader {
  std::istream& input;
  std::string kind;
  std::size_t line_number = 0;
  std::string line;

  ArtifactReader(std::istream& in, std::string_view artifact_kind)
      : input(in), kind(artifact_kind) {
    if (!input.good()) throw IoFailure("read " + kind + ": unreadable input stream");
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw MalformedArtifact(kind + " artifact, line " + std::to_string(line_number) +
                            ": " + reason);
  }

  bool next_line() {
    if (!getline_any(input, line)) {
      if (input.bad()) throw IoFailure("read " + kind + ": read error");
      return false;
    }
    ++line_number;
    return true;
  }

  // schema line first, then the column header; returns the schema parameter
  // tokens (anything after the version number).
  std::vector<std::string> read_preamble(std::string_view expected_header) {
    if (!next_line()) throw MalformedHeader(kind + ": empty input, no schema line");
    const std::string expected_schema = schema_line(kind);
    std::vector<std::string> params;
    if (line.rfind(expected_schema, 0) != 0) {
      throw MalformedHeader(kind + ": schema line mismatch, expected \"" +
                            expected_schema + "\"");
    }
    std::istringstream rest(line.substr(expected_schema.size()));
    for (std::string token; rest >> token;) params.push_back(token);
    if (!next_line()) throw MalformedHeader(kind + ": missing column header");
    if (line != expected_header) fail("unexpected column header");
    return params;
  }

  std::vector<std::string_view> fields(std::size_t expected) {
    auto parts = split(line, kTab);
    if (parts.size() != expected) {
      fail("expected " + std::to_string(expected) + " columns, found " +
           std::to_string(parts.size()));
    }
    return parts;
  }

  double number(std::string_view text) const {
    const auto value = parse_double(text);
    if (!value) fail("unparseable number \"" + std::string(text) + "\"");
    return *value;
  }

  int year(std::string_view text) const {
    const auto value = parse_integer(text);
    if (!value) fail("unparseable year \"" + std::string(text) + "\"");
    return static_cast<int>(*value);
  }
};

inline std::string optional_number(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string(kArtifactMissing);
}

}  // namespace detail

inline void write_panel(std::ostream& out, const PanelMap& panels) {
  out << detail::schema_line("panel") << '\n';
  out << "country\tyear\tconsumption\tpay\tcapital\tincome_per_capita\n";
  for (const auto& [country, observations] : panels) {
    for (const auto& obs : observations) {
      out << country << '\t' << obs.year << '\t' << format_double(obs.consumption)
          << '\t' << format_double(obs.pay) << '\t' << format_double(obs.capital)
          << '\t' << detail::optional_number(obs.income_per_capita) << '\n';
    }
  }
}

inline PanelMap read_panel(std::istream& in) {
  detail::ArtifactReader reader(in, "panel");
  reader.read_preamble("country\tyear\tconsumption\tpay\tcapital\tincome_per_capita");
  PanelMap panels;
  while (reader.next_line()) {
    if (reader.line.empty()) continue;
    const auto fields = reader.fields(6);
    PanelObservation obs;
    obs.country = std::string(fields[0]);
    obs.year = reader.year(fields[1]);
    obs.consumption = reader.number(fields[2]);
    obs.pay = reader.number(fields[3]);
    obs.capital = reader.number(fields[4]);
    if (fields[5] != kArtifactMissing) obs.income_per_capita = reader.number(fields[5]);
    panels[obs.country].push_back(std::move(obs));
  }
  return panels;
}

inline void write_indicators(std::ostream& out, std::span<const IndicatorRow> rows) {
  out << detail::schema_line("indicators") << '\n';
  out << "country\tyear\tcash_flow\tcapital_change\tnet_profit\tcash_flow_rate\t"
         "growth_rate\treturn_rate\tlabor_share\tcapital_share\n";
  for (const auto& row : rows) {
    out << row.country << '\t' << row.year << '\t' << format_double(row.cash_flow)
        << '\t' << format_double(row.capital_change) << '\t'
        << format_double(row.net_profit) << '\t' << format_double(row.cash_flow_rate)
        << '\t' << format_double(row.growth_rate) << '\t'
        << format_double(row.return_rate) << '\t' << format_double(row.labor_share)
        << '\t' << format_double(row.capital_share) << '\n';
  }
}

inline std::vector<IndicatorRow> read_indicators(std::istream& in) {
  detail::ArtifactReader reader(in, "indicators");
  reader.read_preamble(
      "country\tyear\tcash_flow\tcapital_change\tnet_profit\tcash_flow_rate\t"
      "growth_rate\treturn_rate\tlabor_share\tcapital_share");
  std::vector<IndicatorRow> rows;
  while (reader.next_line()) {
    if (reader.line.empty()) continue;
    const auto fields = reader.fields(10);
    IndicatorRow row;
    row.country = std::string(fields[0]);
    row.year = reader.year(fields[1]);
    row.cash_flow = reader.number(fields[2]);
    row.capital_change = reader.number(fields[3]);
    row.net_profit = reader.number(fields[4]);
    row.cash_flow_rate = reader.number(fields[5]);
    row.growth_rate = reader.number(fields[6]);
    row.return_rate = reader.number(fields[7]);
    row.labor_share = reader.number(fields[8]);
    row.capital_share = reader.number(fields[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_summaries(std::ostream& out, std::span<const CountrySummary> summaries,
                            double threshold) {
  out << detail::schema_line("summaries") << " threshold=" << format_double(threshold)
      << '\n';
  out << "country\tyear_pairs\tcash_flow_rate\tgrowth_rate\treturn_rate\tlabor_share\t"
         "capital_share\tincome_per_capita\thigh_cash_flow\n";
  for (const auto& summary : summaries) {
    out << summary.country << '\t' << summary.year_pairs << '\t'
        << format_double(summary.avg_cash_flow_rate) << '\t'
        << format_double(summary.avg_growth_rate) << '\t'
        << format_double(summary.avg_return_rate) << '\t'
        << format_double(summary.avg_labor_share) << '\t'
        << format_double(summary.avg_capital_share) << '\t'
        << detail::optional_number(summary.avg_income_per_capita) << '\t'
        << (summary.high_cash_flow ? '1' : '0') << '\n';
  }
}

struct SummariesFile {
  std::vector<CountrySummary> summaries;
  double threshold = kHighCashFlowThreshold;
};

inline SummariesFile read_summaries(std::istream& in) {
  detail::ArtifactReader reader(in, "summaries");
  const auto params = reader.read_preamble(
      "country\tyear_pairs\tcash_flow_rate\tgrowth_rate\treturn_rate\tlabor_share\t"
      "capital_share\tincome_per_capita\thigh_cash_flow");
  SummariesFile file;
  for (const auto& param : params) {
    if (param.rfind("threshold=", 0) == 0) {
      const auto value = parse_double(std::string_view(param).substr(10));
      if (!value) throw MalformedHeader("summaries: unparseable threshold parameter");
      file.threshold = *value;
    }
  }
  while (reader.next_line()) {
    if (reader.line.empty()) continue;
    const auto fields = reader.fields(9);
    CountrySummary summary;
    summary.country = std::string(fields[0]);
    summary.year_pairs = reader.year(fields[1]);
    summary.avg_cash_flow_rate = reader.number(fields[2]);
    summary.avg_growth_rate = reader.number(fields[3]);
    summary.avg_return_rate = reader.number(fields[4]);
    summary.avg_labor_share = reader.number(fields[5]);
    summary.avg_capital_share = reader.number(fields[6]);
    if (fields[7] != kArtifactMissing) {
      summary.avg_income_per_capita = reader.number(fields[7]);
    }
    if (fields[8] == "1") summary.high_cash_flow = true;
    else if (fields[8] != "0") reader.fail("high_cash_flow flag must be 0 or 1");
    file.summaries.push_back(std::move(summary));
  }
  return file;
}

inline void write_stationary(std::ostream& out, std::span<const StationaryCheck> checks,
                             double epsilon) {
  out << detail::schema_line("stationary") << " epsilon=" << format_double(epsilon)
      << '\n';
  out << "country\tyear\tgrowth_rate\treturn_rate\tconsumption_rate\tnear_stationary\n";
  for (const auto& check : checks) {
    out << check.country << '\t' << check.year << '\t'
        << format_double(check.growth_rate) << '\t' << format_double(check.return_rate)
        << '\t' << format_double(check.consumption_rate) << '\t'
        << (check.near_stationary ? '1' : '0') << '\n';
  }
}

inline void write_reference(std::ostream& out, std::span<const ReferenceSeries> references) {
  bool any_weights = false;
  for (const auto& reference : references) {
    if (reference.weights) any_weights = true;
  }
  out << "country,dividend_rate,rental_rate,bill_rate,bond_rate";
  if (any_weights) out << ",w1,w2,w3,w4";
  out << '\n';
  for (const auto& reference : references) {
    out << reference.country << ',' << format_double(reference.dividend_rate) << ','
        << format_double(reference.rental_rate) << ','
        << format_double(reference.bill_rate) << ','
        << format_double(reference.bond_rate);
    if (any_weights) {
      const auto weights =
          reference.weights.value_or(std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
      for (double w : weights) out << ',' << format_double(w);
    }
    out << '\n';
  }
}

// Reference files are user-authored, so the reader mirrors the ingestion
// conventions: delimiter auto-detected between ';' and ',', header names
// case-insensitive, weight columns w1..w4 optional.
inline std::vector<ReferenceSeries> read_reference(std::istream& in,
                                                   char delimiter = '\0') {
  if (!in.good()) throw IoFailure("read_reference: unreadable input stream");
  std::string line;
  if (!detail::getline_any(in, line)) {
    throw MalformedHeader("read_reference: empty input, no header");
  }
  const char delim =
      delimiter != '\0' ? delimiter : (line.find(';') != std::string::npos ? ';' : ',');

  int col_country = -1;
  std::array<int, 4> col_rate = {-1, -1, -1, -1};
  std::array<int, 4> col_weight = {-1, -1, -1, -1};
  {
    const auto fields = detail::split(line, delim);
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
      const std::string name = detail::lower(detail::trim(fields[i]));
      if (name == "country") col_country = i;
      else if (name == "dividend_rate") col_rate[0] = i;
      else if (name == "rental_rate") col_rate[1] = i;
      else if (name == "bill_rate") col_rate[2] = i;
      else if (name == "bond_rate") col_rate[3] = i;
      else if (name == "w1") col_weight[0] = i;
      else if (name == "w2") col_weight[1] = i;
      else if (name == "w3") col_weight[2] = i;
      else if (name == "w4") col_weight[3] = i;
    }
    if (col_country < 0 || col_rate[0] < 0 || col_rate[1] < 0 || col_rate[2] < 0 ||
        col_rate[3] < 0) {
      throw MalformedHeader(
          "read_reference: header needs country, dividend_rate, rental_rate, "
          "bill_rate, bond_rate");
    }
    const bool any_weight = col_weight[0] >= 0 || col_weight[1] >= 0 ||
                            col_weight[2] >= 0 || col_weight[3] >= 0;
    const bool all_weights = col_weight[0] >= 0 && col_weight[1] >= 0 &&
                             col_weight[2] >= 0 && col_weight[3] >= 0;
    if (any_weight && !all_weights) {
      throw MalformedHeader("read_reference: weight columns must be all of w1..w4");
    }
  }

  std::vector<ReferenceSeries> references;
  std::size_t line_number = 1;
  while (detail::getline_any(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, delim);
    const auto cell = [&](int column) -> std::string_view {
      if (column < 0 || column >= static_cast<int>(fields.size())) {
        throw InvalidReference("read_reference: line " + std::to_string(line_number) +
                               ": too few columns");
      }
      return detail::trim(fields[static_cast<std::size_t>(column)]);
    };
    const auto number = [&](int column) {
      const auto value = parse_double(cell(column));
      if (!value) {
        throw InvalidReference("read_reference: line " + std::to_string(line_number) +
                               ": unparseable number");
      }
      return *value;
    };
    ReferenceSeries reference;
    reference.country = std::string(cell(col_country));
    if (reference.country.empty()) {
      throw InvalidReference("read_reference: line " + std::to_string(line_number) +
                             ": empty country");
    }
    reference.dividend_rate = number(col_rate[0]);
    reference.rental_rate = number(col_rate[1]);
    reference.bill_rate = number(col_rate[2]);
    reference.bond_rate = number(col_rate[3]);
    if (col_weight[0] >= 0) {
      reference.weights = std::array<double, 4>{number(col_weight[0]), number(col_weight[1]),
                                                number(col_weight[2]), number(col_weight[3])};
    }
    validate(reference);
    references.push_back(std::move(reference));
  }
  if (in.bad()) throw IoFailure("read_reference: read error");
  return references;
}

// Writes through a temp file in the target directory and renames into
// place, so readers never observe a half-written artifact.
inline void write_text_atomic(const std::filesystem::path& target,
                              std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path parent = target.parent_path();
  if (!parent.empty()) {
    fs::create_directories(parent, ec);
    if (ec) throw IoFailure("cannot create directory " + parent.string());
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + temp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(temp, ec);
      throw IoFailure("write failed for " + temp.string());
    }
  }
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoFailure("cannot move " + temp.string() + " into place");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoFailure("read error on " + path.string());
  return buffer.str();
}

}  // namespace capflow
