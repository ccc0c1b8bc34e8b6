#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/domain.hpp"
#include "capflow/errors.hpp"
#include "capflow/numeric.hpp"

namespace capflow {

// One parsed line of a long-format national-accounts export.
struct RawRecord {
  std::string country;
  std::string variable;
  int year = 0;
  double value = 0.0;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

// The panel components a variable code can feed. Default codes follow the
// World Inequality Database naming; remap() adapts other sources.
enum class PanelField {
  gov_consumption,        // mcongo
  household_consumption,  // mconhn
  net_income,             // mnninc
  labor_share,            // wlabsh (fraction of net income going to pay)
  wealth,                 // mnweal
  income_per_capita,      // anninc (local currency, pre-PPP)
  ppp_rate,               // xlcusp (local currency units per PPP dollar)
};

inline constexpr std::size_t kPanelFieldCount = 7;

inline constexpr std::array<std::string_view, kPanelFieldCount> kPanelFieldNames = {
    "gov_consumption", "household_consumption", "net_income", "labor_share",
    "wealth",          "income_per_capita",     "ppp_rate",
};

inline std::optional<PanelField> panel_field_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPanelFieldCount; ++i) {
    if (kPanelFieldNames[i] == name) return static_cast<PanelField>(i);
  }
  return std::nullopt;
}

class VariableMap {
 public:
  VariableMap()
      : codes_{"mcongo", "mconhn", "mnninc", "wlabsh",
               "mnweal", "anninc", "xlcusp"} {}

  void remap(PanelField field, std::string code) {
    if (code.empty()) throw InvalidConfig("variable map: empty code");
    codes_[static_cast<std::size_t>(field)] = std::move(code);
  }

  const std::string& code_for(PanelField field) const {
    return codes_[static_cast<std::size_t>(field)];
  }

  std::optional<PanelField> field_for(std::string_view code) const {
    for (std::size_t i = 0; i < codes_.size(); ++i) {
      if (codes_[i] == code) return static_cast<PanelField>(i);
    }
    return std::nullopt;
  }

  friend bool operator==(const VariableMap&, const VariableMap&) = default;

 private:
  std::array<std::string, kPanelFieldCount> codes_;
};

struct ParseConfig {
  char delimiter = '\0';  // '\0' auto-detects ';' versus ','
  VariableMap variables;
};

struct MalformedLine {
  std::size_t line_number = 0;  // 1-based, counting the header line
  std::string reason;
};

struct ParseDiagnostics {
  char delimiter = ';';
  std::size_t data_lines = 0;  // non-empty lines after the header
  std::size_t accepted = 0;
  std::vector<MalformedLine> malformed;
  std::map<std::string, std::size_t> unrecognized;  // variable code -> count

  std::size_t unrecognized_total() const {
    std::size_t total = 0;
    for (const auto& [code, count] : unrecognized) total += count;
    return total;
  }
};

struct ParseResult {
  std::vector<RawRecord> records;
  ParseDiagnostics diagnostics;
};

namespace detail {

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool getline_any(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace detail

// Parses a delimited long-format file with a header naming at least the
// country, variable, year and value columns, in any order; extra columns
// (percentile, age, population) are ignored. Well-formed records with a
// recognized variable code are returned; everything else lands in the
// diagnostics, nothing is silently dropped.
inline ParseResult parse_long_file(std::istream& input,
                                   const ParseConfig& config = {}) {
  if (!input.good()) throw IoFailure("parse_long_file: unreadable input stream");

  ParseResult result;
  ParseDiagnostics& diag = result.diagnostics;

  std::string line;
  std::size_t line_number = 0;
  do {
    if (!detail::getline_any(input, line)) {
      if (input.bad()) throw IoFailure("parse_long_file: read error");
      throw MalformedHeader("parse_long_file: empty input, no header");
    }
    ++line_number;
  } while (detail::trim(line).empty());

  const char delimiter =
      config.delimiter != '\0' ? config.delimiter
                               : (line.find(';') != std::string::npos ? ';' : ',');
  diag.delimiter = delimiter;

  int col_country = -1, col_variable = -1, col_year = -1, col_value = -1;
  {
    const auto fields = detail::split(line, delimiter);
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
      const std::string name = detail::lower(detail::trim(fields[i]));
      if (name == "country") col_country = i;
      else if (name == "variable") col_variable = i;
      else if (name == "year") col_year = i;
      else if (name == "value") col_value = i;
    }
    std::string missing;
    if (col_country < 0) missing += " country";
    if (col_variable < 0) missing += " variable";
    if (col_year < 0) missing += " year";
    if (col_value < 0) missing += " value";
    if (!missing.empty()) {
      throw MalformedHeader("parse_long_file: header lacks column(s):" + missing);
    }
  }
  const int needed = std::max({col_country, col_variable, col_year, col_value}) + 1;

  while (detail::getline_any(input, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    ++diag.data_lines;
    const auto malformed = [&](std::string reason) {
      diag.malformed.push_back({line_number, std::move(reason)});
    };

    const auto fields = detail::split(line, delimiter);
    if (static_cast<int>(fields.size()) < needed) {
      malformed("too few columns");
      continue;
    }
    RawRecord record;
    record.country = std::string(detail::trim(fields[col_country]));
    record.variable = std::string(detail::trim(fields[col_variable]));
    if (record.country.empty()) {
      malformed("empty country");
      continue;
    }
    if (record.variable.empty()) {
      malformed("empty variable");
      continue;
    }
    const auto year = parse_integer(detail::trim(fields[col_year]));
    if (!year) {
      malformed("unparseable year");
      continue;
    }
    record.year = static_cast<int>(*year);
    const auto value = parse_double(detail::trim(fields[col_value]));
    if (!value) {
      malformed("unparseable value");
      continue;
    }
    if (!std::isfinite(*value)) {
      malformed("non-finite value");
      continue;
    }
    record.value = *value;

    if (!config.variables.field_for(record.variable)) {
      ++diag.unrecognized[record.variable];
      continue;
    }
    ++diag.accepted;
    result.records.push_back(std::move(record));
  }
  if (input.bad()) throw IoFailure("parse_long_file: read error");
  return result;
}

// Pay from net national income and the labor share. The mixed-income
// adjustment is already inside the labor-share series, so it is not
// reapplied here. Shares outside [0,1] pass through with a warning.
inline double compute_pay(double net_income, double labor_share,
                          std::vector<std::string>* warnings = nullptr) {
  if (!std::isfinite(net_income) || !std::isfinite(labor_share)) {
    throw InvalidObservation("compute_pay: non-finite input");
  }
  if ((labor_share < 0.0 || labor_share > 1.0) && warnings) {
    warnings->push_back("labor share " + format_double(labor_share) +
                        " outside [0,1]; value passed through");
  }
  return labor_share * net_income;
}

inline double aggregate_consumption(double gov, double households) {
  if (!std::isfinite(gov) || !std::isfinite(households)) {
    throw InvalidObservation("aggregate_consumption: non-finite input");
  }
  return gov + households;
}

// Local-currency value to PPP dollars. Applied only to the per-capita income
// ranking key; the rates are unit-free so the level series stay untouched.
inline double ppp_convert(double value, double rate) {
  if (!std::isfinite(value) || !std::isfinite(rate)) {
    throw InvalidObservation("ppp_convert: non-finite input");
  }
  if (!(rate > 0.0)) {
    throw InvalidConversionFactor("ppp_convert: conversion factor must be positive");
  }
  return value / rate;
}

struct CountryCompleteness {
  int years_seen = 0;      // years with at least one recognized value
  int years_complete = 0;  // consumption, pay and capital all derivable
  int years_missing_consumption = 0;
  int years_missing_pay = 0;
  int years_missing_capital = 0;
  int years_rejected = 0;  // violated domain rules
  int years_without_income = 0;
};

struct AssembleDiagnostics {
  std::map<std::string, CountryCompleteness> per_country;
  std::size_t duplicate_values = 0;
  std::size_t conflicting_values = 0;
  std::vector<std::string> warnings;
};

using PanelMap = std::map<std::string, std::vector<PanelObservation>>;

// Buckets records by country-year, derives the panel components, and keeps
// every year for which consumption, pay and capital are all computable.
// Output depends only on the set of records, not on their order: duplicate
// values that agree are kept once; conflicting duplicates poison that cell.
inline PanelMap assemble_panels(std::span<const RawRecord> records,
                                const VariableMap& variables,
                                AssembleDiagnostics* diagnostics = nullptr) {
  struct Cell {
    std::optional<double> value;
    bool poisoned = false;
  };
  std::map<std::pair<std::string, int>, std::array<Cell, kPanelFieldCount>> grid;

  AssembleDiagnostics local;
  AssembleDiagnostics& diag = diagnostics ? *diagnostics : local;

  for (const auto& record : records) {
    const auto field = variables.field_for(record.variable);
    if (!field) continue;  // parse stage already tallied these
    Cell& cell = grid[{record.country, record.year}][static_cast<std::size_t>(*field)];
    if (cell.poisoned) continue;
    if (cell.value) {
      ++diag.duplicate_values;
      if (*cell.value != record.value) {
        cell.value.reset();
        cell.poisoned = true;
        ++diag.conflicting_values;
        diag.warnings.push_back(record.country + "/" + std::to_string(record.year) +
                                ": conflicting duplicate values for " + record.variable +
                                "; cell dropped");
      }
      continue;
    }
    cell.value = record.value;
  }

  PanelMap panels;
  for (const auto& [key, cells] : grid) {
    const auto& [country, year] = key;
    CountryCompleteness& completeness = diag.per_country[country];
    ++completeness.years_seen;

    const auto get = [&](PanelField field) {
      return cells[static_cast<std::size_t>(field)].value;
    };
    const auto gov = get(PanelField::gov_consumption);
    const auto hh = get(PanelField::household_consumption);
    const auto income = get(PanelField::net_income);
    const auto share = get(PanelField::labor_share);
    const auto wealth = get(PanelField::wealth);

    bool complete = true;
    if (!gov || !hh) {
      ++completeness.years_missing_consumption;
      complete = false;
    }
    if (!income || !share) {
      ++completeness.years_missing_pay;
      complete = false;
    }
    if (!wealth) {
      ++completeness.years_missing_capital;
      complete = false;
    }
    if (!complete) continue;

    PanelObservation obs;
    obs.country = country;
    obs.year = year;
    obs.consumption = aggregate_consumption(*gov, *hh);
    obs.pay = compute_pay(*income, *share, &diag.warnings);
    obs.capital = *wealth;

    const auto anninc = get(PanelField::income_per_capita);
    const auto ppp = get(PanelField::ppp_rate);
    if (anninc && ppp) {
      try {
        obs.income_per_capita = ppp_convert(*anninc, *ppp);
      } catch (const Error& e) {
        diag.warnings.push_back(country + "/" + std::to_string(year) +
                                ": income dropped (" + e.what() + ")");
      }
    }
    if (!obs.income_per_capita) ++completeness.years_without_income;

    try {
      validate(obs);
    } catch (const Error& e) {
      ++completeness.years_rejected;
      diag.warnings.push_back(std::string("observation rejected: ") + e.what());
      continue;
    }
    ++completeness.years_complete;
    panels[country].push_back(std::move(obs));
  }

  for (auto& [country, observations] : panels) {
    std::sort(observations.begin(), observations.end(),
              [](const auto& a, const auto& b) { return a.year < b.year; });
  }
  return panels;
}

}  // namespace capflow
