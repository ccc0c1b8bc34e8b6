#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "capflow/errors.hpp"

namespace capflow {

// One country-year of raw national-accounts aggregates. The currency unit is
// whatever the source series uses; every derived rate and share is a ratio,
// so units cancel. Values are immutable once a panel is assembled.
struct PanelObservation {
  std::string country;
  int year = 0;
  double consumption = 0.0;  // government plus household final consumption, per year
  double pay = 0.0;          // compensation of employees plus the mixed-income share, per year
  double capital = 0.0;      // market-value national wealth, stock at year end
  std::optional<double> income_per_capita;  // PPP-converted; used only to rank countries

  friend bool operator==(const PanelObservation&, const PanelObservation&) = default;
};

// Rejects observations that break the domain rules: non-finite values,
// capital <= 0, or negative consumption/pay.
inline void validate(const PanelObservation& obs) {
  const std::string where = obs.country + "/" + std::to_string(obs.year);
  if (!std::isfinite(obs.consumption) || !std::isfinite(obs.pay) ||
      !std::isfinite(obs.capital)) {
    throw InvalidObservation(where + ": non-finite value");
  }
  if (obs.income_per_capita && !std::isfinite(*obs.income_per_capita)) {
    throw InvalidObservation(where + ": non-finite income per capita");
  }
  if (obs.capital <= 0.0) {
    throw NonPositiveCapital(where + ": capital stock must be positive");
  }
  if (obs.consumption < 0.0) {
    throw InvalidObservation(where + ": negative consumption");
  }
  if (obs.pay < 0.0) {
    throw InvalidObservation(where + ": negative pay");
  }
}

// Derived flows and rates for one country-year, computed from the pair of
// observations at year-1 and year. Rates divide by beginning-of-period
// capital. Negative values are data, not errors.
struct IndicatorRow {
  std::string country;
  int year = 0;                 // the later year of the pair
  double cash_flow = 0.0;       // consumption - pay, per year
  double capital_change = 0.0;  // capital(year) - capital(year-1)
  double net_profit = 0.0;      // capital_change + cash_flow
  double cash_flow_rate = 0.0;  // cash_flow / capital(year-1)
  double growth_rate = 0.0;     // capital_change / capital(year-1)
  double return_rate = 0.0;     // growth_rate + cash_flow_rate
  double labor_share = 0.0;     // pay / consumption
  double capital_share = 0.0;   // (consumption - pay) / consumption

  friend bool operator==(const IndicatorRow&, const IndicatorRow&) = default;
};

// Period means of the annual rates for one country, plus the ranking key.
struct CountrySummary {
  std::string country;
  int year_pairs = 0;  // complete consecutive-year pairs used
  double avg_cash_flow_rate = 0.0;
  double avg_growth_rate = 0.0;
  double avg_return_rate = 0.0;
  double avg_labor_share = 0.0;
  double avg_capital_share = 0.0;
  std::optional<double> avg_income_per_capita;  // absent: ranked last, marked
  bool high_cash_flow = false;  // mean cash flow rate strictly above threshold

  friend bool operator==(const CountrySummary&, const CountrySummary&) = default;
};

// Directly researched cash-flow-rate components for one country, supplied by
// the user for side-by-side comparison. Weights are optional; when present
// they must be nonnegative and sum to one.
struct ReferenceSeries {
  std::string country;
  double dividend_rate = 0.0;
  double rental_rate = 0.0;
  double bill_rate = 0.0;
  double bond_rate = 0.0;
  std::optional<std::array<double, 4>> weights;

  friend bool operator==(const ReferenceSeries&, const ReferenceSeries&) = default;
};

inline void validate(const ReferenceSeries& ref) {
  for (double rate : {ref.dividend_rate, ref.rental_rate, ref.bill_rate, ref.bond_rate}) {
    if (!std::isfinite(rate)) {
      throw InvalidReference(ref.country + ": non-finite component rate");
    }
  }
  if (!ref.weights) return;
  double sum = 0.0;
  for (double w : *ref.weights) {
    if (!(w >= 0.0)) {
      throw InvalidReference(ref.country + ": negative component weight");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw InvalidReference(ref.country + ": component weights must sum to 1");
  }
}

}  // namespace capflow
