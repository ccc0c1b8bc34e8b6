#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "capflow/domain.hpp"
#include "capflow/errors.hpp"
#include "capflow/numeric.hpp"

namespace capflow {

inline constexpr double kHighCashFlowThreshold = 0.10;  // strict: exactly 10% does not flag
inline constexpr double kStationaryEpsilon = 0.005;     // |growth rate| at or below this is near-stationary

// Net flow of value passed from assets to their owners during the year,
// measured collectively as consumption less pay. Negative values mean pay
// exceeded consumption; downstream flags them, they are not errors.
inline double cash_flow(double consumption, double pay) {
  if (!std::isfinite(consumption) || !std::isfinite(pay)) {
    throw InvalidObservation("cash_flow: non-finite input");
  }
  return consumption - pay;
}

// Net profit at market value: capital change plus cash flow. Negative in
// years where the capital loss outweighs the cash flow (recessions, shocks).
inline double net_profit(double capital_change, double consumption, double pay) {
  if (!std::isfinite(capital_change)) {
    throw InvalidObservation("net_profit: non-finite capital change");
  }
  return capital_change + cash_flow(consumption, pay);
}

struct RateTriple {
  double cash_flow_rate = 0.0;
  double growth_rate = 0.0;
  double return_rate = 0.0;

  friend bool operator==(const RateTriple&, const RateTriple&) = default;
};

// Annual rates against beginning-of-period capital. The return rate is the
// sum of the other two by construction.
inline RateTriple rates(double capital_prev, double capital_change, double flow) {
  if (!(capital_prev > 0.0)) {
    throw NonPositiveCapital("rates: beginning-of-period capital must be positive");
  }
  if (!std::isfinite(capital_change) || !std::isfinite(flow)) {
    throw InvalidObservation("rates: non-finite input");
  }
  RateTriple out;
  out.cash_flow_rate = flow / capital_prev;
  out.growth_rate = capital_change / capital_prev;
  out.return_rate = out.growth_rate + out.cash_flow_rate;
  return out;
}

struct ShareSplit {
  double labor = 0.0;
  double capital = 0.0;

  friend bool operator==(const ShareSplit&, const ShareSplit&) = default;
};

// Factor shares in consumption. Out-of-range results (pay above consumption)
// pass through untouched; clamping would hide the measurement diagnostic.
inline ShareSplit consumption_shares(double consumption, double pay) {
  if (!(consumption > 0.0)) {
    throw NonPositiveConsumption("consumption_shares: consumption must be positive");
  }
  if (!std::isfinite(pay)) {
    throw InvalidObservation("consumption_shares: non-finite pay");
  }
  return {pay / consumption, (consumption - pay) / consumption};
}

struct DerivePanelDiagnostics {
  std::vector<std::string> warnings;
};

// Turns one country's observations into indicator rows, one per pair of
// consecutive years present in the data. Gaps are skipped, never
// interpolated: a change in capital across a gap would conflate several
// years' growth. Input order does not matter; duplicate years are an error.
inline std::vector<IndicatorRow> derive_panel(
    std::span<const PanelObservation> observations,
    DerivePanelDiagnostics* diagnostics = nullptr) {
  const auto warn = [&](std::string message) {
    if (diagnostics) diagnostics->warnings.push_back(std::move(message));
  };
  if (observations.empty()) {
    warn("derive_panel: no observations supplied");
    return {};
  }

  std::vector<const PanelObservation*> ordered;
  ordered.reserve(observations.size());
  for (const auto& obs : observations) ordered.push_back(&obs);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->year < b->year; });

  const std::string& country = ordered.front()->country;
  for (const auto* obs : ordered) {
    if (obs->country != country) {
      throw InvalidObservation("derive_panel: observations span more than one country");
    }
    validate(*obs);
  }
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->year == ordered[i - 1]->year) {
      throw DuplicateYear(country + ": duplicate year " + std::to_string(ordered[i]->year));
    }
  }

  std::vector<IndicatorRow> rows;
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const PanelObservation& prev = *ordered[i - 1];
    const PanelObservation& cur = *ordered[i];
    if (cur.year != prev.year + 1) continue;  // gap
    if (!(cur.consumption > 0.0)) {
      warn(country + "/" + std::to_string(cur.year) +
           ": zero consumption, shares undefined; row skipped");
      continue;
    }
    IndicatorRow row;
    row.country = country;
    row.year = cur.year;
    row.cash_flow = cash_flow(cur.consumption, cur.pay);
    row.capital_change = cur.capital - prev.capital;
    row.net_profit = net_profit(row.capital_change, cur.consumption, cur.pay);
    const RateTriple triple = rates(prev.capital, row.capital_change, row.cash_flow);
    row.cash_flow_rate = triple.cash_flow_rate;
    row.growth_rate = triple.growth_rate;
    row.return_rate = triple.return_rate;
    const ShareSplit shares = consumption_shares(cur.consumption, cur.pay);
    row.labor_share = shares.labor;
    row.capital_share = shares.capital;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    warn(country + ": fewer than two usable consecutive years, nothing derived");
  }
  return rows;
}

// Period summary for one country: unweighted arithmetic means of the annual
// ratios. Income per capita is averaged over the years that participate in
// at least one consecutive pair, so the ranking key covers the same span as
// the rates.
inline CountrySummary summarize(std::span<const IndicatorRow> rows,
                                std::span<const PanelObservation> observations,
                                double threshold = kHighCashFlowThreshold) {
  if (rows.empty()) {
    throw EmptyDerivation("summarize: no indicator rows");
  }

  std::vector<const IndicatorRow*> ordered;
  ordered.reserve(rows.size());
  for (const auto& row : rows) ordered.push_back(&row);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->year < b->year; });

  const std::string& country = ordered.front()->country;
  std::set<int> used_years;
  double sum_f = 0.0, sum_g = 0.0, sum_r = 0.0, sum_labor = 0.0, sum_capital = 0.0;
  for (const auto* row : ordered) {
    if (row->country != country) {
      throw InvalidObservation("summarize: rows span more than one country");
    }
    sum_f += row->cash_flow_rate;
    sum_g += row->growth_rate;
    sum_r += row->return_rate;
    sum_labor += row->labor_share;
    sum_capital += row->capital_share;
    used_years.insert(row->year - 1);
    used_years.insert(row->year);
  }

  const double n = static_cast<double>(ordered.size());
  CountrySummary summary;
  summary.country = country;
  summary.year_pairs = static_cast<int>(ordered.size());
  summary.avg_cash_flow_rate = sum_f / n;
  summary.avg_growth_rate = sum_g / n;
  summary.avg_return_rate = sum_r / n;
  summary.avg_labor_share = sum_labor / n;
  summary.avg_capital_share = sum_capital / n;

  std::vector<const PanelObservation*> obs_ordered;
  for (const auto& obs : observations) {
    if (obs.country == country && used_years.count(obs.year) && obs.income_per_capita) {
      obs_ordered.push_back(&obs);
    }
  }
  std::sort(obs_ordered.begin(), obs_ordered.end(),
            [](const auto* a, const auto* b) { return a->year < b->year; });
  if (!obs_ordered.empty()) {
    double sum_income = 0.0;
    for (const auto* obs : obs_ordered) sum_income += *obs->income_per_capita;
    summary.avg_income_per_capita = sum_income / static_cast<double>(obs_ordered.size());
  }

  summary.high_cash_flow = summary.avg_cash_flow_rate > threshold;
  return summary;
}

// Per-row check of the classical stationary-state relation. The consumption
// rate (consumption afforded from net profit, per unit capital) coincides
// with the cash flow rate collectively, so return less consumption rate is
// the growth rate on every row, and the two rates agree wherever growth
// vanishes.
struct StationaryCheck {
  std::string country;
  int year = 0;
  double growth_rate = 0.0;
  double return_rate = 0.0;
  double consumption_rate = 0.0;
  bool near_stationary = false;

  friend bool operator==(const StationaryCheck&, const StationaryCheck&) = default;
};

inline std::vector<StationaryCheck> stationary_check(
    std::span<const IndicatorRow> rows, double epsilon = kStationaryEpsilon) {
  std::vector<StationaryCheck> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    StationaryCheck check;
    check.country = row.country;
    check.year = row.year;
    check.growth_rate = row.growth_rate;
    check.return_rate = row.return_rate;
    check.consumption_rate = row.cash_flow_rate;
    check.near_stationary = std::fabs(row.growth_rate) <= epsilon;
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace capflow
