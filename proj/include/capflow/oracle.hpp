#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capflow/errors.hpp"
#include "capflow/indicators.hpp"
#include "capflow/numeric.hpp"

namespace capflow {

// One household's flows for one year. The generator constructs consumption
// so that pay plus cash flow equals consumption plus net transfer.
struct HouseholdLedger {
  int household = 0;
  double pay = 0.0;
  double cash_flow = 0.0;     // any sign
  double consumption = 0.0;
  double net_transfer = 0.0;  // paid out less received; nets to zero collectively

  friend bool operator==(const HouseholdLedger&, const HouseholdLedger&) = default;
};

// Aggregate human-capital account for one year. The human-capital stock is
// an opaque positive level; only its change is constrained, as invested
// consumption plus self-invested work less human depreciation.
struct HumanCapitalAccount {
  double human_capital = 0.0;         // present-value stock, end of year
  double invested_consumption = 0.0;  // consumption that builds human capital
  double pure_consumption = 0.0;      // consumption exhausted satisfying tastes
  double self_work = 0.0;             // unpaid work that grows human capital
  double depreciation = 0.0;          // erosion of human capital
  double pay = 0.0;

  friend bool operator==(const HumanCapitalAccount&, const HumanCapitalAccount&) = default;
};

// One simulated year of a closed economy: stocks at year end, the previous
// year's stocks, the household ledgers, and the aggregate flows.
struct EconomyState {
  int year = 0;
  double capital = 0.0;
  double capital_prev = 0.0;
  double human = 0.0;
  double human_prev = 0.0;
  double value = 0.0;  // human + capital

  std::vector<HouseholdLedger> households;

  double consumption = 0.0;           // sum of household consumption
  double pay = 0.0;                   // sum of household pay
  double cash_flow = 0.0;             // sum of household cash flow
  double capital_change = 0.0;
  double human_change = 0.0;
  double self_work = 0.0;
  double human_depreciation = 0.0;
  double invested_consumption = 0.0;
  double pure_consumption = 0.0;
  double human_cash_flow = 0.0;       // pay - invested_consumption

  friend bool operator==(const EconomyState&, const EconomyState&) = default;

  HumanCapitalAccount human_account() const {
    return {human, invested_consumption, pure_consumption,
            self_work, human_depreciation, pay};
  }
};

// Draw ranges for the generator. Per-household flows are absolute amounts;
// the remaining flows are fractions of the year's aggregates, which keeps
// every invariant satisfiable for any household count.
struct MagnitudeConfig {
  double pay_low = 40.0;
  double pay_high = 160.0;
  double flow_low = -15.0;  // household cash flow; negative values are normal
  double flow_high = 45.0;
  double transfer_spread = 10.0;  // transfers drawn in [-spread, spread], then centered
  double growth_low = -0.08;      // capital growth rate draw; must stay above -1
  double growth_high = 0.12;
  double capital_multiple_low = 4.0;  // initial capital relative to aggregate pay scale
  double capital_multiple_high = 8.0;
  double human_multiple_low = 2.0;  // initial human capital relative to the same scale
  double human_multiple_high = 4.0;
  double invested_share_low = 0.05;  // invested consumption as a share of consumption
  double invested_share_high = 0.25;
  double self_work_share_high = 0.12;    // self-invested work, up to this share of consumption
  double depreciation_share_high = 0.12; // human depreciation, same basis
  int max_retries = 64;
};

namespace detail {

// rng() >> 11 keeps 53 uniform bits: the draw sequence is fixed by the seed
// alone, independent of the standard library's distribution implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double low, double high) {
  return low + uniform_unit(rng) * (high - low);
}

inline void check_config(const MagnitudeConfig& config) {
  if (config.pay_low < 0.0 || config.pay_high < config.pay_low) {
    throw InvalidConfig("generate_economy: pay range invalid");
  }
  if (config.flow_high < config.flow_low) {
    throw InvalidConfig("generate_economy: cash flow range invalid");
  }
  if (config.transfer_spread < 0.0) {
    throw InvalidConfig("generate_economy: transfer spread must be nonnegative");
  }
  if (config.growth_low <= -1.0 || config.growth_high < config.growth_low) {
    throw InvalidConfig("generate_economy: growth range invalid");
  }
  if (config.capital_multiple_low <= 0.0 ||
      config.capital_multiple_high < config.capital_multiple_low ||
      config.human_multiple_low <= 0.0 ||
      config.human_multiple_high < config.human_multiple_low) {
    throw InvalidConfig("generate_economy: stock multiples invalid");
  }
  if (config.invested_share_low < 0.0 || config.invested_share_high > 1.0 ||
      config.invested_share_high < config.invested_share_low) {
    throw InvalidConfig("generate_economy: invested share range invalid");
  }
  if (config.self_work_share_high < 0.0 || config.depreciation_share_high < 0.0) {
    throw InvalidConfig("generate_economy: flow share bounds invalid");
  }
  if (config.max_retries < 1) {
    throw InvalidConfig("generate_economy: max_retries must be at least 1");
  }
}

}  // namespace detail

// Seeded synthetic economy. Every emitted state satisfies the bookkeeping
// identities by construction; draws that would break a sign constraint
// (negative consumption, exhausted human capital) are resampled, and the
// generator gives up only after max_retries failed attempts for one year.
inline std::vector<EconomyState> generate_economy(std::uint64_t seed,
                                                  int n_households, int n_years,
                                                  const MagnitudeConfig& config = {}) {
  if (n_households < 1) {
    throw InvalidConfig("generate_economy: need at least one household");
  }
  if (n_years < 2) {
    throw InvalidConfig("generate_economy: need at least two years");
  }
  detail::check_config(config);

  std::mt19937_64 rng(seed);
  const double pay_scale =
      std::max(static_cast<double>(n_households) * 0.5 * (config.pay_low + config.pay_high),
               static_cast<double>(n_households));
  double capital_prev = detail::uniform_range(rng, config.capital_multiple_low,
                                              config.capital_multiple_high) *
                        pay_scale;
  double human_prev = detail::uniform_range(rng, config.human_multiple_low,
                                            config.human_multiple_high) *
                      pay_scale;
  const double human_floor = 0.01 * human_prev;

  std::vector<EconomyState> states;
  states.reserve(static_cast<std::size_t>(n_years));

  for (int year = 1; year <= n_years; ++year) {
    bool built = false;
    for (int attempt = 0; attempt < config.max_retries && !built; ++attempt) {
      std::vector<HouseholdLedger> ledgers(static_cast<std::size_t>(n_households));
      std::vector<double> raw_transfers(ledgers.size());
      for (std::size_t i = 0; i < ledgers.size(); ++i) {
        ledgers[i].household = static_cast<int>(i);
        ledgers[i].pay = detail::uniform_range(rng, config.pay_low, config.pay_high);
        ledgers[i].cash_flow = detail::uniform_range(rng, config.flow_low, config.flow_high);
        raw_transfers[i] =
            detail::uniform_range(rng, -config.transfer_spread, config.transfer_spread);
      }
      double transfer_sum = 0.0;
      for (double t : raw_transfers) transfer_sum += t;
      const double transfer_mean = transfer_sum / static_cast<double>(ledgers.size());
      double balance = 0.0;
      for (std::size_t i = 0; i + 1 < ledgers.size(); ++i) {
        ledgers[i].net_transfer = raw_transfers[i] - transfer_mean;
        balance += ledgers[i].net_transfer;
      }
      ledgers.back().net_transfer = -balance;  // exact zero sum in the summation order

      bool feasible = true;
      for (auto& ledger : ledgers) {
        ledger.consumption = ledger.pay + ledger.cash_flow - ledger.net_transfer;
        if (ledger.consumption < 0.0) {
          feasible = false;
          break;
        }
      }
      const double growth_rate =
          detail::uniform_range(rng, config.growth_low, config.growth_high);
      const double invested_share =
          detail::uniform_range(rng, config.invested_share_low, config.invested_share_high);
      const double self_work_share =
          detail::uniform_range(rng, 0.0, config.self_work_share_high);
      const double depreciation_share =
          detail::uniform_range(rng, 0.0, config.depreciation_share_high);
      if (!feasible) continue;

      double consumption = 0.0, pay = 0.0, cash_flow = 0.0;
      for (const auto& ledger : ledgers) {
        consumption += ledger.consumption;
        pay += ledger.pay;
        cash_flow += ledger.cash_flow;
      }

      EconomyState state;
      state.year = year;
      state.capital_prev = capital_prev;
      state.capital_change = growth_rate * capital_prev;
      state.capital = capital_prev + state.capital_change;
      state.consumption = consumption;
      state.pay = pay;
      state.cash_flow = cash_flow;
      state.invested_consumption = invested_share * consumption;
      state.pure_consumption = consumption - state.invested_consumption;
      if (state.invested_consumption < 0.0 || state.pure_consumption < 0.0) continue;
      state.self_work = self_work_share * consumption;
      state.human_depreciation = depreciation_share * consumption;
      state.human_change =
          state.invested_consumption + state.self_work - state.human_depreciation;
      state.human_prev = human_prev;
      state.human = human_prev + state.human_change;
      if (!(state.human > human_floor)) continue;
      state.value = state.human + state.capital;
      state.human_cash_flow = pay - state.invested_consumption;
      state.households = std::move(ledgers);

      capital_prev = state.capital;
      human_prev = state.human;
      states.push_back(std::move(state));
      built = true;
    }
    if (!built) {
      throw GeneratorInfeasible("generate_economy: no feasible draw for year " +
                                std::to_string(year) + " within the retry budget");
    }
  }
  return states;
}

struct CollectiveFlows {
  double consumption = 0.0;
  double pay = 0.0;
  double cash_flow = 0.0;
};

// Sums household ledgers into collective flows. Transfers must net out: the
// tolerance is 1e-9 of total consumption, absolute.
inline CollectiveFlows aggregate_households(std::span<const HouseholdLedger> ledgers) {
  CollectiveFlows flows;
  double transfers = 0.0;
  for (const auto& ledger : ledgers) {
    flows.consumption += ledger.consumption;
    flows.pay += ledger.pay;
    flows.cash_flow += ledger.cash_flow;
    transfers += ledger.net_transfer;
  }
  if (std::fabs(transfers) > 1e-9 * flows.consumption) {
    throw TransferImbalance("aggregate_households: transfers sum to " +
                            format_double(transfers) + ", not zero");
  }
  return flows;
}

// Net output of human capital, computed two ways: growth plus human cash
// flow, and pay plus self-invested work less depreciation. The account must
// be internally consistent and both routes must agree.
inline double work_output(const HumanCapitalAccount& account, double human_change) {
  const double implied_change =
      account.invested_consumption + account.self_work - account.depreciation;
  const double change_scale = std::fabs(account.invested_consumption) +
                              std::fabs(account.self_work) +
                              std::fabs(account.depreciation);
  if (identity_residual(human_change, implied_change, change_scale) > 1e-12) {
    throw IdentityViolation("human_capital_growth",
                            "human-capital change does not match its flows");
  }
  const double via_growth = human_change + (account.pay - account.invested_consumption);
  const double via_pay = account.pay + account.self_work - account.depreciation;
  const double scale = std::fabs(account.pay) + std::fabs(account.self_work) +
                       std::fabs(account.depreciation) + std::fabs(human_change);
  if (identity_residual(via_growth, via_pay, scale) > 1e-12) {
    throw IdentityViolation("work_two_routes", "the two work computations disagree");
  }
  return via_pay;
}

struct NetOutputPair {
  double from_uses = 0.0;            // consumption + self work - depreciation + capital change
  double from_factor_incomes = 0.0;  // pay + self work - depreciation + net profit
};

// Net output from the uses side and from the factor-income side. For a
// consistent state the two agree, which is the collective confirmation that
// consumption plus capital growth equals pay plus net profit.
inline NetOutputPair net_output_two_ways(const EconomyState& state) {
  const double profit = net_profit(state.capital_change, state.consumption, state.pay);
  NetOutputPair output;
  output.from_uses = state.consumption + state.self_work - state.human_depreciation +
                     state.capital_change;
  output.from_factor_incomes =
      state.pay + state.self_work - state.human_depreciation + profit;
  const double scale = std::fabs(state.consumption) + std::fabs(state.pay) +
                       std::fabs(state.self_work) + std::fabs(state.human_depreciation) +
                       std::fabs(state.capital_change) + std::fabs(profit);
  if (identity_residual(output.from_uses, output.from_factor_incomes, scale) > 1e-12) {
    throw IdentityViolation("uses_equal_incomes",
                            "net output differs between the uses and income routes");
  }
  return output;
}

struct FactorShares {
  double work_share = 0.0;
  double profit_share = 0.0;
};

// Factor shares in net income. The denominator is net output from the uses
// side; the shares sum to one.
inline FactorShares income_factor_shares(const EconomyState& state) {
  const double output = state.consumption + state.capital_change + state.self_work -
                        state.human_depreciation;
  if (output == 0.0) {
    throw DegenerateEconomy("income_factor_shares: zero net output");
  }
  const double work = state.pay + state.self_work - state.human_depreciation;
  const double profit = state.capital_change + state.consumption - state.pay;
  return {work / output, profit / output};
}

struct IdentityCheck {
  std::string label;
  std::string relation;
  bool pass = true;
  double max_residual = 0.0;
};

struct IdentityReport {
  double tolerance = 1e-9;
  std::vector<IdentityCheck> checks;

  bool all_pass() const {
    for (const auto& check : checks) {
      if (!check.pass) return false;
    }
    return true;
  }

  const IdentityCheck* find(std::string_view label) const {
    for (const auto& check : checks) {
      if (check.label == label) return &check;
    }
    return nullptr;
  }

  std::size_t failed_count() const {
    std::size_t failed = 0;
    for (const auto& check : checks) {
      if (!check.pass) ++failed;
    }
    return failed;
  }

  // One line per identity: label, pass/FAIL, max residual.
  std::string to_text() const {
    std::string out;
    std::size_t width = 0;
    for (const auto& check : checks) width = std::max(width, check.label.size());
    for (const auto& check : checks) {
      char residual[32];
      std::snprintf(residual, sizeof residual, "%.3e", check.max_residual);
      out += check.label;
      out.append(width - check.label.size() + 2, ' ');
      out += check.pass ? "pass" : "FAIL";
      out += "  max residual ";
      out += residual;
      out += "  (";
      out += check.relation;
      out += ")\n";
    }
    return out;
  }
};

// Evaluates every bookkeeping identity over a simulated economy and reports
// the worst residual per identity. Residuals are relative to the magnitude
// of the participating terms, so the verdicts are invariant under rescaling
// the whole economy.
inline IdentityReport verify_all_identities(std::span<const EconomyState> economy,
                                            double tolerance = 1e-9) {
  struct Accumulator {
    const char* label;
    const char* relation;
    double max_residual = 0.0;

    void feed(double lhs, double rhs, double scale) {
      max_residual = std::max(max_residual, identity_residual(lhs, rhs, scale));
    }
  };

  Accumulator household_budget{"household_budget",
                               "pay + cash flow = consumption + net transfer"};
  Accumulator collective_budget{"collective_budget",
                                "transfers net to zero and consumption - pay = cash flow"};
  Accumulator value_composition{"value_composition", "value = human + capital"};
  Accumulator capital_stock_flow{"capital_stock_flow",
                                 "capital change matches the capital levels"};
  Accumulator human_stock_flow{"human_stock_flow",
                               "human-capital change matches the human-capital levels"};
  Accumulator output_total_return{"output_total_return",
                                  "net output = value change + pure consumption"};
  Accumulator human_cash_flow{"human_cash_flow",
                              "human cash flow = pay - invested consumption"};
  Accumulator human_capital_growth{
      "human_capital_growth",
      "human-capital change = invested consumption + self work - depreciation"};
  Accumulator work_two_routes{"work_two_routes",
                              "work via growth equals work via pay"};
  Accumulator consumption_split{"consumption_split",
                                "invested + pure consumption = consumption"};
  Accumulator output_uses{"output_uses",
                          "net output via uses equals its expanded form"};
  Accumulator output_factor_sum{"output_factor_sum", "net output = work + net profit"};
  Accumulator output_factor_incomes{
      "output_factor_incomes", "net output = pay + self work - depreciation + net profit"};
  Accumulator uses_equal_incomes{
      "uses_equal_incomes",
      "consumption + capital change + net adjustments = pay + net profit + net adjustments"};
  Accumulator accounts_identity{"accounts_identity",
                                "consumption + capital change = pay + net profit"};
  Accumulator income_shares_sum{"income_shares_sum",
                                "work share + profit share = 1"};

  const EconomyState* previous = nullptr;
  for (const auto& state : economy) {
    double sum_consumption = 0.0, sum_pay = 0.0, sum_flow = 0.0, sum_transfer = 0.0;
    for (const auto& ledger : state.households) {
      const double lhs = ledger.pay + ledger.cash_flow;
      const double rhs = ledger.consumption + ledger.net_transfer;
      const double scale = std::fabs(ledger.pay) + std::fabs(ledger.cash_flow) +
                           std::fabs(ledger.consumption) + std::fabs(ledger.net_transfer);
      household_budget.feed(lhs, rhs, scale);
      sum_consumption += ledger.consumption;
      sum_pay += ledger.pay;
      sum_flow += ledger.cash_flow;
      sum_transfer += ledger.net_transfer;
    }
    collective_budget.feed(sum_transfer, 0.0, std::fabs(state.consumption));
    collective_budget.feed(sum_consumption, state.consumption, std::fabs(state.consumption));
    collective_budget.feed(sum_pay, state.pay, std::fabs(state.pay));
    collective_budget.feed(sum_flow, state.cash_flow, std::fabs(state.cash_flow));
    collective_budget.feed(state.consumption - state.pay, state.cash_flow,
                           std::fabs(state.consumption) + std::fabs(state.pay) +
                               std::fabs(state.cash_flow));

    value_composition.feed(state.value, state.human + state.capital,
                           std::fabs(state.human) + std::fabs(state.capital));

    const double capital_scale = std::fabs(state.capital) + std::fabs(state.capital_prev);
    capital_stock_flow.feed(state.capital - state.capital_prev, state.capital_change,
                            capital_scale);
    const double human_scale = std::fabs(state.human) + std::fabs(state.human_prev);
    human_stock_flow.feed(state.human - state.human_prev, state.human_change, human_scale);
    if (previous) {
      capital_stock_flow.feed(state.capital_prev, previous->capital, capital_scale);
      human_stock_flow.feed(state.human_prev, previous->human, human_scale);
    }
    previous = &state;

    const double profit = state.capital_change + state.consumption - state.pay;
    const double uses = state.consumption + state.self_work - state.human_depreciation +
                        state.capital_change;
    const double flow_scale = std::fabs(state.consumption) + std::fabs(state.pay) +
                              std::fabs(state.self_work) +
                              std::fabs(state.human_depreciation) +
                              std::fabs(state.capital_change);

    output_total_return.feed((state.human_change + state.capital_change) +
                                 state.pure_consumption,
                             uses, flow_scale + std::fabs(state.human_change) +
                                       std::fabs(state.pure_consumption));
    human_cash_flow.feed(state.human_cash_flow, state.pay - state.invested_consumption,
                         std::fabs(state.pay) + std::fabs(state.invested_consumption));
    human_capital_growth.feed(
        state.human_change,
        state.invested_consumption + state.self_work - state.human_depreciation,
        std::fabs(state.invested_consumption) + std::fabs(state.self_work) +
            std::fabs(state.human_depreciation));
    work_two_routes.feed(state.human_change + state.human_cash_flow,
                         state.pay + state.self_work - state.human_depreciation,
                         std::fabs(state.human_change) + std::fabs(state.human_cash_flow) +
                             std::fabs(state.pay) + std::fabs(state.self_work) +
                             std::fabs(state.human_depreciation));
    consumption_split.feed(state.invested_consumption + state.pure_consumption,
                           state.consumption,
                           std::fabs(state.invested_consumption) +
                               std::fabs(state.pure_consumption) +
                               std::fabs(state.consumption));
    output_uses.feed(uses,
                     state.invested_consumption + state.self_work -
                         state.human_depreciation + state.capital_change +
                         state.pure_consumption,
                     flow_scale + std::fabs(state.invested_consumption) +
                         std::fabs(state.pure_consumption));
    output_factor_sum.feed(uses, (state.human_change + state.human_cash_flow) + profit,
                           flow_scale + std::fabs(state.human_change) +
                               std::fabs(state.human_cash_flow) + std::fabs(profit));
    output_factor_incomes.feed(
        uses, state.pay + state.self_work - state.human_depreciation + profit,
        flow_scale + std::fabs(profit));
    uses_equal_incomes.feed(
        state.consumption + state.capital_change + state.self_work -
            state.human_depreciation,
        state.pay + profit + state.self_work - state.human_depreciation,
        flow_scale + std::fabs(profit));
    accounts_identity.feed(state.consumption + state.capital_change, state.pay + profit,
                           std::fabs(state.consumption) + std::fabs(state.capital_change) +
                               std::fabs(state.pay) + std::fabs(profit));

    const double output = state.consumption + state.capital_change + state.self_work -
                          state.human_depreciation;
    if (output == 0.0) {
      income_shares_sum.feed(0.0, 1.0, 0.0);  // degenerate: forced failure
    } else {
      const double work = state.pay + state.self_work - state.human_depreciation;
      income_shares_sum.feed(work / output + profit / output, 1.0, 1.0);
    }
  }

  IdentityReport report;
  report.tolerance = tolerance;
  for (const Accumulator* acc :
       {&household_budget, &collective_budget, &value_composition, &capital_stock_flow,
        &human_stock_flow, &output_total_return, &human_cash_flow, &human_capital_growth,
        &work_two_routes, &consumption_split, &output_uses, &output_factor_sum,
        &output_factor_incomes, &uses_equal_incomes, &accounts_identity,
        &income_shares_sum}) {
    report.checks.push_back({acc->label, acc->relation,
                             acc->max_residual <= tolerance, acc->max_residual});
  }
  return report;
}

}  // namespace capflow
