#!/usr/bin/env python3
"""Regenerates the committed fixture inputs and their expected outputs.

The expectations are computed here by spreadsheet-style brute force, straight
from the raw numbers, independently of the library. Float arithmetic mirrors
the library's evaluation order step for step, so the frozen values must be
reproduced bit-exactly. Run from this directory; the outputs are committed.
"""

import os

HERE = os.path.dirname(os.path.abspath(__file__))

YEARS = list(range(2000, 2010))

# per-country raw series, one value per year unless noted
FIXTURE = {
    "AAA": {
        "xlcusp": [2.0] * 10,
        "anninc": [80000 + 900 * i for i in range(10)],
        "wlabsh": [0.62] * 10,
        "mnninc": [12600 + 160 * i for i in range(10)],
        "mcongo": [2000 + 20 * i for i in range(10)],
        "mconhn": [8000 + 180 * i for i in range(10)],
        "mnweal": [50000, 51500, 53000, 54500, 51300, 53500, 55100, 56800, 58500, 60200],
    },
    "BBB": {
        "xlcusp": [5.0] * 10,
        "anninc": [40000 + 250 * i for i in range(10)],
        "wlabsh": [0.84] * 10,
        "mnninc": [4000, 4050, 4100, 5200, 4200, 4250, 4300, 4350, 4400, 4450],
        "mcongo": [800 + 10 * i for i in range(10)],
        "mconhn": [3200 + 30 * i for i in range(10)],
        # 2005 deliberately absent: the capital series has a one-year hole
        "mnweal": [20000, 20600, 21200, 21800, 22400, None, 23600, 24200, 24800, 25400],
    },
    "CCC": {
        "xlcusp": [25.0] * 10,
        "anninc": [30000 + 300 * i for i in range(10)],
        "wlabsh": [0.60] * 10,
        "mnninc": [3000 + 30 * i for i in range(10)],
        "mcongo": [600 + 5 * i for i in range(10)],
        "mconhn": [2400 + 45 * i for i in range(10)],
        "mnweal": [9000, 9300, 9600, 9900, 9500, 9800, 10100, 10400, 10700, 11000],
    },
}

VARIABLES = ["mcongo", "mconhn", "mnninc", "wlabsh", "mnweal", "anninc", "xlcusp"]

THRESHOLD = 0.10


def fmt(x):
    """Shortest round-trip decimal, same contract as the library writer."""
    return repr(float(x))


def write_fixture_csv():
    lines = ["country;variable;percentile;year;value;age;pop"]
    for country in sorted(FIXTURE):
        series = FIXTURE[country]
        for variable in VARIABLES:
            for i, year in enumerate(YEARS):
                value = series[variable][i]
                if value is None:
                    continue
                lines.append(f"{country};{variable};p0p100;{year};{value};999;")
    path = os.path.join(HERE, "wid_fixture.csv")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    return sum(1 for _ in lines) - 1


def observations(country):
    """year -> (consumption, pay, capital, income) for complete years."""
    series = FIXTURE[country]
    out = {}
    for i, year in enumerate(YEARS):
        if any(series[v][i] is None for v in VARIABLES):
            continue
        consumption = float(series["mcongo"][i]) + float(series["mconhn"][i])
        pay = float(series["wlabsh"][i]) * float(series["mnninc"][i])
        capital = float(series["mnweal"][i])
        income = float(series["anninc"][i]) / float(series["xlcusp"][i])
        out[year] = (consumption, pay, capital, income)
    return out


def derive_rows(country):
    obs = observations(country)
    rows = []
    for year in sorted(obs):
        if year - 1 not in obs:
            continue
        consumption, pay, capital, _ = obs[year]
        _, _, capital_prev, _ = obs[year - 1]
        cash_flow = consumption - pay
        capital_change = capital - capital_prev
        net_profit = capital_change + cash_flow
        f = cash_flow / capital_prev
        g = capital_change / capital_prev
        r = g + f
        labor = pay / consumption
        capital_share = (consumption - pay) / consumption
        rows.append((country, year, cash_flow, capital_change, net_profit,
                     f, g, r, labor, capital_share))
    return rows


def summarize(country, rows):
    obs = observations(country)
    n = float(len(rows))
    sum_f = sum_g = sum_r = sum_labor = sum_capital = 0.0
    used_years = set()
    for row in rows:
        sum_f += row[5]
        sum_g += row[6]
        sum_r += row[7]
        sum_labor += row[8]
        sum_capital += row[9]
        used_years.add(row[1] - 1)
        used_years.add(row[1])
    sum_income = 0.0
    count_income = 0
    for year in sorted(obs):
        if year in used_years:
            sum_income += obs[year][3]
            count_income += 1
    avg_f = sum_f / n
    return (country, len(rows), avg_f, sum_g / n, sum_r / n, sum_labor / n,
            sum_capital / n, sum_income / count_income, 1 if avg_f > THRESHOLD else 0)


def write_expected():
    all_rows = []
    all_summaries = []
    for country in sorted(FIXTURE):
        rows = derive_rows(country)
        all_rows.extend(rows)
        all_summaries.append(summarize(country, rows))

    with open(os.path.join(HERE, "expected_indicators.tsv"), "w") as f:
        f.write("# capflow indicators 1\n")
        f.write("country\tyear\tcash_flow\tcapital_change\tnet_profit\tcash_flow_rate\t"
                "growth_rate\treturn_rate\tlabor_share\tcapital_share\n")
        for row in all_rows:
            f.write("\t".join([row[0], str(row[1])] + [fmt(x) for x in row[2:]]) + "\n")

    with open(os.path.join(HERE, "expected_summaries.tsv"), "w") as f:
        f.write("# capflow summaries 1 threshold=" + fmt(THRESHOLD) + "\n")
        f.write("country\tyear_pairs\tcash_flow_rate\tgrowth_rate\treturn_rate\t"
                "labor_share\tcapital_share\tincome_per_capita\thigh_cash_flow\n")
        for s in all_summaries:
            f.write("\t".join([s[0], str(s[1])] + [fmt(x) for x in s[2:8]] +
                              [str(s[8])]) + "\n")
    return len(all_rows), len(all_summaries)


# sixteen-country comparison fixture: our summaries, the reference component
# rates, and the hand-computed weighted means and band verdicts
COMPARE = [
    # country, f, g, labor, income, (dividend, rental, bill, bond)
    ("AUS", 0.045, 0.031, 0.74, 52000.0, (0.042, 0.051, 0.012, 0.021)),
    ("BEL", 0.032, 0.024, 0.78, 48000.0, (0.031, 0.062, 0.009, 0.018)),
    ("CHE", 0.029, 0.027, 0.81, 65000.0, (0.034, 0.045, 0.008, 0.016)),
    ("DEU", 0.041, 0.026, 0.76, 51000.0, (0.037, 0.049, 0.011, 0.02)),
    ("DNK", 0.038, 0.029, 0.77, 56000.0, (0.039, 0.047, 0.013, 0.022)),
    ("ESP", 0.052, 0.021, 0.72, 38000.0, (0.046, 0.053, 0.01, 0.019)),
    ("FIN", 0.061, 0.023, 0.71, 46000.0, (0.043, 0.058, 0.012, 0.023)),
    ("FRA", 0.047, 0.025, 0.75, 47000.0, (0.035, 0.056, 0.009, 0.017)),
    ("GBR", 0.044, 0.028, 0.73, 45000.0, (0.041, 0.05, 0.011, 0.021)),
    ("ITA", 0.036, 0.019, 0.74, 41000.0, (0.033, 0.048, 0.008, 0.015)),
    ("JPN", 0.028, 0.018, 0.79, 42000.0, (0.029, 0.044, 0.006, 0.012)),
    ("NLD", 0.055, 0.03, 0.72, 53000.0, (0.048, 0.057, 0.013, 0.024)),
    ("NOR", 0.06, 0.032, 0.7, 64000.0, (0.047, 0.059, 0.014, 0.025)),
    ("PRT", 0.058, 0.02, 0.69, 33000.0, (0.044, 0.055, 0.01, 0.02)),
    ("SWE", 0.033, 0.026, 0.77, 54000.0, (0.036, 0.046, 0.011, 0.019)),
    ("USA", 0.049, 0.033, 0.73, 63000.0, (0.05, 0.052, 0.015, 0.026)),
]

BAND = (0.03, 0.06)


def write_compare_fixture():
    with open(os.path.join(HERE, "summaries_16.tsv"), "w") as f:
        f.write("# capflow summaries 1 threshold=" + fmt(THRESHOLD) + "\n")
        f.write("country\tyear_pairs\tcash_flow_rate\tgrowth_rate\treturn_rate\t"
                "labor_share\tcapital_share\tincome_per_capita\thigh_cash_flow\n")
        for country, f_rate, g_rate, labor, income, _ in COMPARE:
            r_rate = g_rate + f_rate
            capital_share = 1.0 - labor
            flag = 1 if f_rate > THRESHOLD else 0
            f.write("\t".join([country, "10", fmt(f_rate), fmt(g_rate), fmt(r_rate),
                               fmt(labor), fmt(capital_share), fmt(income),
                               str(flag)]) + "\n")

    with open(os.path.join(HERE, "reference_16.csv"), "w") as f:
        f.write("country,dividend_rate,rental_rate,bill_rate,bond_rate\n")
        for country, _, _, _, _, components in COMPARE:
            f.write(country + "," + ",".join(fmt(c) for c in components) + "\n")

    in_band_total = 0
    with open(os.path.join(HERE, "expected_reference.tsv"), "w") as f:
        f.write("country\tweighted_average\tgap\tin_band\n")
        for country, f_rate, _, _, _, components in COMPARE:
            weighted = 0.0
            for component in components:
                weighted += 0.25 * component
            gap = f_rate - weighted
            in_band = 1 if BAND[0] <= f_rate <= BAND[1] else 0
            in_band_total += in_band
            f.write("\t".join([country, fmt(weighted), fmt(gap), str(in_band)]) + "\n")
    return in_band_total


def main():
    records = write_fixture_csv()
    rows, summaries = write_expected()
    in_band = write_compare_fixture()
    print(f"fixture records: {records}")
    print(f"expected indicator rows: {rows}, summaries: {summaries}")
    print(f"compare fixture: {len(COMPARE)} countries, {in_band} inside the band")


if __name__ == "__main__":
    main()
