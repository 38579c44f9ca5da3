#!/usr/bin/env python3
# Copyright 2026 The smartport Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the synthetic genova-week scenario (192 hourly rows).

Every series here is synthetic. Ratings follow the default port parameters
(4 MW PV, 11.34 MW wind farm); prices are plausible levels, not market data.
"""

import argparse
import csv
import datetime as dt

import numpy as np

HOURS = 192
PV_PEAK_MW = 4.0
WIND_RATED_MW = 11.34
BAND_MW = 0.819  # three standard deviations of 0.273 MW
H2_NOMINAL_KG_H = 19.95


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/genova_week.csv")
    ap.add_argument("--seed", type=int, default=20190803)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    start = dt.datetime(2019, 8, 3, 0, 0)

    hours = np.arange(HOURS)
    hod = hours % 24
    day = hours // 24

    # PV: clear-sky bell between 06:00 and 20:00 with a daily cloud factor.
    cloud = rng.uniform(0.75, 1.0, size=HOURS // 24 + 1)[day]
    pv = PV_PEAK_MW * cloud * np.clip(np.sin(np.pi * (hod - 6) / 14), 0, None) ** 1.5

    # Wind: smoothed random walk on capacity factor, sea breeze in the afternoon.
    cf = np.empty(HOURS)
    level = 0.25
    for t in range(HOURS):
        level = np.clip(level + rng.normal(0, 0.04), 0.12, 0.55)
        cf[t] = level
    breeze = 0.08 * np.clip(np.sin(np.pi * (hod - 11) / 10), 0, None)
    wind = WIND_RATED_MW * np.clip(cf + breeze, 0.1, 0.65)

    res = pv + wind

    # Ro-Pax ship at the electrified quay: berth 07:00-21:00 daily, hotel load.
    moored = (hod >= 7) & (hod < 21)
    load = np.where(moored, rng.uniform(2.5, 4.5, size=HOURS), 0.0)

    # Hydrogen tanker: refuels on alternating half-days at nominal rate.
    tanker = ((day % 2 == 0) & (hod >= 8) & (hod < 20)) | ((day % 2 == 1) & (hod < 10))
    h2 = np.where(tanker, H2_NOMINAL_KG_H, 0.0)

    # Prices in EUR/MWh: day-night purchase shape, sell below purchase.
    purchase = 48 + 18 * np.clip(np.sin(np.pi * (hod - 7) / 14), 0, None) + \
        10 * ((hod >= 18) & (hod < 22)) + rng.uniform(-2, 2, size=HOURS)
    sell = 0.8 * purchase
    curtail = np.full(HOURS, 30.0)
    cold_ironing = np.full(HOURS, 120.0)
    hydrogen = cold_ironing.copy()

    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([
            "timestamp", "res_forecast_mw", "res_confidence_mw", "shore_load_mw",
            "h2_demand_kg_per_h", "price_purchase_eur_per_mwh", "price_sell_eur_per_mwh",
            "price_curtail_eur_per_mwh", "price_cold_ironing_eur_per_mwh",
            "price_hydrogen_eur_per_mwh",
        ])
        for t in range(HOURS):
            stamp = (start + dt.timedelta(hours=int(t))).strftime("%Y-%m-%dT%H:%M")
            w.writerow([
                stamp, f"{res[t]:.3f}", f"{BAND_MW:.3f}", f"{load[t]:.3f}", f"{h2[t]:.2f}",
                f"{purchase[t]:.2f}", f"{sell[t]:.2f}", f"{curtail[t]:.2f}",
                f"{cold_ironing[t]:.2f}", f"{hydrogen[t]:.2f}",
            ])


if __name__ == "__main__":
    main()
