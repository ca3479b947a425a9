"""Tabulate T(M) by quadrature, AGM and ODE, plus the small-amplitude offset.

    python scripts/period_table.py --out results/period_table.csv
"""
import argparse
import csv
import math
from dataclasses import dataclass

import numpy as np

from ymac.period import period_agm, period_integral, period_ode, small_amplitude_period


@dataclass
class Config:
    amplitudes: tuple = (1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999)
    ode_tol: float = 1e-12


def main(cfg: Config, out: str | None):
    rows = []
    for M in cfg.amplitudes:
        tq, ta = period_integral(M).T, period_agm(M).T
        to = period_ode(M, cfg.ode_tol).T if M >= 1e-2 else math.nan
        offset = tq - small_amplitude_period()
        rows.append((M, tq, ta, to, offset, offset / (3 * M * M / 8 * small_amplitude_period())))
    header = ("M", "T_quad", "T_agm", "T_ode", "T_minus_pi_sqrt2", "ratio_to_3M2_over_8")
    print("  ".join(f"{h:>20s}" for h in header))
    for r in rows:
        print("  ".join(f"{x:20.12g}" for x in r))
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows([[f"{x:.17g}" for x in r] for r in rows])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None)
    main(Config(), ap.parse_args().out)
