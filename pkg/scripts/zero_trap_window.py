"""Where does small random data relax to, as the window length L grows?

With zero Dirichlet ends the linearization about v ≡ 0 has lowest mode
sin(π(t - t_min)/L), growth rate 2 - (π/L)², so v ≡ 0 stops being stable
once L > π/√2 ≈ 2.22.  This script scans L and reports max|v| after
relaxation for a few seeds.

    python scripts/zero_trap_window.py
"""
import argparse
import math
from dataclasses import dataclass, field

import numpy as np

from ymac.cylinder import random_field, relax


@dataclass
class Config:
    lengths: list = field(default_factory=lambda: [1.0, 2.0, 2.2, 2.3, 3.0, 4.0, 8.0, 16.0])
    seeds: int = 3
    amplitude: float = 0.3
    points_per_unit: int = 8
    n_theta: int = 16
    tol: float = 1e-9
    max_steps: int = 1_000_000


def run(cfg: Config):
    print(f"critical length pi/sqrt(2) = {math.pi / math.sqrt(2):.6f}")
    print(f"{'L':>6} {'max|v| over seeds':>18} {'converged':>10}")
    for L in cfg.lengths:
        n_t = max(9, int(cfg.points_per_unit * L) + 1)
        worst, ok = 0.0, True
        for seed in range(cfg.seeds):
            f = random_field(cfg.amplitude, seed, -L / 2, L / 2, n_t, cfg.n_theta)
            g, rep = relax(f, cfg.tol, cfg.max_steps)
            worst = max(worst, float(np.abs(g.values).max()))
            ok &= rep.converged
        print(f"{L:6.2f} {worst:18.3e} {str(ok):>10}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    run(Config(seeds=ap.parse_args().seeds))
