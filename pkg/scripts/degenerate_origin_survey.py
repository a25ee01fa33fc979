"""Compare three predictors of the one-sided stability of E0 at B = e against simulation.

The predictors are the center-manifold coefficient Bm - 1 - q, the variant
2(Bm - 1) - q, and the sign of Bm - 1.  Each draw is settled by integrating
from (delta, q delta) and watching whether x shrinks or grows.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from sirsfold.acceptance import SEED, degenerate_draws, simulate_center_direction
from sirsfold.stability import center_manifold_coefficient, printed_center_coefficient


@dataclass
class SurveyConfig:
    draws: int = 100
    seed: int = SEED + 7


def run(cfg: SurveyConfig) -> None:
    hits = {"Bm-1-q": 0, "2(Bm-1)-q": 0, "Bm-1": 0}
    params = degenerate_draws(np.random.default_rng(cfg.seed), cfg.draws)
    print("m\tB\tq\tsimulated\tBm-1-q\t2(Bm-1)-q")
    for p in params:
        outcome = simulate_center_direction(p)
        attracting = outcome == "attracting"
        c = center_manifold_coefficient(p)
        c_alt = printed_center_coefficient(p)
        hits["Bm-1-q"] += (c < 0) == attracting
        hits["2(Bm-1)-q"] += (c_alt < 0) == attracting
        hits["Bm-1"] += (p.B * p.m - 1 < 0) == attracting
        print(f"{p.m:.4g}\t{p.B:.4g}\t{p.q:.4g}\t{outcome}\t{c:+.4g}\t{c_alt:+.4g}")
    for name, n in hits.items():
        print(f"# {name}: {n}/{len(params)} agree with simulation")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=SurveyConfig.draws)
    ap.add_argument("--seed", type=int, default=SurveyConfig.seed)
    run(SurveyConfig(**vars(ap.parse_args())))
