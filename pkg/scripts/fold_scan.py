"""Sweep the proportional treatment rate across the saddle-node and tabulate endemic counts.

    python3 scripts/fold_scan.py --lo 3 --hi 5 --steps 41
"""

import argparse
from dataclasses import dataclass

from sirsfold.acceptance import shipped_params
from sirsfold.bifurcation import e_sn, scan
from sirsfold.model import Regime, nondimensionalize


@dataclass
class FoldScanConfig:
    params: str = "fold"
    parameter: str = "r"
    lo: float = 3.0
    hi: float = 5.0
    steps: int = 41


def run(cfg: FoldScanConfig) -> None:
    raw = shipped_params(cfg.params)
    sub, _ = nondimensionalize(raw)
    print(f"# e_SN = {e_sn(sub):.6g} for the base set (e = {sub.e:.6g})")
    print("value\te\tsub_endemic\tlabels")
    for s in scan(raw, cfg.parameter, cfg.lo, cfg.hi, cfg.steps).samples:
        e = nondimensionalize(raw.replace(**{cfg.parameter: s.value}))[0].e
        labels = ",".join(
            lab.value for eq, lab in zip(s.equilibria, s.labels) if eq.regime is Regime.SUB and not eq.is_disease_free
        )
        print(f"{s.value:.6g}\t{e:.6g}\t{s.count(Regime.SUB)}\t{labels or '-'}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name, default in vars(FoldScanConfig()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    run(FoldScanConfig(**vars(ap.parse_args())))
