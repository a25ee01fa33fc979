"""Command-line front end: ``sirsfold analyze | scan | simulate | verify``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .acceptance import TOLERANCES, run_all
from .bifurcation import FoldError, SCAN_PARAMETERS, e_sn, scan, sotomayor
from .equilibria import (
    catalog,
    fold_cubic_gap,
    fold_cubic_gap_variant,
    ordering_condition,
    sat_admissibility_predicates,
    threshold_prediction,
)
from .model import ParameterError, load_params, nondimensionalize
from .simulate import IntegrationError, integrate
from .stability import classify, dulac_certificate, dulac_grid_max, globally_stable_disease_free

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

GAS_MESSAGE = "globally asymptotically stable disease-free equilibrium"


def _h(v) -> str:
    return io.fmt(v, 6)


def build_analysis(raw) -> dict:
    sub, sat = nondimensionalize(raw)
    cat = catalog(sub, sat)
    reports = [classify(eq, sub, sat) for eq in cat.all]
    certs = dulac_certificate(sub, sat)
    top = max(sub.B, 1.0)
    doc = {
        "raw": raw.to_mapping(),
        "scaled_sub": io.to_plain(sub),
        "scaled_sat": io.to_plain(sat),
        **io.catalog_document(cat, reports),
        "dulac": [
            {"condition_id": c.condition_id, "holds": c.holds, "witness": c.witness} for c in certs
        ],
        "dulac_grid_max_divergence": dulac_grid_max(sub, top, top, 50),
        "global_stability": GAS_MESSAGE if globally_stable_disease_free(certs) else None,
        "e_SN": None,
        "sotomayor": None,
    }
    discrepancies = []
    try:
        doc["e_SN"] = e_sn(sub)
        fold_params = sub.__class__(sub.m, sub.B, doc["e_SN"], sub.q, sub.x0)
        rep = sotomayor(fold_params)
        doc["sotomayor"] = {
            "xStar": rep.xStar,
            "yStar": rep.yStar,
            "v": rep.v,
            "w": rep.w,
            "wF_e": rep.wF_e,
            "wD2F": rep.wD2F,
            "verdict": rep.verdict,
            "checks": rep.checks,
        }
        discrepancies.append(
            {
                "quantity": "wD2F",
                "computed": rep.wD2F,
                "reference": rep.checks["printed_wD2F"],
            }
        )
        discrepancies.append(
            {
                "quantity": "left null vector second component / first",
                "computed": rep.checks["w_second_over_first"],
                "reference": rep.checks["w_printed"][1] / rep.checks["w_printed"][0] if sub.q else None,
            }
        )
    except FoldError:
        pass

    doc["threshold_prediction"] = threshold_prediction(sub)
    doc["ordering_condition"] = ordering_condition(sub)
    doc["sat_admissibility_predicates"] = sat_admissibility_predicates(sat)
    doc["fold_cubic_gap"] = fold_cubic_gap(sat)
    doc["fold_cubic_gap_variant"] = fold_cubic_gap_variant(sat)
    sub_roots = [eq for eq in cat.endemic if eq.regime.value == "Sub"]
    if len(sub_roots) == 2:
        direct = {"E1": sub_roots[0].admissible, "E2": sub_roots[1].admissible}
        if direct != doc["threshold_prediction"]:
            discrepancies.append(
                {"quantity": "admissibility of E1/E2", "computed": direct, "reference": doc["threshold_prediction"]}
            )
    for eq, rep in zip(cat.all, reports):
        d = rep.diagnostics
        if eq.regime.value == "Sub" and not eq.is_disease_free and "trace_predicate_agrees" in d and not d["trace_predicate_agrees"]:
            discrepancies.append(
                {"quantity": f"trace sign predicate at x={io.fmt(eq.x)}", "computed": rep.trace, "reference": d["trace_predicate"]}
            )
        if "bm1_criterion_agrees" in d and not d["bm1_criterion_agrees"]:
            discrepancies.append(
                {
                    "quantity": "degenerate disease-free stability (Bm-1 criterion)",
                    "computed": d["center_coefficient"],
                    "reference": raw_bm_minus_1(sub),
                }
            )
    doc["discrepancies"] = discrepancies
    return doc


def raw_bm_minus_1(sub) -> float:
    return sub.B * sub.m - 1


def render_analysis(doc: dict) -> str:
    s, t = doc["scaled_sub"], doc["scaled_sat"]
    lines = [
        "Scaled parameters",
        f"  Sub: m={_h(s['m'])} B={_h(s['B'])} e={_h(s['e'])} q={_h(s['q'])} x0={_h(s['x0'])}",
        f"  Sat: m={_h(t['m'])} B={_h(t['B'])} g={_h(t['g'])} p={_h(t['p'])} f={_h(t['f'])} x0={_h(t['x0'])}",
        f"R0 (B/e) = {_h(doc['R0'])}",
        f"Existence case: {doc['theorem1_case'] or 'none (e = B with Bm <= 1+q)'}",
        f"P1_hat = {_h(doc['P1_hat'])}, P2_hat = {_h(doc['P2_hat'])}",
        "",
        "Equilibria",
    ]
    for eq in doc["equilibria"]:
        tag = "admissible" if eq["admissible"] else "not admissible"
        lines.append(
            f"  {eq['regime']:3s} x={_h(eq['x'])} y={_h(eq['y'])} {eq['multiplicity']} {tag}: {eq['classification']}"
            f" (tr={_h(eq['trace'])}, det={_h(eq['determinant'])})"
        )
        nf = eq.get("normal_form")
        if nf:
            lines.append("      normal form: " + ", ".join(f"{k}={_h(v)}" for k, v in nf.items() if v is not None))
    lines += ["", "Dulac certificates"]
    for c in doc["dulac"]:
        lines.append(f"  {c['condition_id']}: {'holds' if c['holds'] else 'does not hold'}")
    if doc["global_stability"]:
        lines.append(f"  => {doc['global_stability']}; no limit cycles")
    lines.append(f"  max Dulac divergence on grid: {_h(doc['dulac_grid_max_divergence'])}")
    lines.append("")
    if doc["e_SN"] is None:
        lines.append("Saddle-node value e_SN: undefined (m <= (1+q)/B)")
    else:
        so = doc["sotomayor"]
        lines.append(f"Saddle-node value e_SN = {_h(doc['e_SN'])} at x*={_h(so['xStar'])}, y*={_h(so['yStar'])}")
        lines.append(
            f"  wF_e={_h(so['wF_e'])} wD2F={_h(so['wD2F'])} transversal={'yes' if so['verdict'] else 'no'}"
        )
    if doc["discrepancies"]:
        lines += ["", "Reference vs computed"]
        for d in doc["discrepancies"]:
            lines.append(f"  {d['quantity']}: computed {_fmt_any(d['computed'])}, reference {_fmt_any(d['reference'])}")
    return "\n".join(lines) + "\n"


def _fmt_any(v) -> str:
    if isinstance(v, float):
        return _h(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt_any(x)}" for k, x in v.items()) + "}"
    return str(v)


def cmd_analyze(args) -> int:
    raw = load_params(args.params)
    doc = build_analysis(raw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(render_analysis(doc))
    if args.format == "columnar":
        rows = [
            (e["x"], e["y"], e["regime"], e["multiplicity"], e["admissible"], e["classification"])
            for e in doc["equilibria"]
        ]
        (out / "equilibria.tsv").write_text(io.columnar(("x", "y", "regime", "multiplicity", "admissible", "label"), rows))
    (out / "report.json").write_text(io.dumps(doc))
    sys.stdout.write(render_analysis(doc))
    return EXIT_OK


def cmd_scan(args) -> int:
    raw = load_params(args.params)
    result = scan(raw, args.parameter, args.lo, args.hi, args.steps, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "columnar":
        path = out / "scan.tsv"
        path.write_text(io.scan_columnar(result))
    else:
        path = out / "scan.json"
        path.write_text(io.dumps(io.scan_document(result)))
    print(f"{len(result.samples)} samples of {args.parameter} written to {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    raw = load_params(args.params)
    sub, sat = nondimensionalize(raw)
    traj = integrate((args.x_init, args.y_init), sub, sat, args.t_end, args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "columnar":
        (out / "trajectory.tsv").write_text(io.trajectory_columnar(traj))
        (out / "events.tsv").write_text(io.events_columnar(traj))
    else:
        (out / "trajectory.json").write_text(io.dumps(io.trajectory_document(traj)))
    x, y = traj.final
    print(f"{len(traj.times)} samples, {len(traj.events)} switching events, final state x={_h(x)} y={_h(y)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {}
    for item in args.override or []:
        key, _, value = item.partition("=")
        if not value:
            raise ParameterError(item, "override must look like name=value")
        overrides[key] = value
    results = run_all(overrides=overrides, only=set(args.only) if args.only else None)
    for r in results:
        print(r.line())
        for k, v in r.reported.items():
            print(f"       reported {k}: {_fmt_any(v)}")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {
        "passed": ok,
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "measured": r.measured, "reported": r.reported}
            for r in results
        ],
    }
    (out / "verify.json").write_text(io.dumps(summary))
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sirsfold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_params=True):
        if needs_params:
            p.add_argument("--params", required=True, help="TOML file with the RawParams fields")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--format", choices=("columnar", "structured"), default="structured")

    p = sub.add_parser("analyze", help="equilibria, stability, Dulac certificates and fold data")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="one-parameter sweep of equilibria and labels")
    common(p)
    p.set_defaults(func=cmd_scan, format="columnar")
    p.add_argument("--parameter", required=True, choices=SCAN_PARAMETERS)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("simulate", help="integrate the switched system")
    common(p)
    p.set_defaults(func=cmd_simulate, format="columnar")
    p.add_argument("--x-init", type=float, required=True)
    p.add_argument("--y-init", type=float, required=True)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("verify", help="run the acceptance suite")
    common(p, needs_params=False)
    p.add_argument("--override", action="append", metavar="NAME=VALUE", help=f"tolerance override; names: {', '.join(TOLERANCES)}")
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these criterion numbers")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "scan" and args.steps < 2:
        parser.error("--steps must be >= 2")
    try:
        return args.func(args)
    except (ParameterError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        # scan range and simulate argument checks
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegrationError, FoldError, np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
