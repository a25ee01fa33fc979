"""Serialization of catalogs, stability reports, scans and trajectories.

Machine-readable files carry floats at 17 significant digits so every value
round-trips exactly; human-readable text uses 6.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, is_dataclass

import numpy as np

from .bifurcation import ScanResult
from .equilibria import Equilibrium, EquilibriumCatalog
from .simulate import Trajectory
from .stability import StabilityReport


def fmt(value: float, digits: int = 17) -> str:
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return f"{value:.{digits}g}"


def to_plain(obj):
    """Recursively convert dataclasses, enums and numpy values into JSON-ready data."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if is_dataclass(obj):
        return {k: to_plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    return obj


def dumps(obj, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats and stable key order."""
    return _emit(to_plain(obj), indent, 0) + "\n"


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_quote(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{pad}{_emit(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


def equilibrium_record(eq: Equilibrium, report: StabilityReport | None = None) -> dict:
    rec = {
        "x": eq.x,
        "y": eq.y,
        "regime": eq.regime.value,
        "multiplicity": eq.multiplicity.value,
        "admissible": eq.admissible,
        "classification": report.label.value if report else None,
    }
    if report is not None:
        rec["trace"] = report.trace
        rec["determinant"] = report.determinant
        rec["eigenvalues"] = [{"re": v.real, "im": v.imag} for v in report.eigenvalues]
        rec["normal_form"] = to_plain(report.normal_form)
        rec["diagnostics"] = to_plain(report.diagnostics)
    return rec


def catalog_document(cat: EquilibriumCatalog, reports: list[StabilityReport] | None = None) -> dict:
    reports = reports or [None] * len(cat.all)
    return {
        "R0": cat.R0,
        "theorem1_case": cat.theorem1_case.value if cat.theorem1_case else None,
        "P1_hat": cat.P1_hat,
        "P2_hat": cat.P2_hat,
        "equilibria": [equilibrium_record(eq, rep) for eq, rep in zip(cat.all, reports)],
    }


SCAN_COLUMNS = ("value", "x", "y", "regime", "multiplicity", "admissible", "label")


def scan_rows(result: ScanResult) -> list[tuple]:
    rows = []
    for sample in result.samples:
        for eq, label in zip(sample.equilibria, sample.labels):
            rows.append(
                (sample.value, eq.x, eq.y, eq.regime.value, eq.multiplicity.value, eq.admissible, label.value)
            )
    return rows


def columnar(header, rows) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (bool, np.bool_)):
                cells.append("true" if v else "false")
            elif isinstance(v, (float, int, np.floating)):
                cells.append(fmt(v))
            else:
                cells.append(str(v))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def scan_columnar(result: ScanResult) -> str:
    return columnar(SCAN_COLUMNS, scan_rows(result))


def scan_document(result: ScanResult) -> dict:
    return {
        "parameter_name": result.parameter_name,
        "samples": [
            {
                "value": s.value,
                "equilibria": [
                    {**equilibrium_record(eq), "classification": lab.value} for eq, lab in zip(s.equilibria, s.labels)
                ],
            }
            for s in result.samples
        ],
    }


def trajectory_columnar(traj: Trajectory) -> str:
    rows = [(t, s[0], s[1], flag.value) for t, s, flag in zip(traj.times, traj.states, traj.regime_flags)]
    return columnar(("t", "x", "y", "regime"), rows)


def events_columnar(traj: Trajectory) -> str:
    rows = [(ev.time, ev.direction, ev.state[0], ev.state[1]) for ev in traj.events]
    return columnar(("t", "direction", "x", "y"), rows)


def trajectory_document(traj: Trajectory) -> dict:
    return {
        "x0": traj.x0,
        "backward": traj.backward,
        "t": traj.times,
        "x": traj.states[:, 0],
        "y": traj.states[:, 1],
        "regime": [f.value for f in traj.regime_flags],
        "events": [{"time": ev.time, "direction": ev.direction, "x": ev.state[0], "y": ev.state[1]} for ev in traj.events],
    }
