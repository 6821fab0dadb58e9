"""Declarative parameter sweeps and their table output.

A :class:`SweepSpec` names a base parameter set (in gamma units or as
X/2pi in Hz), up to two swept axes and the observable groups to compute.
Rows come out in grid order (first axis outermost) whatever the number
of worker processes. With ``branch_policy="continuity"`` each line along
the last axis runs on one worker so the branch can be tracked point to
point.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import KerrSenseError, ParameterError
from .flags import INFORMATIONAL, RowFlag, flags_text
from .fluctuations import noise_steady_state, snr
from .meanfield import TOL_ROOT, steady_state_closed_form
from .params import CavityParams, UnitConvention, normalize
from .sensing import DEFAULT_REL_STEP, n_analytic_cp, sensitivity_analytic_cp, sensitivity_numeric
from .stability import TOL_STAB, eigenpair

__all__ = [
    "SWEEPABLE",
    "OUTPUT_GROUPS",
    "Axis",
    "SweepSpec",
    "SweepResult",
    "columns_for",
    "run_sweep",
    "format_csv",
    "format_json",
    "write_outputs",
]

SWEEPABLE = ("delta", "u_kerr", "eps", "g2", "g2_offset")
OUTPUT_GROUPS = ("steady", "eigen", "noise", "snr", "sens", "analytic")

_GROUP_COLUMNS = {
    "steady": ["alpha_re", "alpha_im", "n_mean", "delta_prime", "n_branches", "residual"],
    "eigen": [
        "mf_eig_plus_re", "mf_eig_plus_im", "mf_eig_minus_re", "mf_eig_minus_im",
        "fl_eig_plus_re", "fl_eig_plus_im", "fl_eig_minus_re", "fl_eig_minus_im",
        "mf_stable", "fluct_stable",
    ],
    "noise": ["n_fluct", "m_anom_re", "m_anom_im"],
    "snr": ["snr_db"],
    "sens": ["s_numeric"],
    "analytic": ["n_analytic", "s_analytic", "validity"],
}
_HZ_COLUMNS = {"sens": ["s_numeric_hz2pi"], "analytic": ["s_analytic_hz2pi"]}


@dataclass(frozen=True)
class Axis:
    name: str
    scale: str = "linear"
    start: float = 0.0
    stop: float = 0.0
    count: int = 1
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.name not in SWEEPABLE:
            raise ParameterError(f"cannot sweep {self.name!r}; choose from {', '.join(SWEEPABLE)}", field="name")
        if self.values is not None:
            if not self.values:
                raise ParameterError("explicit axis values must be non-empty", field="values")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            return
        if self.scale not in ("linear", "log"):
            raise ParameterError(f"axis scale must be 'linear' or 'log', got {self.scale!r}", field="scale")
        if int(self.count) != self.count or self.count < 1:
            raise ParameterError(f"axis count must be an integer >= 1, got {self.count!r}", field="count")
        if self.scale == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise ParameterError("log-scaled axes need positive endpoints", field="start")

    def grid(self) -> list[float]:
        if self.values is not None:
            return list(self.values)
        n = int(self.count)
        if n == 1:
            return [float(self.start)]
        if self.scale == "log":
            return [float(v) for v in np.logspace(math.log10(self.start), math.log10(self.stop), n)]
        return [float(v) for v in np.linspace(self.start, self.stop, n)]

    def describe(self) -> dict:
        if self.values is not None:
            return {"name": self.name, "values": list(self.values)}
        return {"name": self.name, "scale": self.scale, "start": self.start, "stop": self.stop, "count": int(self.count)}


@dataclass(frozen=True)
class SweepSpec:
    """``base`` and axis values are in ``units``; ``g2_offset`` means G - G0."""

    name: str
    units: UnitConvention
    base: CavityParams
    axes: tuple[Axis, ...] = ()
    outputs: tuple[str, ...] = ("steady", "eigen")
    branch_policy: str = "lowest"
    gamma_hz: float | None = None
    rel_step: float = DEFAULT_REL_STEP
    json_mirror: bool = False

    def __post_init__(self) -> None:
        if len(self.axes) > 2:
            raise ParameterError("at most two swept axes are supported", field="axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ParameterError("an axis is swept twice", field="axes")
        if {"g2", "g2_offset"} <= {a.name for a in self.axes}:
            raise ParameterError("sweep either g2 or g2_offset, not both", field="axes")
        bad = [o for o in self.outputs if o not in OUTPUT_GROUPS]
        if bad or not self.outputs:
            raise ParameterError(f"unknown outputs {bad}; choose from {', '.join(OUTPUT_GROUPS)}", field="outputs")
        if self.branch_policy not in ("lowest", "continuity"):
            raise ParameterError(f"branch_policy must be 'lowest' or 'continuity', got {self.branch_policy!r}")
        if self.units is UnitConvention.HZ_OVER_2PI and not self.gamma_hz:
            raise ParameterError("hz2pi units need gamma_hz", field="gamma_hz2pi")

    def resolve(self, values: dict[str, float]) -> CavityParams:
        """Normalized (gamma = 1) parameters at one grid point."""
        changes = dict(values)
        gamma_decl = self.gamma_hz if self.units is UnitConvention.HZ_OVER_2PI else self.base.gamma
        if "g2_offset" in changes:
            changes["g2"] = gamma_decl / 4.0 + changes.pop("g2_offset")
        raw = self.base.replace(**changes)
        if self.units is UnitConvention.HZ_OVER_2PI:
            return normalize(raw, self.gamma_hz)
        return raw

    def describe(self) -> dict:
        return {
            "name": self.name,
            "units": self.units.value,
            "gamma_hz2pi": self.gamma_hz,
            "base": self.base.as_dict(),
            "axes": [a.describe() for a in self.axes],
            "outputs": list(self.outputs),
            "branch_policy": self.branch_policy,
            "rel_step": self.rel_step,
        }


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: list[str]
    rows: list[dict]
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def flagged(self) -> int:
        return sum(1 for r in self.rows if r["flags"] & ~int(INFORMATIONAL))

    @property
    def exit_status(self) -> int:
        return 2 if self.flagged else 0


def columns_for(spec: SweepSpec) -> list[str]:
    cols = []
    for a in spec.axes:
        cols.append(a.name)
        if spec.units is UnitConvention.HZ_OVER_2PI:
            cols.append(f"{a.name}_hz2pi")
    if spec.axes and any(a.name == "g2_offset" for a in spec.axes):
        cols.append("g2")
    for group in OUTPUT_GROUPS:
        if group in spec.outputs:
            cols.extend(_GROUP_COLUMNS[group])
            if spec.units is UnitConvention.HZ_OVER_2PI:
                cols.extend(_HZ_COLUMNS.get(group, []))
    return cols + ["flags", "flags_text"]


def _needs_branch(spec: SweepSpec, p: CavityParams) -> bool:
    groups = set(spec.outputs)
    if groups & {"steady", "noise", "snr", "sens"}:
        return True
    # the eigenvalues depend on the branch only through the Kerr shift
    return "eigen" in groups and p.u_kerr != 0.0


def _evaluate(spec: SweepSpec, values: dict[str, float], previous: complex | None) -> tuple[dict, complex | None]:
    p = spec.resolve(values)
    row: dict = {}
    gamma_decl = spec.gamma_hz if spec.units is UnitConvention.HZ_OVER_2PI else 1.0
    for a in spec.axes:
        v = values[a.name]
        row[a.name] = v / gamma_decl if spec.units is UnitConvention.HZ_OVER_2PI else v
        if spec.units is UnitConvention.HZ_OVER_2PI:
            row[f"{a.name}_hz2pi"] = v
    if "g2_offset" in values:
        row["g2"] = p.g2
    flags = RowFlag(0)
    outputs = set(spec.outputs)

    bs = br = None
    if _needs_branch(spec, p):
        try:
            policy = spec.branch_policy if previous is not None else "lowest"
            bs = steady_state_closed_form(p, policy=policy, previous=previous)
            br = bs.branch
        except KerrSenseError:
            flags |= RowFlag.STEADY_FAILED
    if br is not None:
        if not br.mf_stable:
            flags |= RowFlag.MF_UNSTABLE
        if not br.fluct_stable:
            flags |= RowFlag.FLUCT_UNSTABLE
        if sum(b.stable for b in bs.branches) > 1:
            flags |= RowFlag.MULTISTABLE

    if "steady" in outputs and br is not None:
        row.update(
            alpha_re=br.alpha.real, alpha_im=br.alpha.imag, n_mean=br.n_mean,
            delta_prime=br.delta_prime, n_branches=len(bs), residual=br.residual,
        )
    if "eigen" in outputs:
        if br is not None:
            d1, d2, gmod = br.delta_prime, br.delta_dprime, abs(br.g_prime)
        elif p.u_kerr == 0.0:
            d1, d2, gmod = p.delta, p.delta, p.g2
        else:
            d1 = None
        if d1 is not None:
            cap = eigenpair(p.gamma, p.g2, d1)
            low = eigenpair(p.gamma, gmod, d2)
            row.update(
                mf_eig_plus_re=cap[0].real, mf_eig_plus_im=cap[0].imag,
                mf_eig_minus_re=cap[1].real, mf_eig_minus_im=cap[1].imag,
                fl_eig_plus_re=low[0].real, fl_eig_plus_im=low[0].imag,
                fl_eig_minus_re=low[1].real, fl_eig_minus_im=low[1].imag,
                mf_stable=int(max(cap[0].real, cap[1].real) < -TOL_STAB * p.gamma),
                fluct_stable=int(max(low[0].real, low[1].real) < -TOL_STAB * p.gamma),
            )
    if outputs & {"noise", "snr"}:
        if br is None:
            flags |= RowFlag.NOISE_FAILED
        else:
            try:
                noise = noise_steady_state(br, p)
            except KerrSenseError:
                flags |= RowFlag.NOISE_FAILED
            else:
                if not noise.physical:
                    flags |= RowFlag.UNPHYSICAL
                if "noise" in outputs:
                    row.update(n_fluct=noise.n_fluct, m_anom_re=noise.m_anom.real, m_anom_im=noise.m_anom.imag)
                if "snr" in outputs:
                    rep = snr(br, noise)
                    if rep.infinite:
                        flags |= RowFlag.SNR_INFINITE
                    row["snr_db"] = rep.snr_db
    if "sens" in outputs:
        if br is None or p.u_kerr <= 0.0:
            flags |= RowFlag.SENS_FAILED
        else:
            try:
                rep = sensitivity_numeric(p, spec.rel_step, base=bs)
            except (KerrSenseError, ValueError):
                flags |= RowFlag.SENS_FAILED
            else:
                row["s_numeric"] = rep.s_numeric
                if spec.units is UnitConvention.HZ_OVER_2PI:
                    row["s_numeric_hz2pi"] = rep.per_hz(spec.gamma_hz)[0]
                if rep.step_disagree:
                    flags |= RowFlag.SENS_STEP_DISAGREE
    if "analytic" in outputs and p.u_kerr > 0.0 and p.eps > 0.0:
        n_an, validity = n_analytic_cp(p)
        s_an = sensitivity_analytic_cp(p)[0]
        row.update(n_analytic=n_an, s_analytic=s_an, validity=validity)
        if spec.units is UnitConvention.HZ_OVER_2PI:
            row["s_analytic_hz2pi"] = s_an / spec.gamma_hz
    row["flags"] = int(flags)
    row["flags_text"] = flags_text(flags)
    return row, (br.alpha if br is not None else previous)


def _run_line(spec: SweepSpec, points: list[dict[str, float]]) -> list[dict]:
    rows = []
    previous = None
    for values in points:
        row, alpha = _evaluate(spec, values, previous if spec.branch_policy == "continuity" else None)
        previous = alpha
        rows.append(row)
    return rows


def _tasks(spec: SweepSpec) -> list[list[dict[str, float]]]:
    names = [a.name for a in spec.axes]
    grids = [a.grid() for a in spec.axes]
    points = [dict(zip(names, combo)) for combo in itertools.product(*grids)]
    if spec.branch_policy == "continuity" and spec.axes:
        line = len(grids[-1])
        return [points[i : i + line] for i in range(0, len(points), line)]
    return [[pt] for pt in points]


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    t0 = time.perf_counter()
    tasks = _tasks(spec)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_line, [spec] * len(tasks), tasks))
    else:
        chunks = [_run_line(spec, t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    return SweepResult(spec, columns_for(spec), rows, time.perf_counter() - t0)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return ""
    return "%.12e" % value


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(row.get(c)) for c in result.columns])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_json(result: SweepResult) -> str:
    rows = [{c: _json_value(row.get(c)) for c in result.columns} for row in result.rows]
    return json.dumps({"name": result.spec.name, "columns": result.columns, "rows": rows}, allow_nan=False, indent=1) + "\n"


def manifest(result: SweepResult) -> dict:
    return {
        "name": result.spec.name,
        "tool": "kerrsense",
        "tool_version": __version__,
        "spec": result.spec.describe(),
        "tolerances": {"tol_root": TOL_ROOT, "tol_stab": TOL_STAB, "noise_tol": 1e-12, "rel_step": result.spec.rel_step},
        "rows": len(result.rows),
        "flagged_rows": result.flagged,
        "wall_time_s": result.wall_time,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **result.extra,
    }


def write_outputs(result: SweepResult, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write ``<name>.csv`` (or ``.json``), an optional JSON mirror, and the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        path = out / f"{result.spec.name}.json"
        path.write_text(format_json(result), encoding="utf-8")
        written.append(path)
    else:
        path = out / f"{result.spec.name}.csv"
        path.write_text(format_csv(result), encoding="utf-8")
        written.append(path)
        if result.spec.json_mirror:
            mirror = out / f"{result.spec.name}.json"
            mirror.write_text(format_json(result), encoding="utf-8")
            written.append(mirror)
    man = out / f"{result.spec.name}.manifest.json"
    man.write_text(json.dumps(manifest(result), indent=1, default=str) + "\n", encoding="utf-8")
    written.append(man)
    return written
