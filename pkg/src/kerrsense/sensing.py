"""Photon-number response to the Kerr coefficient.

At the critical point (G = gamma/4, Delta = 0) and for U N << G the
self-consistency condition reduces to N^5 = eps^2 gamma^2 / (32 U^4), i.e.

    N ~ (1/2) gamma^(2/5) eps^(2/5) U^(-4/5),
    S = |dN/dU| ~ K U^(-9/5),   K = (2/5) gamma^(2/5) eps^(2/5).

The numeric sensitivity is a central difference of the quintic solution on a
continuity-tracked branch.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import KerrSenseError, ParameterError, SensitivityError
from .flags import RowFlag, flags_text
from .meanfield import BranchSet, steady_state_closed_form
from .params import CavityParams, critical_strength

__all__ = [
    "SensitivityReport",
    "Fig3Row",
    "n_analytic_cp",
    "sensitivity_analytic_cp",
    "sensitivity_numeric",
    "fig3_surface",
    "DEFAULT_REL_STEP",
]

DEFAULT_REL_STEP = 1e-3
_STEP_AGREEMENT = 0.01


@dataclass(frozen=True)
class SensitivityReport:
    u_kerr: float
    n_numeric: float
    n_analytic: float | None
    s_numeric: float
    s_analytic: float | None
    fd_step: float
    s_half_step: float
    step_disagree: bool
    validity: float | None

    def per_hz(self, gamma_hz: float) -> tuple[float, float | None]:
        """Sensitivities as dN/d(U/2pi) in 1/Hz, the axis convention of S/2pi plots."""
        s_an = None if self.s_analytic is None else self.s_analytic / gamma_hz
        return self.s_numeric / gamma_hz, s_an


def _require_positive_kerr(p: CavityParams) -> None:
    if p.u_kerr <= 0.0:
        raise ParameterError("the critical-point scaling law diverges at U = 0", field="u_kerr")


def n_analytic_cp(p: CavityParams) -> tuple[float, float]:
    """``(N, U N / G0)``; the second value must be << 1 for N to be trusted."""
    _require_positive_kerr(p)
    if p.eps <= 0.0:
        raise ParameterError("the critical-point scaling law needs eps > 0", field="eps")
    n = 0.5 * (p.gamma * p.eps) ** 0.4 * p.u_kerr ** (-0.8)
    return n, p.u_kerr * n / critical_strength(p)


def sensitivity_analytic_cp(p: CavityParams) -> tuple[float, float]:
    """``(S, K)`` with S = K U^(-9/5)."""
    _require_positive_kerr(p)
    k = 0.4 * (p.gamma * p.eps) ** 0.4
    return k * p.u_kerr ** (-1.8), k


def _tracked_n(p: CavityParams, previous: complex, side: str) -> float:
    try:
        bs = steady_state_closed_form(p, policy="continuity", previous=previous)
    except KerrSenseError as exc:
        raise SensitivityError(f"steady state failed on the {side} side (U = {p.u_kerr:.6g}): {exc}", side) from exc
    if not bs.branch.stable:
        raise SensitivityError(f"no stable branch on the {side} side (U = {p.u_kerr:.6g})", side)
    return bs.branch.n_mean


def _central_difference(p: CavityParams, alpha: complex, h: float) -> float:
    u = p.u_kerr
    n_hi = _tracked_n(p.replace(u_kerr=u * (1.0 + h)), alpha, "upper")
    n_lo = _tracked_n(p.replace(u_kerr=u * (1.0 - h)), alpha, "lower")
    return abs(n_hi - n_lo) / (2.0 * h * u)


def sensitivity_numeric(
    p: CavityParams,
    rel_step: float = DEFAULT_REL_STEP,
    base: BranchSet | None = None,
) -> SensitivityReport:
    """|dN/dU| by central differences at relative step ``rel_step``.

    The difference is repeated at half the step; ``step_disagree`` is set
    when the two differ by more than 1%.
    """
    _require_positive_kerr(p)
    if not 0.0 < rel_step < 1.0:
        raise ValueError("rel_step must lie in (0, 1)")
    if base is None:
        base = steady_state_closed_form(p)
    alpha = base.branch.alpha
    s = _central_difference(p, alpha, rel_step)
    s_half = _central_difference(p, alpha, 0.5 * rel_step)
    disagree = abs(s - s_half) > _STEP_AGREEMENT * max(abs(s), abs(s_half), 1e-300)

    n_an = s_an = validity = None
    if p.eps > 0.0:
        n_an, validity = n_analytic_cp(p)
        s_an = sensitivity_analytic_cp(p)[0]
    return SensitivityReport(
        u_kerr=p.u_kerr,
        n_numeric=base.branch.n_mean,
        n_analytic=n_an,
        s_numeric=s,
        s_analytic=s_an,
        fd_step=rel_step,
        s_half_step=s_half,
        step_disagree=disagree,
        validity=validity,
    )


@dataclass(frozen=True)
class Fig3Row:
    u_kerr: float
    g2: float
    n_mean: float
    s_numeric: float
    flags: int

    @property
    def flags_text(self) -> str:
        return flags_text(self.flags)


def _fig3_line(p_base: CavityParams, g: float, u_grid: list[float], rel_step: float) -> list[Fig3Row]:
    rows = []
    previous = None
    for u in u_grid:
        p = p_base.replace(u_kerr=u, g2=g)
        flags = RowFlag(0)
        try:
            policy = "lowest" if previous is None else "continuity"
            bs = steady_state_closed_form(p, policy=policy, previous=previous)
        except KerrSenseError:
            rows.append(Fig3Row(u, g, math.nan, math.nan, int(RowFlag.STEADY_FAILED)))
            continue
        br = bs.branch
        previous = br.alpha
        if not br.mf_stable:
            flags |= RowFlag.MF_UNSTABLE
        if not br.fluct_stable:
            flags |= RowFlag.FLUCT_UNSTABLE
        if sum(b.stable for b in bs.branches) > 1:
            flags |= RowFlag.MULTISTABLE
        try:
            rep = sensitivity_numeric(p, rel_step, base=bs)
            s = rep.s_numeric
            if rep.step_disagree:
                flags |= RowFlag.SENS_STEP_DISAGREE
        except (KerrSenseError, ValueError):
            s = math.nan
            flags |= RowFlag.SENS_FAILED
        rows.append(Fig3Row(u, g, br.n_mean, s, int(flags)))
    return rows


def fig3_surface(
    p_base: CavityParams,
    u_grid,
    g_grid,
    rel_step: float = DEFAULT_REL_STEP,
    max_workers: int = 1,
) -> list[Fig3Row]:
    """(U, G, N, S) over a grid, G-major, tracking the branch along U.

    Rows of constant G are independent and may run in parallel; the output
    order is always the grid order. Failed points are flagged, not raised.
    """
    u_grid = [float(u) for u in u_grid]
    g_grid = [float(g) for g in g_grid]
    if not u_grid or not g_grid:
        raise ValueError("grids must be non-empty")
    if max_workers > 1 and len(g_grid) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            lines = list(pool.map(_fig3_line, [p_base] * len(g_grid), g_grid, [u_grid] * len(g_grid), [rel_step] * len(g_grid)))
    else:
        lines = [_fig3_line(p_base, g, u_grid, rel_step) for g in g_grid]
    return [row for line in lines for row in line]
