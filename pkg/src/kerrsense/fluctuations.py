"""Quantum noise on top of the mean-field branch.

The fluctuation correlators n = <da+ da> and m = <da da> obey

    dn/dt = -gamma n - 2i G' m* + 2i G'* m
    dm/dt = (-2i Delta'' - gamma) m - 2i G' (2n + 1) - 2i U (2 <da+ da da da> + m)

closed with the Gaussian factorization <da+ da da da> = 3 n m. The bath is
vacuum white noise, which is where the "+1" in the m equation comes from.
The state is integrated as the real triple (n, Re m, Im m); <da+ da+> is
always m*, never an independent variable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from .errors import KerrSenseError, NonConvergence, PreconditionError, SolverFailure
from .flags import RowFlag, flags_text
from .meanfield import SteadyStateBranch, steady_state_closed_form
from .params import CavityParams
from .stability import TOL_STAB, classify, eigen_fluctuation

__all__ = [
    "NoiseState",
    "SnrReport",
    "Fig4Row",
    "noise_dynamics_rhs",
    "noise_steady_state",
    "snr",
    "fig4_curves",
    "physicality_tolerance",
]

_REAL_TOL = 1e-12
_AGREE_TOL = 1e-6


@dataclass(frozen=True)
class NoiseState:
    n_fluct: float
    m_anom: complex
    physical: bool = True

    def as_vector(self) -> np.ndarray:
        return np.array([self.n_fluct, self.m_anom.real, self.m_anom.imag])

    @property
    def positivity_excess(self) -> float:
        """|m|^2 - n(n+1); positive values violate Gaussian-state positivity."""
        return abs(self.m_anom) ** 2 - self.n_fluct * (self.n_fluct + 1.0)


@dataclass(frozen=True)
class SnrReport:
    signal: float
    noise: float
    snr_db: float | None
    infinite: bool = False

    def as_dict(self) -> dict:
        return {"signal": self.signal, "noise": self.noise, "snr_db": self.snr_db, "snr_infinite": self.infinite}


def physicality_tolerance(n: float) -> float:
    return 1e-6 * (n + 1.0) ** 2


def _rhs_complex(n: float, m: complex, d2: float, gp: complex, p: CavityParams) -> tuple[float, complex]:
    dn = -p.gamma * n - 2j * gp * m.conjugate() + 2j * gp.conjugate() * m
    scale = p.gamma * abs(n) + 4.0 * abs(gp) * abs(m)
    if abs(dn.imag) > _REAL_TOL * max(scale, 1e-300):
        raise SolverFailure(f"d<da+da>/dt acquired an imaginary part {dn.imag:.3g} (scale {scale:.3g})")
    u = p.u_kerr
    dm = complex(-p.gamma, -2.0 * d2) * m - 2j * gp * (2.0 * n + 1.0) - 2j * u * (6.0 * n * m + m)
    return dn.real, dm


def noise_dynamics_rhs(state: NoiseState, branch: SteadyStateBranch, p: CavityParams) -> tuple[float, complex]:
    """Time derivatives ``(dn/dt, dm/dt)`` of the closed correlator equations."""
    return _rhs_complex(state.n_fluct, complex(state.m_anom), branch.delta_dprime, branch.g_prime, p)


def _real_system(branch: SteadyStateBranch, p: CavityParams):
    d2, gp, u = branch.delta_dprime, complex(branch.g_prime), p.u_kerr

    def f(y):
        dn, dm = _rhs_complex(y[0], complex(y[1], y[2]), d2, gp, p)
        return np.array([dn, dm.real, dm.imag])

    def jac(y):
        n, m = y[0], complex(y[1], y[2])
        c = complex(-p.gamma, -2.0 * d2) - 2j * u * (6.0 * n + 1.0)
        dm_dn = -4j * gp - 12j * u * m
        return np.array(
            [
                [-p.gamma, 4.0 * gp.imag, -4.0 * gp.real],
                [dm_dn.real, c.real, -c.imag],
                [dm_dn.imag, c.imag, c.real],
            ]
        )

    return f, jac


def _default_t_max(branch: SteadyStateBranch, p: CavityParams) -> float:
    slow = abs(eigen_fluctuation(p, branch)[0].real)
    if slow <= TOL_STAB * p.gamma:
        slow = TOL_STAB * p.gamma
    return min(1e3 * max(1.0 / p.gamma, 1.0 / slow), 1e15 / p.gamma)


def noise_steady_state(
    branch: SteadyStateBranch,
    p: CavityParams,
    tol: float = 1e-12,
    t_max: float | None = None,
    rtol: float = 1e-8,
    require_stable: bool = True,
) -> NoiseState:
    """Steady-state correlators reached from the vacuum.

    Time-marches until |d state/dt| < tol * max(1, |state|), then polishes the
    end point with a trust-region Newton solve on the three real unknowns.
    The two results must agree to 1e-6 relative (absolute below |y| = 1).
    """
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    if branch.fluct_stable is None:
        classify(p, branch)
    if require_stable and not branch.fluct_stable:
        lam = eigen_fluctuation(p, branch)[0]
        raise PreconditionError(f"branch is not fluctuation-stable (Re lambda+ = {lam.real:.4g})")
    if t_max is None:
        t_max = _default_t_max(branch, p)

    f, jac = _real_system(branch, p)

    def settled(t, y):
        return np.linalg.norm(f(y)) - tol * max(1.0, np.linalg.norm(y))

    settled.terminal = True
    settled.direction = -1

    y0 = np.zeros(3)
    if settled(0.0, y0) < 0.0:
        y_march = y0
    else:
        sol = solve_ivp(
            lambda t, y: f(y),
            (0.0, t_max),
            y0,
            method="Radau",
            jac=lambda t, y: jac(y),
            rtol=rtol,
            atol=1e-12,
            events=settled,
        )
        if sol.status != 1:
            yf = sol.y[:, -1]
            res = float(np.linalg.norm(f(yf)))
            raise NonConvergence(
                f"noise integration did not settle by t = {sol.t[-1]:.4g} ({sol.message})",
                state=NoiseState(float(yf[0]), complex(yf[1], yf[2])),
                residual=res,
                t_final=float(sol.t[-1]),
            )
        y_march = sol.y_events[0][0]

    polished = root(f, y_march, jac=jac, method="hybr", options={"xtol": 1e-14})
    y_newton = polished.x
    # same max(1, |y|) floor as the settling test
    scale = max(np.linalg.norm(y_newton), 1.0)
    gap = np.linalg.norm(y_march - y_newton) / scale
    if not polished.success and np.linalg.norm(f(y_newton)) > tol * max(1.0, scale):
        raise SolverFailure(f"Newton polish failed: {polished.message}", {"march": y_march, "newton": y_newton})
    if gap > _AGREE_TOL:
        raise SolverFailure(
            f"time march and Newton polish disagree by {gap:.3g} (relative)",
            {"march": y_march.tolist(), "newton": y_newton.tolist()},
        )
    n = float(y_newton[0])
    m = complex(y_newton[1], y_newton[2])
    excess = abs(m) ** 2 - n * (n + 1.0)
    ok = n >= -physicality_tolerance(0.0) and excess <= physicality_tolerance(n)
    return NoiseState(max(n, 0.0), m, physical=ok)


def snr(branch: SteadyStateBranch, noise: NoiseState) -> SnrReport:
    """10 log10(|alpha|^2 / <da+ da>) with a sentinel for vanishing noise."""
    signal = branch.n_mean
    if noise.n_fluct <= 0.0:
        return SnrReport(signal, noise.n_fluct, None, infinite=True)
    if signal <= 0.0:
        return SnrReport(signal, noise.n_fluct, None, infinite=False)
    return SnrReport(signal, noise.n_fluct, 10.0 * math.log10(signal / noise.n_fluct))


@dataclass(frozen=True)
class Fig4Row:
    swept: str
    value: float
    n_mean: float
    n_fluct: float
    snr_db: float | None
    flags: int

    @property
    def flags_text(self) -> str:
        return flags_text(self.flags)


def _fig4_point(p: CavityParams, swept: str, value: float) -> Fig4Row:
    flags = RowFlag(0)
    try:
        br = steady_state_closed_form(p).branch
    except KerrSenseError:
        return Fig4Row(swept, value, math.nan, math.nan, None, int(RowFlag.STEADY_FAILED))
    if not br.mf_stable:
        flags |= RowFlag.MF_UNSTABLE
    if not br.fluct_stable:
        flags |= RowFlag.FLUCT_UNSTABLE
    try:
        noise = noise_steady_state(br, p)
    except KerrSenseError:
        return Fig4Row(swept, value, br.n_mean, math.nan, None, int(flags | RowFlag.NOISE_FAILED))
    if not noise.physical:
        flags |= RowFlag.UNPHYSICAL
    rep = snr(br, noise)
    if rep.infinite:
        flags |= RowFlag.SNR_INFINITE
    return Fig4Row(swept, value, br.n_mean, noise.n_fluct, rep.snr_db, int(flags))


def fig4_curves(p_base: CavityParams, u_grid, eps_grid) -> list[Fig4Row]:
    """Signal and noise along a Kerr sweep (at ``p_base.eps``) then a drive
    sweep (at ``p_base.u_kerr``). Failures become flagged rows."""
    rows = [_fig4_point(p_base.replace(u_kerr=float(u)), "u_kerr", float(u)) for u in u_grid]
    rows += [_fig4_point(p_base.replace(eps=float(e)), "eps", float(e)) for e in eps_grid]
    return rows
