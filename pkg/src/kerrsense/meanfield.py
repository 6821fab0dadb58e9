"""Semiclassical steady states of the driven Kerr cavity.

The amplitude obeys

    d alpha/dt = (-gamma/2 - i Delta') alpha - 2i G alpha* + eps,
    Delta' = Delta + 2 U |alpha|^2.

For fixed Delta' the fixed point is linear in alpha; requiring
|alpha|^2 = x self-consistently gives the quintic

    x [Delta'(x)^2 + gamma^2/4 - 4 G^2]^2 = eps^2 [gamma^2/4 + (Delta'(x) + 2G)^2]

whose real nonnegative roots enumerate all branches. The time-marching
solver is kept as an independent check of that enumeration.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DivergentSteadyState, NonConvergence, SolverFailure
from .params import CavityParams
from .stability import TOL_STAB, classify, eigen_meanfield, eigenpair

__all__ = [
    "TOL_ROOT",
    "SteadyStateBranch",
    "BranchSet",
    "mean_field_rhs",
    "effective_params",
    "self_consistency_poly",
    "steady_state_closed_form",
    "steady_state_time_march",
    "select_branch",
]

TOL_ROOT = 1e-9
_IMAG_WINDOW = 1e-8
_CLAMP = 1e-12
_DIVERGED = 1e100


@dataclass
class SteadyStateBranch:
    alpha: complex
    n_mean: float
    delta_prime: float
    delta_dprime: float
    g_prime: complex
    residual: float
    mf_stable: bool | None = None
    fluct_stable: bool | None = None

    @classmethod
    def from_alpha(cls, alpha: complex, p: CavityParams) -> SteadyStateBranch:
        alpha = complex(alpha)
        d1, d2, gp = effective_params(alpha, p)
        return cls(
            alpha=alpha,
            n_mean=abs(alpha) ** 2,
            delta_prime=d1,
            delta_dprime=d2,
            g_prime=gp,
            residual=abs(mean_field_rhs(alpha, p)),
        )

    @property
    def stable(self) -> bool:
        return bool(self.mf_stable) and bool(self.fluct_stable)


@dataclass
class BranchSet:
    branches: list[SteadyStateBranch]
    selected: int
    params: CavityParams | None = field(default=None, repr=False)

    @property
    def branch(self) -> SteadyStateBranch:
        return self.branches[self.selected]

    def __len__(self) -> int:
        return len(self.branches)


def effective_params(alpha: complex, p: CavityParams) -> tuple[float, float, complex]:
    """Kerr-dressed (Delta', Delta'', G') at amplitude ``alpha``."""
    n = abs(alpha) ** 2
    return (
        p.delta + 2.0 * p.u_kerr * n,
        p.delta + 4.0 * p.u_kerr * n,
        p.g2 + p.u_kerr * complex(alpha) ** 2,
    )


def mean_field_rhs(alpha: complex, p: CavityParams) -> complex:
    dp = p.delta + 2.0 * p.u_kerr * abs(alpha) ** 2
    return complex(-0.5 * p.gamma, -dp) * alpha - 2j * p.g2 * alpha.conjugate() + p.eps


def self_consistency_poly(p: CavityParams) -> np.ndarray:
    """Coefficients (lowest order first) of x det(x)^2 - eps^2 num(x)."""
    u, d, g, gam = p.u_kerr, p.delta, p.g2, p.gamma
    det = np.array([d * d + 0.25 * gam * gam - 4.0 * g * g, 4.0 * u * d, 4.0 * u * u])
    num = np.array([0.25 * gam * gam + (d + 2.0 * g) ** 2, 4.0 * u * (d + 2.0 * g), 4.0 * u * u])
    lhs = np.polynomial.polynomial.polymul([0.0, 1.0], np.polynomial.polynomial.polymul(det, det))
    return np.polynomial.polynomial.polysub(lhs, p.eps * p.eps * num)


def _companion_roots(coeffs: np.ndarray) -> tuple[np.ndarray, float]:
    """Roots of a polynomial via eigenvalues of its companion matrix.

    The variable is rescaled by the geometric mean root magnitude first; at
    U ~ 1e-9 the raw coefficients span ~30 decades.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    deg = len(c) - 1
    if deg < 1:
        return np.array([], dtype=complex), 1.0
    scale = 1.0
    if c[0] != 0.0:
        scale = (abs(c[0]) / abs(c[-1])) ** (1.0 / deg)
    b = c * scale ** np.arange(deg + 1)
    b = b / b[-1]
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -b[:-1]
    return np.linalg.eigvals(comp), scale


def _polish(coeffs: np.ndarray, x: float, iters: int = 4) -> float:
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    best, best_val = x, abs(poly(x))
    for _ in range(iters):
        slope = dpoly(x)
        if slope == 0.0:
            break
        x = x - poly(x) / slope
        val = abs(poly(x))
        if val < best_val:
            best, best_val = x, val
        else:
            break
    return best


def _newton_alpha(alpha: complex, p: CavityParams, iters: int = 4) -> complex:
    """Refine a fixed point on the full mean-field equations (2x2 real Newton)."""
    for _ in range(iters):
        f = mean_field_rhs(alpha, p)
        jac = _real_jacobian(alpha, p)
        step = np.linalg.solve(jac, [-f.real, -f.imag])
        alpha = alpha + complex(step[0], step[1])
    return alpha


def _real_jacobian(alpha: complex, p: CavityParams) -> np.ndarray:
    # df = A dalpha + B dalpha*, the fluctuation matrix M'.
    _, d2, gp = effective_params(alpha, p)
    a = complex(-0.5 * p.gamma, -d2)
    b = -2j * gp
    col_x = a + b
    col_y = 1j * (a - b)
    return np.array([[col_x.real, col_y.real], [col_x.imag, col_y.imag]])


def _roots_driven(p: CavityParams) -> list[complex]:
    coeffs = self_consistency_poly(p)
    roots, scale = _companion_roots(coeffs)
    alphas = []
    for r in roots * scale:
        if abs(r.imag) > _IMAG_WINDOW * max(1.0, abs(r)):
            continue
        x = r.real
        if x < -_CLAMP:
            continue
        x = max(_polish(coeffs, x), 0.0)
        dp = p.delta + 2.0 * p.u_kerr * x
        det = dp * dp + 0.25 * p.gamma**2 - 4.0 * p.g2**2
        if det == 0.0:
            continue
        alphas.append(complex(0.5 * p.gamma, -(dp + 2.0 * p.g2)) * p.eps / det)
    return alphas


def _roots_undriven(p: CavityParams) -> list[complex]:
    # eps = 0: vacuum, plus Z2-symmetric pairs where det(x) = 0 with x > 0.
    alphas = [0j]
    if p.u_kerr == 0.0 or p.g2 == 0.0:
        return alphas
    disc = (2.0 * p.g2 - 0.5 * p.gamma) * (2.0 * p.g2 + 0.5 * p.gamma)
    if disc <= 0.0:
        return alphas
    for dp in (math.sqrt(disc), -math.sqrt(disc)):
        x = (dp - p.delta) / (2.0 * p.u_kerr)
        if x <= 0.0:
            continue
        z = 2j * p.g2 / complex(-0.5 * p.gamma, -dp)
        a = math.sqrt(x) * cmath.exp(0.5j * cmath.phase(z))
        alphas.extend([a, -a])
    return alphas


def select_branch(
    branches: list[SteadyStateBranch], policy: str = "lowest", previous: complex | None = None
) -> int:
    """Index of the physically chosen branch.

    Preference order: stable under both M and M', then under M only, then
    under M' only, then anything. ``lowest`` takes the smallest photon number among the
    preferred group, ``continuity`` the one closest to ``previous``.
    """
    if not branches:
        raise ValueError("no branches to select from")
    pool = [i for i, b in enumerate(branches) if b.stable]
    for attr in ("mf_stable", "fluct_stable"):
        if not pool:
            pool = [i for i, b in enumerate(branches) if getattr(b, attr)]
    if not pool:
        pool = list(range(len(branches)))
    if policy == "continuity" and previous is not None:
        return min(pool, key=lambda i: (abs(branches[i].alpha - previous), i))
    if policy not in ("lowest", "continuity"):
        raise ValueError(f"unknown branch policy {policy!r}")
    return min(pool, key=lambda i: (branches[i].n_mean, i))


def steady_state_closed_form(
    p: CavityParams, policy: str = "lowest", previous: complex | None = None
) -> BranchSet:
    """All verified mean-field fixed points, sorted by photon number."""
    if p.u_kerr == 0.0:
        return _linear_steady_state(p)

    candidates = _roots_driven(p) if p.eps > 0.0 else _roots_undriven(p)
    branches = []
    rejected = []
    for alpha in candidates:
        br = SteadyStateBranch.from_alpha(alpha, p)
        if br.residual > TOL_ROOT:
            br = SteadyStateBranch.from_alpha(_newton_alpha(alpha, p), p)
        if br.residual > TOL_ROOT:
            rejected.append((alpha, br.residual))
            continue
        classify(p, br)
        branches.append(br)
    if not branches:
        raise SolverFailure(
            "no root of the self-consistency polynomial passed residual verification",
            {"candidates": rejected, "coefficients": self_consistency_poly(p).tolist()},
        )
    branches.sort(key=lambda b: (b.n_mean, math.atan2(b.alpha.imag, b.alpha.real)))
    return BranchSet(branches, select_branch(branches, policy, previous), p)


def _linear_steady_state(p: CavityParams) -> BranchSet:
    det = p.delta**2 + 0.25 * p.gamma**2 - 4.0 * p.g2**2
    lam = eigen_meanfield(p, p.delta)
    if det == 0.0 or max(lam[0].real, lam[1].real) >= -TOL_STAB * p.gamma:
        raise DivergentSteadyState(
            f"unstable/divergent linear system: U = 0 with Lambda+ = {lam[0].real:.6g} "
            f"(G = {p.g2:.6g}, critical G0 = {p.gamma / 4:.6g})"
        )
    alpha = complex(0.5 * p.gamma, -(p.delta + 2.0 * p.g2)) * p.eps / det
    br = SteadyStateBranch.from_alpha(alpha, p)
    classify(p, br)
    return BranchSet([br], 0, p)


def _default_t_max(p: CavityParams) -> float:
    rates = [p.gamma]
    try:
        br = steady_state_closed_form(p).branch
        pairs = [eigen_meanfield(p, br.delta_prime), eigenpair(p.gamma, abs(br.g_prime), br.delta_dprime)]
    except (DivergentSteadyState, SolverFailure):
        pairs = [eigen_meanfield(p, p.delta)]
    for pair in pairs:
        slow = abs(pair[0].real)
        if slow > TOL_STAB * p.gamma:
            rates.append(slow)
    return min(1e3 / min(rates), 1e15 / p.gamma)


def steady_state_time_march(
    p: CavityParams,
    alpha0: complex = 0j,
    t_max: float | None = None,
    tol: float = 1e-12,
    rtol: float = 1e-10,
) -> SteadyStateBranch:
    """Integrate the mean-field equation until it settles.

    Settled means |d alpha/dt| < tol * max(1, |alpha|). The system is stiff
    near the critical point (rates from gamma down to ~1e-6 gamma), so an
    implicit Runge-Kutta scheme (Radau IIA with embedded error control) is
    used with the analytic Jacobian.
    """
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    if t_max is None:
        t_max = _default_t_max(p)

    def rhs(t, y):
        f = mean_field_rhs(complex(y[0], y[1]), p)
        return [f.real, f.imag]

    def jac(t, y):
        return _real_jacobian(complex(y[0], y[1]), p)

    def settled(t, y):
        a = complex(y[0], y[1])
        return abs(mean_field_rhs(a, p)) - tol * max(1.0, abs(a))

    settled.terminal = True
    settled.direction = -1

    def diverged(t, y):
        return math.hypot(y[0], y[1]) - _DIVERGED

    diverged.terminal = True

    alpha0 = complex(alpha0)
    if settled(0.0, [alpha0.real, alpha0.imag]) < 0.0:
        br = SteadyStateBranch.from_alpha(alpha0, p)
        classify(p, br)
        return br

    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        [alpha0.real, alpha0.imag],
        method="Radau",
        jac=jac,
        rtol=rtol,
        atol=rtol * 1e-3,
        events=[settled, diverged],
    )
    y = sol.y[:, -1]
    alpha = complex(y[0], y[1])
    residual = abs(mean_field_rhs(alpha, p))
    if sol.status == 1 and len(sol.t_events[0]):
        ye = sol.y_events[0][0]
        br = SteadyStateBranch.from_alpha(complex(ye[0], ye[1]), p)
        classify(p, br)
        return br
    reason = "diverged" if sol.status == 1 else ("did not settle" if sol.status == 0 else sol.message)
    raise NonConvergence(
        f"mean-field time march {reason} by t = {sol.t[-1]:.4g} (residual {residual:.3g})",
        state=alpha,
        residual=residual,
        t_final=float(sol.t[-1]),
    )
