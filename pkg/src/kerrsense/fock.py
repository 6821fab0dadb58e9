"""Exact steady state of the Kerr cavity master equation in a truncated Fock space.

    d rho/dt = -i [H, rho] + gamma (a rho a+ - {a+ a, rho}/2)
    H = Delta a+a + U a+a+aa + i eps (a+ - a) + G (a+^2 + a^2)

This module is the brute-force reference for the mean-field and Gaussian
noise models. It knows nothing about them beyond the comparison helper at
the bottom.

Truncation basis
----------------
``frame="number"`` uses the plain photon-number basis. Near threshold the
steady state is strongly squeezed and the plain basis converges slowly, so
``frame="gaussian"`` works in a displaced-squeezed number basis: the mode
operator is represented as

    a -> cosh(r) a - e^{i theta} sinh(r) a+ + beta

which is the exact unitary change of frame T = D(beta) S(r e^{i theta}).
The frame is estimated from the state itself (a plain solve, then a couple
of refinement passes), so no mean-field input is used.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateNullSpace, OracleError, RegimeTooHot
from .params import CavityParams

__all__ = [
    "FockConfig",
    "Frame",
    "OracleResult",
    "DiscrepancyReport",
    "liouvillian",
    "lindblad_steady_state",
    "propagate",
    "liouvillian_gap",
    "compare_with_meanfield",
]

HARD_CAP = 512
_DOUBLING_TOL = 1e-6


@dataclass(frozen=True)
class FockConfig:
    cutoff: int = 32
    auto_grow: bool = True
    tail_tol: float = 1e-10
    hard_cap: int = HARD_CAP
    frame: str = "number"
    frame_passes: int = 2

    def __post_init__(self) -> None:
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise ValueError(f"cutoff must be an integer >= 2, got {self.cutoff!r}")
        if self.hard_cap > HARD_CAP or self.cutoff > self.hard_cap:
            raise ValueError(f"cutoff {self.cutoff} must not exceed the hard cap {min(self.hard_cap, HARD_CAP)}")
        if not 0.0 < self.tail_tol <= 1e-2:
            raise ValueError(f"tail_tol must lie in (0, 1e-2], got {self.tail_tol!r}")
        if self.frame not in ("number", "gaussian"):
            raise ValueError(f"frame must be 'number' or 'gaussian', got {self.frame!r}")


@dataclass(frozen=True)
class Frame:
    beta: complex = 0j
    r: float = 0.0
    theta: float = 0.0

    @classmethod
    def from_moments(cls, mean: complex, n_fluct: float, m_anom: complex) -> Frame:
        """Frame in which a Gaussian state with these moments is thermal."""
        mod = abs(m_anom)
        if mod == 0.0:
            return cls(complex(mean), 0.0, 0.0)
        t = min(2.0 * mod / (2.0 * max(n_fluct, 0.0) + 1.0), 0.999)
        theta = math.atan2(-m_anom.imag, -m_anom.real)
        return cls(complex(mean), 0.5 * math.atanh(t), theta)


@dataclass(frozen=True)
class OracleResult:
    expect_a: complex
    expect_n: float
    n_fluct: float
    m_anom: complex
    purity: float
    tail_mass: float
    cutoff: int
    frame: Frame = field(default_factory=Frame)
    trace_error: float = 0.0
    hermiticity_error: float = 0.0
    min_eigenvalue: float = 0.0
    residual: float = 0.0
    rho: np.ndarray | None = field(default=None, repr=False, compare=False)


def _mode_operator(n: int, frame: Frame) -> sp.csr_matrix:
    a = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr", dtype=complex)
    if frame.r == 0.0 and frame.beta == 0:
        return a
    ad = a.conj().T.tocsr()
    b = math.cosh(frame.r) * a - complex(math.cos(frame.theta), math.sin(frame.theta)) * math.sinh(frame.r) * ad
    return (b + frame.beta * sp.identity(n, dtype=complex, format="csr")).tocsr()


def liouvillian(p: CavityParams, n: int, frame: Frame = Frame()) -> tuple[sp.csc_matrix, sp.csr_matrix]:
    """Sparse Liouvillian acting on row-major ``rho.ravel()``, and the mode operator.

    Uses vec(A rho B) = (A kron B^T) vec(rho).
    """
    b = _mode_operator(n, frame)
    bd = b.conj().T.tocsr()
    ident = sp.identity(n, dtype=complex, format="csr")
    num = bd @ b
    ham = p.delta * num + p.u_kerr * (bd @ bd @ b @ b) + 1j * p.eps * (bd - b) + p.g2 * (bd @ bd + b @ b)
    liou = -1j * (sp.kron(ham, ident) - sp.kron(ident, ham.T))
    liou = liou + p.gamma * (sp.kron(b, b.conj()) - 0.5 * sp.kron(num, ident) - 0.5 * sp.kron(ident, num.T))
    return liou.tocsc(), b


def _expect(op: sp.spmatrix, rho: np.ndarray) -> complex:
    # Tr(rho op) = sum_ij rho_ji op_ij
    return complex(op.multiply(rho.T).sum())


def _observables(rho: np.ndarray, b: sp.csr_matrix, n: int, frame: Frame, residual: float) -> OracleResult:
    trace = np.trace(rho)
    herm_err = float(np.max(np.abs(rho - rho.conj().T))) if n else 0.0
    rho_h = 0.5 * (rho + rho.conj().T)
    rho_h = rho_h / np.trace(rho_h).real
    bd = b.conj().T.tocsr()
    ea = _expect(b, rho_h)
    en = _expect(bd @ b, rho_h).real
    eaa = _expect(b @ b, rho_h)
    pops = np.real(np.diag(rho_h))
    return OracleResult(
        expect_a=ea,
        expect_n=en,
        n_fluct=en - abs(ea) ** 2,
        m_anom=eaa - ea * ea,
        purity=float(np.sum(np.abs(rho_h) ** 2)),
        tail_mass=float(max(pops[-2:].sum(), 0.0)),
        cutoff=n,
        frame=frame,
        trace_error=float(abs(trace - 1.0)),
        hermiticity_error=herm_err,
        min_eigenvalue=float(np.linalg.eigvalsh(rho_h)[0]),
        residual=residual,
        rho=rho_h,
    )


def _null_vector(liou: sp.csc_matrix, n: int) -> tuple[np.ndarray, float]:
    # Replace the d rho_00/dt row by the trace constraint.
    rows = liou.tolil()
    trace_row = np.zeros(n * n, dtype=complex)
    trace_row[:: n + 1] = 1.0
    rows[0, :] = trace_row
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.splu(rows.tocsc()).solve(rhs)
        except (RuntimeError, spla.MatrixRankWarning) as exc:
            raise DegenerateNullSpace(
                f"Liouvillian null space is not one-dimensional at cutoff {n}: {exc}",
                {"gap": _safe_gap(liou)},
            ) from exc
    residual = float(np.linalg.norm(liou @ x))
    if not np.all(np.isfinite(x)):
        raise DegenerateNullSpace(f"steady-state solve produced non-finite values at cutoff {n}", {"gap": _safe_gap(liou)})
    return x.reshape(n, n), residual


def _safe_gap(liou: sp.csc_matrix) -> list[complex] | None:
    if liou.shape[0] > 4096:
        return None
    try:
        vals = np.linalg.eigvals(liou.toarray())
    except np.linalg.LinAlgError:
        return None
    return sorted(vals, key=abs)[:4]


def _solve_at(p: CavityParams, n: int, frame: Frame) -> OracleResult:
    liou, b = liouvillian(p, n, frame)
    rho, residual = _null_vector(liou, n)
    return _observables(rho, b, n, frame, residual)


def _solve_with_frame(p: CavityParams, n: int, cfg: FockConfig) -> OracleResult:
    res = _solve_at(p, n, Frame())
    if cfg.frame == "gaussian":
        for _ in range(cfg.frame_passes):
            res = _solve_at(p, n, Frame.from_moments(res.expect_a, res.n_fluct, res.m_anom))
    return res


def lindblad_steady_state(p: CavityParams, cfg: FockConfig = FockConfig(), cross_check: bool = False) -> OracleResult:
    """Steady state from the null vector of the vectorized Liouvillian.

    Accepted once the population of the top two basis states is below
    ``cfg.tail_tol``, or once doubling the cutoff moves <a+a> by less than
    1e-6 relative. With ``auto_grow`` the cutoff doubles up to the hard cap;
    running out of room raises :class:`RegimeTooHot`. ``cross_check`` also
    propagates the master equation from the vacuum and demands agreement.
    """
    n = int(cfg.cutoff)
    previous = None
    history = []
    while True:
        res = _solve_with_frame(p, n, cfg)
        history.append((n, res.expect_n, res.tail_mass))
        accepted = res.tail_mass <= cfg.tail_tol
        if not accepted and previous is not None:
            accepted = abs(res.expect_n - previous.expect_n) < _DOUBLING_TOL * abs(res.expect_n)
        if accepted:
            break
        if not cfg.auto_grow or n >= cfg.hard_cap:
            raise RegimeTooHot(
                "regime too hot for oracle: no normalizable steady state at this cutoff growth "
                f"(tail mass {res.tail_mass:.3g} > {cfg.tail_tol:.3g} at cutoff {n})",
                {"history": history},
            )
        previous = res
        n = min(2 * n, cfg.hard_cap)
    if cross_check:
        n_prop = propagate(p, res.cutoff, frame=res.frame).expect_n
        if abs(n_prop - res.expect_n) > 1e-6 * max(abs(res.expect_n), 1e-12):
            raise OracleError(
                f"null vector and long-time propagation disagree: {res.expect_n!r} vs {n_prop!r}",
                {"history": history},
            )
    return res


def propagate(
    p: CavityParams,
    cutoff: int,
    t_final: float | None = None,
    frame: Frame = Frame(),
    chunk: float | None = None,
    max_chunks: int = 200,
    tol: float = 1e-10,
) -> OracleResult:
    """Long-time propagation from the frame vacuum with ``expm_multiply``.

    Runs in chunks until <a+a> changes by less than ``tol`` (relative) over a
    chunk, or until ``t_final`` if given.
    """
    liou, b = liouvillian(p, cutoff, frame)
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    vec[0] = 1.0
    dt = chunk if chunk is not None else 20.0 / p.gamma
    bd_b = (b.conj().T @ b).tocsr()
    last = None
    t = 0.0
    for _ in range(max_chunks):
        vec = spla.expm_multiply(liou * dt, vec)
        t += dt
        rho = vec.reshape(cutoff, cutoff)
        en = _expect(bd_b, rho).real / np.trace(rho).real
        if t_final is not None:
            if t >= t_final:
                break
        elif last is not None and abs(en - last) <= tol * max(abs(en), 1e-12):
            break
        last = en
    else:
        if t_final is None:
            raise OracleError(f"propagation did not settle within t = {t:.4g}")
    rho = vec.reshape(cutoff, cutoff)
    return _observables(rho / np.trace(rho), b, cutoff, frame, float(np.linalg.norm(liou @ vec)))


def liouvillian_gap(p: CavityParams, cutoff: int, k: int = 4, frame: Frame = Frame()) -> np.ndarray:
    """The ``k`` Liouvillian eigenvalues closest to zero (dense, small cutoffs only)."""
    liou, _ = liouvillian(p, cutoff, frame)
    if cutoff * cutoff > 4096:
        vals = spla.eigs(liou, k=k, sigma=0, return_eigenvectors=False)
    else:
        vals = np.linalg.eigvals(liou.toarray())
    return np.array(sorted(vals, key=abs)[:k])


@dataclass(frozen=True)
class DiscrepancyReport:
    oracle: OracleResult
    mf_alpha: complex
    mf_n_total: float
    mf_n_fluct: float
    mf_m_anom: complex
    rel_alpha: float
    rel_n: float
    rel_n_fluct: float
    rel_m_anom: float
    u_n_over_g: float | None
    u_over_gamma: float


def _rel(value: complex, reference: complex, floor: float = 1e-9) -> float:
    return abs(value - reference) / max(abs(reference), floor)


def compare_with_meanfield(p: CavityParams, cfg: FockConfig = FockConfig()) -> DiscrepancyReport:
    """Relative differences between mean-field + Gaussian noise and the exact state.

    ``<a+a>`` of the approximate model is |alpha|^2 + <da+da>. The oracle is
    solved first so that its errors propagate unchanged.
    """
    from .fluctuations import noise_steady_state
    from .meanfield import steady_state_closed_form

    ref = lindblad_steady_state(p, cfg)
    br = steady_state_closed_form(p).branch
    noise = noise_steady_state(br, p)
    n_total = br.n_mean + noise.n_fluct
    return DiscrepancyReport(
        oracle=ref,
        mf_alpha=br.alpha,
        mf_n_total=n_total,
        mf_n_fluct=noise.n_fluct,
        mf_m_anom=noise.m_anom,
        rel_alpha=_rel(br.alpha, ref.expect_a),
        rel_n=_rel(n_total, ref.expect_n),
        rel_n_fluct=_rel(noise.n_fluct, ref.n_fluct),
        rel_m_anom=_rel(noise.m_anom, ref.m_anom),
        u_n_over_g=(p.u_kerr * br.n_mean / p.g2) if p.g2 > 0.0 else None,
        u_over_gamma=p.u_kerr / p.gamma,
    )
