"""Eigenvalues of the mean-field matrix M and the fluctuation matrix M'.

Both matrices have the form

    [[-gamma/2 - i d,   -2i c ],
     [ 2i c*,           -gamma/2 + i d]]

with (d, |c|) = (Delta', G) for M and (Delta'', |G'|) for M', so their
eigenvalues are -gamma/2 +/- sqrt(4|c|^2 - d^2). The closed form is used
instead of a generic eigensolver; it is exact and fixes the branch of the
square root (sqrt of a negative number is +i sqrt(|.|), the ``plus``
eigenvalue carries +sqrt).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .params import CavityParams

if TYPE_CHECKING:
    from .meanfield import SteadyStateBranch

__all__ = [
    "TOL_STAB",
    "EigenSpectrum",
    "eigenpair",
    "eigen_meanfield",
    "eigen_fluctuation",
    "classify",
    "spectrum",
]

#: Eigenvalues with real part in [-TOL_STAB*gamma, inf) count as unstable.
TOL_STAB = 1e-12


@dataclass(frozen=True)
class EigenSpectrum:
    lambda_cap_plus: complex
    lambda_cap_minus: complex
    lambda_low_plus: complex
    lambda_low_minus: complex
    mf_stable: bool
    fluct_stable: bool


def eigenpair(gamma: float, coupling: float, detuning: float) -> tuple[complex, complex]:
    """Return ``(-gamma/2 + sqrt(4 c^2 - d^2), -gamma/2 - sqrt(4 c^2 - d^2))``.

    ``coupling`` is the modulus |c| >= 0. Near the critical point the ``plus``
    root is a small difference of O(gamma) numbers, so it is evaluated in the
    rationalized form ((2c - gamma/2)(2c + gamma/2) - d^2) / (gamma/2 + s).
    """
    half = 0.5 * gamma
    disc = (2.0 * coupling - detuning) * (2.0 * coupling + detuning)
    if disc >= 0.0:
        s = math.sqrt(disc)
        plus = ((2.0 * coupling - half) * (2.0 * coupling + half) - detuning * detuning) / (half + s)
        minus = -half - s
        # the rationalized form can land one ulp below minus when s = 0
        return complex(max(plus, minus), 0.0), complex(minus, 0.0)
    s = math.sqrt(-disc)
    return complex(-half, s), complex(-half, -s)


def eigen_meanfield(p: CavityParams, delta_prime: float) -> tuple[complex, complex]:
    return eigenpair(p.gamma, p.g2, delta_prime)


def eigen_fluctuation(p: CavityParams, branch: SteadyStateBranch) -> tuple[complex, complex]:
    return eigenpair(p.gamma, abs(branch.g_prime), branch.delta_dprime)


def _stable(pair: tuple[complex, complex], gamma: float) -> bool:
    return max(pair[0].real, pair[1].real) < -TOL_STAB * gamma


def spectrum(p: CavityParams, branch: SteadyStateBranch) -> EigenSpectrum:
    cap = eigen_meanfield(p, branch.delta_prime)
    low = eigen_fluctuation(p, branch)
    return EigenSpectrum(
        lambda_cap_plus=cap[0],
        lambda_cap_minus=cap[1],
        lambda_low_plus=low[0],
        lambda_low_minus=low[1],
        mf_stable=_stable(cap, p.gamma),
        fluct_stable=_stable(low, p.gamma),
    )


def classify(p: CavityParams, branch: SteadyStateBranch) -> tuple[bool, bool]:
    """Set and return ``(mf_stable, fluct_stable)`` on ``branch``.

    Marginal eigenvalues (within TOL_STAB of zero) are reported unstable.
    """
    spec = spectrum(p, branch)
    branch.mf_stable = spec.mf_stable
    branch.fluct_stable = spec.fluct_stable
    return spec.mf_stable, spec.fluct_stable

