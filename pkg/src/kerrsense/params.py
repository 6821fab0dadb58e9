"""Cavity parameters and unit handling.

All internal computation uses rates divided by the cavity loss rate, so a
parameter set produced by :func:`normalize` always has ``gamma == 1``.
Experimental values are usually quoted as ``X/2pi`` in Hz; since every rate
carries the same factor of 2pi, converting is a plain division by
``gamma/2pi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace

from .errors import ParameterError

__all__ = [
    "CavityParams",
    "UnitConvention",
    "normalize",
    "denormalize",
    "critical_strength",
    "REFERENCE_GAMMA_HZ",
]

#: gamma/2pi used throughout the reference operating point (1 GHz).
REFERENCE_GAMMA_HZ = 1.0e9

_RATE_FIELDS = ("gamma", "delta", "u_kerr", "eps", "g2")


class UnitConvention(enum.Enum):
    ANGULAR_NORMALIZED = "gamma"
    HZ_OVER_2PI = "hz2pi"

    @classmethod
    def parse(cls, value: str | UnitConvention) -> UnitConvention:
        if isinstance(value, cls):
            return value
        for member in cls:
            if value == member.value or value == member.name:
                return member
        raise ParameterError(f"unknown unit convention {value!r}; expected 'gamma' or 'hz2pi'")


@dataclass(frozen=True)
class CavityParams:
    """Rates of the driven Kerr cavity in the rotating frame.

    ``delta`` is the cavity-drive detuning, ``u_kerr`` the Kerr coefficient,
    ``eps`` the (real) single-photon drive and ``g2`` the (real) two-photon
    drive. Values are angular frequencies in whatever unit ``gamma`` uses.
    """

    gamma: float = 1.0
    delta: float = 0.0
    u_kerr: float = 0.0
    eps: float = 0.0
    g2: float = 0.0

    def __post_init__(self) -> None:
        for name in _RATE_FIELDS:
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a real number, got {value!r}", field=name) from None
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}", field=name)
            object.__setattr__(self, name, value)
        if self.gamma <= 0.0:
            raise ParameterError(f"gamma must be > 0, got {self.gamma!r}", field="gamma")
        for name in ("u_kerr", "eps", "g2"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}", field=name)

    @property
    def g_crit(self) -> float:
        return critical_strength(self)

    def replace(self, **changes: float) -> CavityParams:
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def normalize(raw: CavityParams, gamma_hz: float) -> CavityParams:
    """Convert ``X/2pi`` values in Hz to gamma units.

    ``raw.gamma`` is ignored; the loss rate is taken from ``gamma_hz``.

    >>> normalize(CavityParams(u_kerr=1.0), 1e9).u_kerr
    1e-09
    """
    gamma_hz = float(gamma_hz)
    if not math.isfinite(gamma_hz) or gamma_hz <= 0.0:
        raise ParameterError(f"gamma_hz must be finite and > 0, got {gamma_hz!r}", field="gamma_hz")
    return CavityParams(
        gamma=1.0,
        delta=raw.delta / gamma_hz,
        u_kerr=raw.u_kerr / gamma_hz,
        eps=raw.eps / gamma_hz,
        g2=raw.g2 / gamma_hz,
    )


def denormalize(p: CavityParams, gamma_hz: float) -> CavityParams:
    """Inverse of :func:`normalize`: gamma-unit rates to ``X/2pi`` in Hz."""
    gamma_hz = float(gamma_hz)
    if not math.isfinite(gamma_hz) or gamma_hz <= 0.0:
        raise ParameterError(f"gamma_hz must be finite and > 0, got {gamma_hz!r}", field="gamma_hz")
    scale = gamma_hz / p.gamma
    return CavityParams(
        gamma=gamma_hz,
        delta=p.delta * scale,
        u_kerr=p.u_kerr * scale,
        eps=p.eps * scale,
        g2=p.g2 * scale,
    )


def critical_strength(p: CavityParams) -> float:
    """Two-photon drive at which the slow mean-field eigenvalue reaches zero."""
    return p.gamma / 4.0
