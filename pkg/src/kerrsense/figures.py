"""Baked-in sweep grids for the figure suite.

All figures share gamma/2pi = 1 GHz, Delta = 0 and eps/gamma = 1e-3; the
grids are declared in Hz (X/2pi) so the CSV axis columns read like the
plot axes.
"""
from __future__ import annotations

from .params import REFERENCE_GAMMA_HZ, CavityParams, UnitConvention
from .sweep import Axis, SweepSpec

__all__ = ["FIGURES", "figure_spec"]

_G0_HZ = REFERENCE_GAMMA_HZ / 4.0
_BASE = CavityParams(gamma=REFERENCE_GAMMA_HZ, delta=0.0, u_kerr=0.0, eps=1e-3 * REFERENCE_GAMMA_HZ, g2=_G0_HZ)
_U_SET = (0.0, 0.01, 0.1, 1.0)


def _spec(name: str, axes, outputs, base=_BASE, policy: str = "lowest") -> SweepSpec:
    return SweepSpec(
        name=name,
        units=UnitConvention.HZ_OVER_2PI,
        base=base,
        axes=tuple(axes),
        outputs=tuple(outputs),
        branch_policy=policy,
        gamma_hz=REFERENCE_GAMMA_HZ,
    )


def _build() -> dict[str, SweepSpec]:
    near_cp = Axis("g2_offset", "linear", -1e4, 1e4, 81)
    return {
        # Lambda+- over G/gamma in [0, 0.3] for the linear cavity
        "fig2a": _spec("fig2a", [Axis("g2", "linear", 0.0, 0.3 * REFERENCE_GAMMA_HZ, 61)], ["eigen"]),
        "fig2b": _spec("fig2b", [Axis("u_kerr", values=_U_SET), near_cp], ["eigen"]),
        "fig2c": _spec("fig2c", [Axis("u_kerr", values=_U_SET), near_cp], ["steady", "eigen"]),
        "fig3a": _spec(
            "fig3a",
            [Axis("g2_offset", "linear", -1e4, 1e4, 21), Axis("u_kerr", "log", 1e-2, 1e3, 51)],
            ["steady", "analytic"],
            policy="continuity",
        ),
        "fig3b": _spec(
            "fig3b",
            [Axis("g2_offset", values=(0.0, -1e2, -1e3, -1e4)), Axis("u_kerr", "log", 1e-3, 1e4, 51)],
            ["steady", "sens", "analytic"],
            policy="continuity",
        ),
        "fig3c": _spec(
            "fig3c",
            [Axis("u_kerr", values=(0.01, 0.1, 1.0)), Axis("g2_offset", "linear", -1e4, 0.0, 41)],
            ["steady", "sens"],
            policy="continuity",
        ),
        "fig4a": _spec("fig4a", [Axis("u_kerr", "log", 1e-2, 1e2, 41)], ["steady", "noise", "snr"]),
        "fig4b": _spec(
            "fig4b",
            [Axis("eps", "log", 1e-6 * REFERENCE_GAMMA_HZ, 1e-2 * REFERENCE_GAMMA_HZ, 41)],
            ["steady", "noise", "snr"],
            base=_BASE.replace(u_kerr=1.0),
        ),
    }


FIGURES = _build()


def figure_spec(name: str) -> SweepSpec:
    try:
        return FIGURES[name]
    except KeyError:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}") from None
