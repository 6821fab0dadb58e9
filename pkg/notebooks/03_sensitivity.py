"""
Sensitivity dN/dU
=================

Central differences on a continuity-tracked branch, compared with
S = K U^(-9/5), K = (2/5) (gamma eps)^(2/5).
"""
import numpy as np

from kerrsense import CavityParams, fig3_surface, sensitivity_numeric

cp = CavityParams(eps=1e-3, g2=0.25)
for u in np.logspace(-9, -6, 4):
    rep = sensitivity_numeric(cp.replace(u_kerr=u))
    s_hz, s_an_hz = rep.per_hz(1e9)
    print(f"U = {u:.0e}   S = {rep.s_numeric:.4e}   K U^-9/5 = {rep.s_analytic:.4e}   S/2pi = {s_hz:.4g} /Hz")

# Off the critical point the response is no longer a power law: for G < G0
# there is an optimal Kerr strength.
us = np.logspace(-12, -5, 15)
rows = fig3_surface(cp, us, [0.25, 0.25 - 1e-6, 0.25 - 1e-5])
for g in sorted({r.g2 for r in rows}, reverse=True):
    line = [r for r in rows if r.g2 == g]
    best = max(line, key=lambda r: r.s_numeric)
    print(f"G0 - G = {0.25 - g:.0e}: max S = {best.s_numeric:.3e} at U = {best.u_kerr:.1e}  ({line[0].flags_text} ... {line[-1].flags_text})")
