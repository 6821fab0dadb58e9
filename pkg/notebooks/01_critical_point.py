"""
The parametric critical point
=============================

Eigenvalues of the mean-field matrix as the two-photon drive G is turned up,
first for the linear cavity and then with a weak Kerr term.
"""
import numpy as np

from kerrsense import CavityParams, eigen_meanfield, spectrum, steady_state_closed_form

# gamma = 1 units throughout. Without Kerr the Kerr shift vanishes and
# Lambda+- = -1/2 +- 2G, so the slow eigenvalue touches zero at G = 1/4.
for g in np.linspace(0.0, 0.3, 7):
    lp, lm = eigen_meanfield(CavityParams(g2=g), 0.0)
    print(f"G = {g:.2f}   Lambda+ = {lp.real:+.3f}   Lambda- = {lm.real:+.3f}")

# With U/2pi = 1 Hz at gamma/2pi = 1 GHz (U = 1e-9) and eps = 1e-3 the cavity
# fills up near G0 and the Kerr shift keeps Lambda+ just below zero.
print()
p0 = CavityParams(u_kerr=1e-9, eps=1e-3, g2=0.25)
for d in (-1e-5, -1e-6, 0.0, 1e-6, 1e-5):
    p = p0.replace(g2=0.25 + d)
    br = steady_state_closed_form(p).branch
    s = spectrum(p, br)
    print(
        f"G - G0 = {d:+.0e}   N = {br.n_mean:10.4g}   Lambda+ = {s.lambda_cap_plus.real:+.3e}"
        f"   lambda+ = {s.lambda_low_plus.real:+.3e}   stable: {br.stable}"
    )

# Close to G0 the fluctuation eigenvalue lambda+ sits below Lambda+.
# Several kHz below G0 the coupling G' = G + U alpha^2 reorders them.
