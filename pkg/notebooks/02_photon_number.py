"""
Photon number against the Kerr coefficient
==========================================

At the critical point the steady state obeys a quintic in N = |alpha|^2.
For U N << G0 it reduces to a power law N ~ (1/2) (gamma eps)^(2/5) U^(-4/5).
"""
import numpy as np

from kerrsense import CavityParams, n_analytic_cp, steady_state_closed_form, steady_state_time_march

p = CavityParams(eps=1e-3, g2=0.25)
us = np.logspace(-9, -4, 6)
print("   U          N (quintic)    N (power law)   U N / G0")
for u in us:
    q = p.replace(u_kerr=u)
    n = steady_state_closed_form(q).branch.n_mean
    n_an, validity = n_analytic_cp(q)
    print(f"{u:8.1e}   {n:12.6g}   {n_an:12.6g}    {validity:.1e}")

ns = [steady_state_closed_form(p.replace(u_kerr=u)).branch.n_mean for u in us[:4]]
print("\nlog-log slope over 1e-9..1e-6:", np.polyfit(np.log10(us[:4]), np.log10(ns), 1)[0])

# The same number from integrating the mean-field equation from the vacuum.
q = p.replace(u_kerr=1e-9)
print("time-marched N at U = 1e-9:", steady_state_time_march(q).n_mean)

# Above threshold the quintic has several roots; the selection keeps the stable one.
bs = steady_state_closed_form(CavityParams(u_kerr=1e-5, eps=1e-3, g2=0.3))
for i, b in enumerate(bs.branches):
    mark = "<-" if i == bs.selected else ""
    print(f"branch {i}: N = {b.n_mean:10.4g}  mf stable {b.mf_stable}  fluct stable {b.fluct_stable} {mark}")
