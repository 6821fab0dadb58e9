"""
Quantum noise and the signal-to-noise ratio
===========================================

Gaussian-closed correlator equations for n = <da+ da>, m = <da da> on top
of the mean-field branch.
"""
from kerrsense import CavityParams, fig4_curves, noise_steady_state, snr, steady_state_closed_form

# Below threshold and without Kerr the problem is linear and exactly solvable:
# n = 8 G^2 / (gamma^2 - 16 G^2).
for g in (0.1, 0.2, 0.24):
    p = CavityParams(g2=g)
    ns = noise_steady_state(steady_state_closed_form(p).branch, p)
    print(f"G = {g}: n = {ns.n_fluct:.6f} (hand: {8 * g * g / (1 - 16 * g * g):.6f}), m = {ns.m_anom:.6f}")

# The sensing working point: U/2pi = 1 Hz, eps = gamma/1000, G = G0.
p = CavityParams(u_kerr=1e-9, eps=1e-3, g2=0.25)
br = steady_state_closed_form(p).branch
ns = noise_steady_state(br, p)
print("\nworking point:", snr(br, ns).as_dict())

# A stronger coherent drive raises |alpha|^2 faster than the noise.
rows = fig4_curves(p, [1e-11, 1e-9, 1e-7], [1e-6, 1e-5, 1e-4, 1e-3, 1e-2])
for r in rows:
    snr_txt = "-" if r.snr_db is None else f"{r.snr_db:+6.2f} dB"
    print(f"{r.swept:>6} = {r.value:7.0e}   |alpha|^2 = {r.n_mean:10.4g}   n = {r.n_fluct:10.4g}   {snr_txt}")
