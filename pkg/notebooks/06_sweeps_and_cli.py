"""
Sweeps, config files and the command line
=========================================

A sweep is two axes at most over a base parameter set, given either in gamma
units or as X/2pi in Hz.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

from kerrsense import CavityParams, UnitConvention
from kerrsense.config import parse_config
from kerrsense.sweep import Axis, SweepSpec, format_csv, run_sweep

spec = SweepSpec(
    name="near_cp",
    units=UnitConvention.HZ_OVER_2PI,
    gamma_hz=1e9,
    base=CavityParams(gamma=1e9, u_kerr=1.0, eps=1e6, g2=2.5e8),
    axes=(Axis("g2_offset", "linear", -1e4, 1e4, 5),),
    outputs=("steady", "snr"),
)
res = run_sweep(spec)
print(format_csv(res))

config = """\
units: gamma
sweeps:
  - name: eps_scan
    base: {u_kerr: 1.0e-9, g2: crit}
    axes:
      - {name: eps, scale: log, start: 1.0e-6, stop: 1.0e-2, count: 5}
    outputs: [steady, noise, snr]
"""
(spec2,) = parse_config(config)
for row in run_sweep(spec2).rows:
    print(f"eps = {row['eps']:.0e}  |alpha|^2 = {row['n_mean']:.4g}  n = {row['n_fluct']:.4g}  SNR = {row['snr_db']:.2f} dB")

# The same through the command line.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "scan.yaml"
    path.write_text(config)
    for argv in (["snr", "--eps", "1e-3", "--u-hz2pi", "1", "--g", "crit"], ["run", str(path), "--out", tmp]):
        proc = subprocess.run([sys.executable, "-m", "kerrsense", *argv], capture_output=True, text=True)
        print("exit", proc.returncode, proc.stdout.strip())
