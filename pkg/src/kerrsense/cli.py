"""Command-line front end.

Single-point subcommands print one JSON line. ``figure`` and ``run`` write
CSV/JSON tables plus a manifest and print a one-line summary. Exit codes:
0 clean, 1 usage or config error, 2 a computation failed or rows were
flagged.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .config import load_config
from .errors import ConfigError, KerrSenseError, ParameterError
from .figures import FIGURES, figure_spec
from .fluctuations import noise_steady_state, snr
from .meanfield import steady_state_closed_form
from .params import REFERENCE_GAMMA_HZ, CavityParams, UnitConvention
from .sensing import DEFAULT_REL_STEP, sensitivity_numeric
from .stability import TOL_STAB, eigenpair, spectrum
from .sweep import run_sweep, write_outputs

EXIT_OK, EXIT_USAGE, EXIT_FLAGGED = 0, 1, 2
_PARAMS = ("delta", "u", "eps", "g")
_FIELD = {"delta": "delta", "u": "u_kerr", "eps": "eps", "g": "g2"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--units", choices=[u.value for u in UnitConvention], help="convention of the plain rate flags (default gamma)")
    sp.add_argument("--gamma-hz2pi", type=float, help=f"gamma/2pi in Hz for *-hz2pi flags (default {REFERENCE_GAMMA_HZ:g})")
    sp.add_argument("--config", help="take base parameters from the first sweep of a config file")
    for name in _PARAMS:
        extra = " ('crit' for gamma/4)" if name == "g" else ""
        sp.add_argument(f"--{name}", help=f"{_FIELD[name]} in --units{extra}")
        sp.add_argument(f"--{name}-hz2pi", help=f"{_FIELD[name]}/2pi in Hz{extra}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerrsense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kerrsense {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in [
        ("steady", "mean-field steady state"),
        ("eigen", "eigenvalues of the mean-field and fluctuation matrices"),
        ("noise", "fluctuation correlators"),
        ("snr", "signal-to-noise ratio"),
        ("sens", "numeric and analytic sensitivity dN/dU"),
        ("oracle", "exact truncated-Fock steady state against the mean-field model"),
    ]:
        sp = sub.add_parser(name, help=text)
        _add_param_flags(sp)
        if name == "steady":
            sp.add_argument("--all-branches", action="store_true", help="list every self-consistent branch")
        if name == "sens":
            sp.add_argument("--rel-step", type=float, default=DEFAULT_REL_STEP)
        if name == "oracle":
            sp.add_argument("--cutoff", type=int, default=32)
            sp.add_argument("--frame", choices=["number", "gaussian"], default="gaussian")
            sp.add_argument("--no-grow", action="store_true", help="fail instead of doubling the cutoff")

    for name, text in [("figure", "run a baked-in figure grid"), ("run", "run every sweep in a config file")]:
        sp = sub.add_parser(name, help=text)
        if name == "figure":
            sp.add_argument("name", choices=list(FIGURES))
        else:
            sp.add_argument("path")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _value(text: str, field: str, gamma: float) -> float:
    if field == "g2" and text == "crit":
        return gamma / 4.0
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"{field} must be a number, got {text!r}", field=field) from None


def resolve_params(args: argparse.Namespace) -> tuple[CavityParams, float]:
    """Normalized parameters and the gamma/2pi used for Hz conversion."""
    gamma_hz = args.gamma_hz2pi if args.gamma_hz2pi is not None else REFERENCE_GAMMA_HZ
    if not gamma_hz > 0.0:
        raise ParameterError("--gamma-hz2pi must be > 0", field="gamma_hz2pi")
    units = UnitConvention.parse(args.units) if args.units else UnitConvention.ANGULAR_NORMALIZED
    hz = {}
    if args.config:
        spec = load_config(args.config)[0]
        base = spec.resolve({})
        if spec.gamma_hz:
            gamma_hz = spec.gamma_hz if args.gamma_hz2pi is None else gamma_hz
        hz = {k: v * gamma_hz for k, v in base.as_dict().items() if k != "gamma"}
    for name in _PARAMS:
        field = _FIELD[name]
        plain, in_hz = getattr(args, name), getattr(args, f"{name}_hz2pi")
        if plain is not None and in_hz is not None:
            raise ParameterError(f"give --{name} or --{name}-hz2pi, not both", field=field)
        if in_hz is not None:
            hz[field] = _value(in_hz, field, gamma_hz)
        elif plain is not None:
            if units is UnitConvention.HZ_OVER_2PI:
                hz[field] = _value(plain, field, gamma_hz)
            else:
                hz[field] = _value(plain, field, 1.0) * gamma_hz
    # dividing here, rather than via normalize(), keeps error messages in gamma units
    return CavityParams(gamma=1.0, **{k: v / gamma_hz for k, v in hz.items()}), gamma_hz


def _c(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _branch_dict(br) -> dict:
    return {
        "alpha": _c(br.alpha),
        "n_mean": br.n_mean,
        "delta_prime": br.delta_prime,
        "residual": br.residual,
        "mf_stable": br.mf_stable,
        "fluct_stable": br.fluct_stable,
    }


def _cmd_steady(p: CavityParams, args) -> dict:
    bs = steady_state_closed_form(p)
    out = _branch_dict(bs.branch)
    out["n_branches"] = len(bs)
    if args.all_branches:
        out["branches"] = [_branch_dict(b) for b in bs.branches]
    return out


def _cmd_eigen(p: CavityParams, args) -> dict:
    if p.u_kerr == 0.0:
        cap = eigenpair(p.gamma, p.g2, p.delta)
        low = cap
    else:
        br = steady_state_closed_form(p).branch
        spec = spectrum(p, br)
        cap = (spec.lambda_cap_plus, spec.lambda_cap_minus)
        low = (spec.lambda_low_plus, spec.lambda_low_minus)
    tol = TOL_STAB * p.gamma
    return {
        "Lambda_plus": _c(cap[0]),
        "Lambda_minus": _c(cap[1]),
        "lambda_plus": _c(low[0]),
        "lambda_minus": _c(low[1]),
        "mf_stable": max(cap[0].real, cap[1].real) < -tol,
        "fluct_stable": max(low[0].real, low[1].real) < -tol,
    }


def _noise(p: CavityParams):
    br = steady_state_closed_form(p).branch
    return br, noise_steady_state(br, p)


def _cmd_noise(p: CavityParams, args) -> dict:
    br, noise = _noise(p)
    return {"n_mean": br.n_mean, "n_fluct": noise.n_fluct, "m_anom": _c(noise.m_anom), "physical": noise.physical}


def _cmd_snr(p: CavityParams, args) -> dict:
    br, noise = _noise(p)
    return snr(br, noise).as_dict()


def _cmd_sens(p: CavityParams, args, gamma_hz: float) -> dict:
    rep = sensitivity_numeric(p, args.rel_step)
    s_hz, s_an_hz = rep.per_hz(gamma_hz)
    return {
        "u_kerr": rep.u_kerr,
        "n_numeric": rep.n_numeric,
        "n_analytic": rep.n_analytic,
        "s_numeric": rep.s_numeric,
        "s_analytic": rep.s_analytic,
        "s_numeric_hz2pi": s_hz,
        "s_analytic_hz2pi": s_an_hz,
        "validity": rep.validity,
        "step_disagree": rep.step_disagree,
    }


def _cmd_oracle(p: CavityParams, args) -> dict:
    from .fock import FockConfig, compare_with_meanfield

    cfg = FockConfig(cutoff=args.cutoff, frame=args.frame, auto_grow=not args.no_grow)
    rep = compare_with_meanfield(p, cfg)
    o = rep.oracle
    return {
        "cutoff": o.cutoff,
        "frame": args.frame,
        "expect_a": _c(o.expect_a),
        "expect_n": o.expect_n,
        "n_fluct": o.n_fluct,
        "m_anom": _c(o.m_anom),
        "purity": o.purity,
        "tail_mass": o.tail_mass,
        "mf_alpha": _c(rep.mf_alpha),
        "mf_n_total": rep.mf_n_total,
        "mf_n_fluct": rep.mf_n_fluct,
        "rel_alpha": rep.rel_alpha,
        "rel_n": rep.rel_n,
        "rel_n_fluct": rep.rel_n_fluct,
        "u_n_over_g": rep.u_n_over_g,
    }


def _emit(obj: dict) -> None:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, list):
            return [clean(x) for x in v]
        return v

    print(json.dumps(clean(obj), allow_nan=False))


def _error(exc: BaseException) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "line", "side", "residual", "t_final"):
        if getattr(exc, attr, None) is not None:
            out[attr] = getattr(exc, attr)
    return out


def _run_specs(specs, args) -> int:
    summary = []
    status = EXIT_OK
    for spec in specs:
        result = run_sweep(spec, threads=max(1, args.threads))
        files = write_outputs(result, args.out, args.format)
        summary.append({"name": spec.name, "rows": len(result.rows), "flagged": result.flagged, "files": [str(f) for f in files]})
        status = max(status, result.exit_status)
    _emit({"sweeps": summary, "exit": status})
    return status


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        _emit({"error": "UsageError", "message": str(exc)})
        return EXIT_USAGE
    try:
        if args.command == "figure":
            return _run_specs([figure_spec(args.name)], args)
        if args.command == "run":
            return _run_specs(load_config(args.path), args)
        p, gamma_hz = resolve_params(args)
    except (ConfigError, ParameterError, ValueError, OSError) as exc:
        _emit(_error(exc))
        return EXIT_USAGE
    try:
        if args.command == "sens":
            out = _cmd_sens(p, args, gamma_hz)
        else:
            out = {
                "steady": _cmd_steady,
                "eigen": _cmd_eigen,
                "noise": _cmd_noise,
                "snr": _cmd_snr,
                "oracle": _cmd_oracle,
            }[args.command](p, args)
    except ParameterError as exc:
        _emit(_error(exc))
        return EXIT_USAGE
    except KerrSenseError as exc:
        _emit(_error(exc))
        return EXIT_FLAGGED
    except ValueError as exc:
        _emit(_error(exc))
        return EXIT_USAGE
    out = {"command": args.command, "units": "gamma", "gamma_hz2pi": gamma_hz, "params": p.as_dict(), **out}
    _emit(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
