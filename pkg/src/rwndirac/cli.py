"""Command-line front end.

Subcommands: spectrum, orbit, eigen, radial, verify-barriers, oracle.
Run ``rwndirac <subcommand> --help`` for the flags of each.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence


from . import __version__
from .barriers import DEFAULT_GRID, DEFAULT_K_MAX, verify_all
from .integrator import IntegratorConfig
from .oracle import bohr, fig1_landmarks, sommerfeld
from .params import (
    ParameterError,
    PhysicalInput,
    SelfAdjointnessWarning,
    derive_params,
    load_config,
    physical_input_from_mapping,
)
from .shooting import BracketNotFound, ShootingOptions, find_eigenvalue, launch_orbit, spectrum_sweep
from .table import EigenvalueRecord, SpectralTable

OUTPUT_DIR_ENV = "RWNDIRAC_OUTPUT_DIR"
TRAJECTORY_HEADER = ("tau", "eta", "omega_lift")


class ConfigError(ValueError):
    """Invalid command-line configuration."""


def parse_range(text: str, integer: bool = False) -> list:
    """Parse ``lo:hi:step`` (inclusive) or a single value.

    >>> parse_range("1:3:1")
    [1.0, 2.0, 3.0]
    """
    parts = text.split(":")
    conv = int if integer else float
    try:
        if len(parts) == 1:
            return [conv(parts[0])]
        if len(parts) == 2:
            lo, hi, step = conv(parts[0]), conv(parts[1]), conv(1)
        elif len(parts) == 3:
            lo, hi, step = conv(parts[0]), conv(parts[1]), conv(parts[2])
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(f"bad range {text!r}; expected lo:hi:step") from None
    if step <= 0:
        raise ConfigError(f"range step must be positive in {text!r}")
    if hi < lo:
        raise ConfigError(f"range end below start in {text!r}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    vals = [lo + i * step for i in range(n + 1)]
    if not integer:
        vals = [float(round(v, 12)) for v in vals]
    return vals


def _add_physics(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--config", help="flat key=value file with defaults")
    ap.add_argument("--A", dest="A", type=float, help="nuclear mass number (default 0)")
    ap.add_argument("--a", dest="a", type=float, help="anomalous moment in Bohr magnetons")
    ap.add_argument("--g-ratio", type=float, help="gravity strength (default 2.40e-43)")
    ap.add_argument("--lambda", dest="lam", type=float, help="override the moment coupling")
    ap.add_argument("--mass-ratio", type=float)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--flat", action="store_true", help="force g_ratio = 0")
    ap.add_argument("--r0", type=float, default=1e-6)
    ap.add_argument("--eta-max", type=float, default=1.0 - 1e-9)
    ap.add_argument("--eps-tol", type=float, default=1e-13)
    ap.add_argument("--abs-tol", type=float, default=1e-12)
    ap.add_argument("--rel-tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rwndirac", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="sweep eigenvalues over Z")
    sp.add_argument("--z", required=True, help="Z range lo:hi:step")
    sp.add_argument("--k", default="-1:1", help="k range lo:hi:step (0 skipped)")
    sp.add_argument("--n-max", type=int, default=2)
    sp.add_argument("--format", choices=("csv", "json"), default=None)
    sp.add_argument("--output", "-o")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--resume", action="store_true")
    _add_physics(sp)

    op = sub.add_parser("orbit", help="dump one shooting orbit")
    op.add_argument("--z", type=float, required=True)
    op.add_argument("--k", type=int, default=-1)
    op.add_argument("--eps", type=float, required=True)
    op.add_argument("--output", "-o")
    op.add_argument("--full", action="store_true", help="integrate to eta-max without early exit")
    _add_physics(op)

    ep = sub.add_parser("eigen", help="compute one eigenvalue")
    ep.add_argument("--z", type=float, required=True)
    ep.add_argument("--k", type=int, default=-1)
    ep.add_argument("--N", dest="N", type=int, default=0)
    ep.add_argument("--seed", type=float)
    ep.add_argument("--format", choices=("csv", "json"), default="json")
    _add_physics(ep)

    rp = sub.add_parser("radial", help="eigenfunction samples r,u,v,R,omega")
    rp.add_argument("--z", type=float, required=True)
    rp.add_argument("--k", type=int, default=-1)
    rp.add_argument("--N", dest="N", type=int, default=0)
    rp.add_argument("--output", "-o")
    _add_physics(rp)

    bp = sub.add_parser("verify-barriers", help="grid-certify the barrier inequalities")
    bp.add_argument("--z", type=float, required=True)
    bp.add_argument("--k", type=int, default=-1)
    bp.add_argument("--grid", type=int, default=DEFAULT_GRID)
    bp.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    _add_physics(bp)

    orc = sub.add_parser("oracle", help="closed-form reference values")
    osub = orc.add_subparsers(dest="which", required=True)
    so = osub.add_parser("sommerfeld")
    so.add_argument("--n", type=int, required=True)
    so.add_argument("--k", type=int, required=True)
    so.add_argument("--z", type=float, required=True)
    so.add_argument("--alpha", type=float, default=None)
    bo = osub.add_parser("bohr")
    bo.add_argument("--n", type=int, required=True)
    bo.add_argument("--z", type=float, required=True)
    bo.add_argument("--alpha", type=float, default=None)
    bo.add_argument("--grav", type=float, default=0.0)
    osub.add_parser("landmarks")
    return ap


# --- helpers ----------------------------------------------------------------


def _template(args, z: float) -> PhysicalInput:
    base = load_config(args.config) if getattr(args, "config", None) else {}
    over = {
        "Z": z,
        "A": args.A,
        "a": args.a,
        "g_ratio": 0.0 if args.flat else args.g_ratio,
        "lam": args.lam,
        "mass_ratio": args.mass_ratio,
        "alpha": args.alpha,
    }
    if args.flat:
        base = {k: v for k, v in base.items() if k.lower() not in ("g_ratio", "g", "gravity")}
    return physical_input_from_mapping(base, **over)


def _options(args) -> ShootingOptions:
    try:
        icfg = IntegratorConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)
        return ShootingOptions(r0=args.r0, eta_max=args.eta_max, eps_tol=args.eps_tol, integrator=icfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _params(args, z: float, k: int):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelfAdjointnessWarning)
        return derive_params(_template(args, z), k)


def _default_output(explicit: Optional[str], name: str) -> Optional[Path]:
    if explicit:
        return Path(explicit)
    d = os.environ.get(OUTPUT_DIR_ENV)
    if d:
        Path(d).mkdir(parents=True, exist_ok=True)
        return Path(d) / name
    return None


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


# --- subcommands --------------------------------------------------------------


def _cmd_spectrum(args) -> int:
    zs = parse_range(args.z)
    ks = [k for k in parse_range(args.k, integer=True) if k != 0]
    if not ks:
        raise ConfigError("k range contains no nonzero value")
    if args.n_max < 1:
        raise ConfigError("--n-max must be at least 1")
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    if any(z <= 0 for z in zs):
        raise ConfigError("Z values must be positive")
    template = _template(args, zs[0])
    _params(args, zs[0], ks[0])  # validates the parameter sector up front
    opts = _options(args)
    fmt = args.format
    out = _default_output(args.output, f"spectrum.{fmt or 'csv'}")
    if fmt is None:
        fmt = "json" if out is not None and out.suffix.lower() == ".json" else "csv"
    if args.resume and out is None:
        raise ConfigError("--resume needs an output path")

    done: list[EigenvalueRecord] = []
    ckpt = None
    if out is not None:
        ckpt = out.with_name(out.name + ".partial.jsonl")
        if args.resume and ckpt.exists():
            seen = {}
            for line in ckpt.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = EigenvalueRecord.from_state(json.loads(line))
                except (ValueError, TypeError):
                    continue  # torn final line from an interrupted write
                seen[rec.key()] = rec
            done = list(seen.values())
        else:
            ckpt.write_text("", encoding="utf-8")

    known = {r.key() for r in done}

    def on_record(rec: EigenvalueRecord) -> None:
        if ckpt is None or rec.key() in known:
            return
        known.add(rec.key())
        with ckpt.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec.to_state()) + "\n")

    table = spectrum_sweep(zs, ks, args.n_max, template, opts, jobs=args.jobs, done=done, on_record=on_record)
    text = table.to_json() if fmt == "json" else table.to_csv()
    _emit(text, out)
    if ckpt is not None and ckpt.exists():
        ckpt.unlink()
    return 0


def _cmd_orbit(args) -> int:
    if not -1.0 < args.eps < 1.0:
        raise ConfigError("--eps must lie in (-1, 1)")
    p = _params(args, args.z, args.k)
    opts = _options(args)
    if args.full:
        opts = replace(opts, early_exit=False)
    o = launch_orbit(args.eps, p, opts, keep_trajectory=True)
    tr = o.trajectory
    lines = [",".join(TRAJECTORY_HEADER)]
    for t, y in zip(tr.t, tr.y):
        lines.append(f"{float(t)!r},{float(y[0])!r},{float(y[1])!r}")
    _emit("\n".join(lines) + "\n", _default_output(args.output, "orbit.csv"))
    print(
        f"# winding={o.winding} classification={o.classification} reason={o.reason} "
        f"terminal_omega_lift={o.terminal_omega_lift!r}",
        file=sys.stderr,
    )
    return 0


def _cmd_eigen(args) -> int:
    p = _params(args, args.z, args.k)
    opts = _options(args)
    try:
        rec = find_eigenvalue(args.k, args.N, p, seed=args.seed, opts=opts)
        rec = replace(rec, z=args.z)
    except BracketNotFound as exc:
        rec = EigenvalueRecord.absent(args.k, args.N, args.z, str(exc))
    table = SpectralTable([rec])
    if args.format == "csv":
        sys.stdout.write(table.to_csv())
    else:
        sys.stdout.write(json.dumps(rec.row(), indent=1) + "\n")
    return 0 if rec.found else 3


def _cmd_radial(args) -> int:
    from .wavefunction import connector_solution

    p = _params(args, args.z, args.k)
    opts = _options(args)
    rec = find_eigenvalue(args.k, args.N, p, opts=opts)
    con = connector_solution(rec, p, opts)
    _emit(con.solution.to_csv(), _default_output(args.output, "radial.csv"))
    return 0


def _cmd_barriers(args) -> int:
    if args.grid < 10:
        raise ConfigError("--grid must be at least 10")
    p = _params(args, args.z, args.k)
    reports = verify_all(p, args.grid, args.k_max)
    print("name,grid,min_margin,passed")
    bad = False
    for r in reports:
        print(r.line())
        if not r.in_hypotheses:
            print(f"# {r.name}: parameters outside the hypotheses of this check", file=sys.stderr)
        elif not r.passed:
            bad = True
    return 1 if bad else 0


def _cmd_oracle(args) -> int:
    from .params import ALPHA_DEFAULT

    alpha = getattr(args, "alpha", None) or ALPHA_DEFAULT
    if args.which == "sommerfeld":
        try:
            val = sommerfeld(args.n, args.k, args.z, alpha)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not val.valid:
            print("out-of-range")
            return 3
        print(repr(val.eps))
    elif args.which == "bohr":
        print(repr(bohr(args.n, args.z, alpha, args.grav)))
    else:
        print("curve,Z,epsilon,z_tol")
        for lm in fig1_landmarks():
            print(f"{lm.curve},{lm.z!r},{lm.eps!r},{lm.z_tol!r}")
    return 0


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "orbit": _cmd_orbit,
    "eigen": _cmd_eigen,
    "radial": _cmd_radial,
    "verify-barriers": _cmd_barriers,
    "oracle": _cmd_oracle,
}


_RANGE_FLAGS = ("--z", "--k", "--eps", "--seed")


def _join_negative(argv: Sequence[str]) -> list[str]:
    # argparse mistakes "-1:1" for an option; glue such values to their flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit():
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(_join_negative(sys.argv[1:] if argv is None else argv))
    try:
        return _DISPATCH[args.command](args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
