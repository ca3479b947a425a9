"""Command-line front end: ``ymac <subcommand> [options]``.

Without ``--out`` the primary CSV/JSON goes to stdout.  With ``--out DIR``
every output is written into DIR together with a ``manifest.json`` that
records the subcommand, its parameters, the seed and the files written.

Exit codes: 0 success, 1 domain error, 2 numerical failure, 3 I/O error,
64 usage error (unknown subcommand or bad flags).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import checks
from .classify import classify_initial, classify_profile, to_dict
from .closedform import SolitonParams, energy, sample_soliton
from .cylinder import BoundaryCondition, parse_init, relax
from .errors import DomainError, NumericalFailure
from .geometry import RadialProfile
from .orbit import PhasePoint, integrate
from .period import period_agm, period_integral, period_ode

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3, 64
SUBCOMMANDS = ("soliton", "energy", "orbit", "period", "classify", "relax", "check")


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: Optional[int] = 0
    output_paths: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    return f"{x:.17g}"


def _json_clean(obj):
    """Recursively convert numpy scalars and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        return float(fmt(x))
    return obj


def dump_json(obj) -> str:
    return json.dumps(_json_clean(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _pair(text, name):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise DomainError(f"--{name} expects 'a:b', got {text!r}") from None
    return a, b


def m_grid(text):
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise DomainError(f"--m-grid expects 'a:b:step', got {text!r}") from None
    if step <= 0 or b < a:
        raise DomainError("--m-grid needs step > 0 and b >= a")
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(n)]


class Output:
    """Collects named outputs; writes them to --out or the primary to stdout."""

    def __init__(self, out_dir, quiet):
        self.out_dir = Path(out_dir) if out_dir else None
        self.quiet = quiet
        self.paths = []

    def emit(self, name, text, primary=True):
        if self.out_dir is None:
            if primary:
                sys.stdout.write(text)
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_text(text)
        self.paths.append(name)

    def progress(self, msg):
        if not self.quiet:
            print(msg, file=sys.stderr)


# -- subcommands -----------------------------------------------------------

def cmd_soliton(args, out):
    p = SolitonParams(args.a, args.sign)
    prof = sample_soliton(p, args.t_min, args.t_max, args.n)
    if args.coords == "plane":
        out.emit("soliton.csv", csv_text(["r", "u"], zip(prof.r, prof.u)))
    else:
        out.emit("soliton.csv", csv_text(["t", "v"], zip(prof.t, prof.u)))
    return EXIT_OK


def cmd_energy(args, out):
    window = _pair(args.window, "window") if args.window else None
    if args.profile:
        e = energy(RadialProfile.load(args.profile), window=window)
    else:
        # soliton: sample on the window, or on [-20, 20] for the whole line
        t0, t1 = window or (-20.0, 20.0)
        prof = sample_soliton(SolitonParams(args.a, args.sign), t0, t1, args.n)
        e = energy(prof, window=window)
    d = e.to_dict()
    out.emit("energy.json", dump_json({"value": d["value"], "finite": d["finite"],
                                       "window": d["window"],
                                       "windowed_value": d["windowed_value"]}))
    return EXIT_OK


def cmd_orbit(args, out):
    span = _pair(args.t_span, "t-span")
    orbit = integrate(PhasePoint(args.v0, args.vt0), span, args.tol, t0=args.t0)
    rows = zip(orbit.t_samples, orbit.v, orbit.vt, orbit.c_series)
    out.emit("orbit.csv", csv_text(["t", "v", "vt", "c"], rows))
    log = {"c0": orbit.c0, "drift": orbit.drift, "escaped": orbit.escaped,
           "events": [e.to_dict() for e in orbit.events], "tol": args.tol}
    out.emit("events.json", dump_json(log), primary=False)
    out.progress(f"orbit: {len(orbit.t_samples)} samples, {len(orbit.events)} events, "
                 f"drift {orbit.drift:.3g}")
    return EXIT_OK


def cmd_period(args, out):
    if (args.m is None) == (args.m_grid is None):
        raise DomainError("give exactly one of --m or --m-grid")
    Ms = [args.m] if args.m is not None else m_grid(args.m_grid)
    rows = []
    for M in Ms:
        tq = period_integral(M).T
        ta = period_agm(M).T
        to = period_ode(M).T if args.ode else None
        err = abs(tq - ta) if to is None else max(abs(tq - ta), abs(tq - to))
        rows.append([M, tq, ta, "" if to is None else to, err])
    out.emit("period.csv", csv_text(["M", "T_quad", "T_agm", "T_ode", "err"], rows))
    return EXIT_OK


def cmd_classify(args, out):
    if args.profile:
        if args.v0 is not None or args.vt0 is not None:
            raise DomainError("give either --profile or --v0/--vt0, not both")
        cls = classify_profile(RadialProfile.load(args.profile))
    else:
        if args.v0 is None or args.vt0 is None:
            raise DomainError("--v0 and --vt0 are both required without --profile")
        cls = classify_initial(PhasePoint(args.v0, args.vt0))
    out.emit("classify.json", dump_json(to_dict(cls)))
    return EXIT_OK


def cmd_relax(args, out):
    t_min, t_max = _pair(args.window, "window")
    init = args.init
    if init.startswith("random:") and init.count(":") == 1:
        init = f"{init}:{args.seed}"
    bl = BoundaryCondition.parse(args.bc_left) if args.bc_left else None
    br = BoundaryCondition.parse(args.bc_right) if args.bc_right else None
    f = parse_init(init, t_min, t_max, args.n_t, args.n_theta, bl, br)
    g, rep = relax(f, args.tol, args.max_steps)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "theta", "v"])
    for i, ti in enumerate(g.t):
        for j, th in enumerate(g.theta):
            w.writerow([fmt(ti), fmt(th), fmt(g.values[i, j])])
    out.emit("field.csv", buf.getvalue())
    report = rep.to_dict()
    report.update(bc_left=g.bc_left.to_dict(), bc_right=g.bc_right.to_dict())
    out.emit("relax_report.json", dump_json(report), primary=False)
    out.progress(f"relax: {rep.steps} steps, residual {rep.final_residual:.3g}, "
                 f"converged={rep.converged}")
    if not rep.converged:
        raise NumericalFailure(f"relaxation did not reach tol {args.tol} in {args.max_steps} steps")
    return EXIT_OK


def cmd_check(args, out):
    only = None
    if args.only and not args.all:
        only = [s for part in args.only for s in part.split(",") if s]
        if not checks.select(only):
            raise DomainError(f"--only matched no criteria: {only}")
    results = checks.run_checks(only, progress=lambda r: out.progress(r.line()),
                                ode_tol=args.ode_tol)
    table = "\n".join(r.line() for r in results)
    n_fail = sum(not r.passed for r in results)
    summary = f"{len(results) - n_fail}/{len(results)} criteria passed"
    if out.out_dir is None:
        if out.quiet:
            sys.stdout.write(table + "\n")
        sys.stdout.write(summary + "\n")
    else:
        # timings are left out of the file so reruns are byte-identical
        payload = [{"id": r.id, "name": r.name, "group": r.group, "passed": r.passed,
                    "detail": {k: v for k, v in r.detail.items() if not k.endswith("_s")}}
                   for r in results]
        out.emit("check.json", dump_json({"results": payload, "fast": checks.fast_mode()}))
        out.progress(summary)
    return EXIT_OK if n_fail == 0 else EXIT_NUMERICAL


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines")
    common.add_argument("--seed", type=int, default=0, help="seed for random inits")

    parser = _Parser(prog="ymac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    s = sub.add_parser("soliton", parents=[common], help="sample a soliton")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    s.add_argument("--t-min", type=float, default=-10.0)
    s.add_argument("--t-max", type=float, default=10.0)
    s.add_argument("--n", type=int, default=2001)
    s.add_argument("--coords", choices=("cylinder", "plane"), default="cylinder")
    s.set_defaults(func=cmd_soliton)

    s = sub.add_parser("energy", parents=[common], help="energy of a soliton or profile")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    s.add_argument("--profile", default=None, help="CSV (r,u or t,v) or JSON profile")
    s.add_argument("--window", default=None, help="t0:t1")
    s.add_argument("--n", type=int, default=160001, help="soliton samples")
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("orbit", parents=[common], help="integrate the cylinder ODE")
    s.add_argument("--v0", type=float, required=True)
    s.add_argument("--vt0", type=float, required=True)
    s.add_argument("--t-span", default="0:20")
    s.add_argument("--t0", type=float, default=None)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("period", parents=[common], help="period table T(M)")
    s.add_argument("--m", type=float, default=None)
    s.add_argument("--m-grid", default=None, help="a:b:step")
    s.add_argument("--ode", action="store_true", help="also measure T on the ODE orbit")
    s.set_defaults(func=cmd_period)

    s = sub.add_parser("classify", parents=[common], help="classify phase data or a profile")
    s.add_argument("--v0", type=float, default=None)
    s.add_argument("--vt0", type=float, default=None)
    s.add_argument("--profile", default=None)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("relax", parents=[common], help="gradient-flow relaxation on the cylinder")
    s.add_argument("--n-t", type=int, default=129)
    s.add_argument("--n-theta", type=int, default=32)
    s.add_argument("--window", default="-8:8", help="t_min:t_max")
    s.add_argument("--bc-left", default=None, help="neumann | dirichlet:<value>")
    s.add_argument("--bc-right", default=None, help="neumann | dirichlet:<value>")
    s.add_argument("--init", default="perturbed-soliton:1:0.1",
                   help="zero | soliton:a | perturbed-soliton:a:amp | random:amp[:seed]")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-steps", type=int, default=200_000)
    s.set_defaults(func=cmd_relax)

    s = sub.add_parser("check", parents=[common], help="run the acceptance criteria")
    s.add_argument("--all", action="store_true")
    s.add_argument("--only", action="append", default=None,
                   help="group name or criterion id; repeatable or comma-separated")
    s.add_argument("--ode-tol", type=float, default=checks.ODE_TOL)
    s.set_defaults(func=cmd_check)
    return parser


def _parameters(args) -> dict:
    skip = {"func", "subcommand", "out", "quiet", "seed"}
    return {k: str(v) for k, v in sorted(vars(args).items()) if k not in skip}


# flags whose values may start with '-' (e.g. --window -8:8)
_RANGE_FLAGS = ("--window", "--t-span", "--m-grid")


def _join_ranges(argv):
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _join_ranges(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("ymac: a subcommand is required")
    except UsageError as exc:
        print(parser.format_usage() + str(exc), file=sys.stderr)
        return EXIT_USAGE
    out = Output(args.out, args.quiet)
    try:
        code = args.func(args, out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_DOMAIN
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        code = EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if out.out_dir is not None:
        manifest = RunManifest(args.subcommand, _parameters(args), args.seed, list(out.paths))
        try:
            out.emit("manifest.json", manifest.to_json() + "\n", primary=False)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
