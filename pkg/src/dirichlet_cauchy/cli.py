"""Command-line entry point: ``mean``, ``verify`` and ``asymptotics``.

Exit codes: 0 success, 1 a verification case failed, 2 bad flags or input
files, 3 a capacity guard tripped, 4 a quadrature did not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import CapacityError, NonConvergence
from .kernel import cauchy_mean_2q
from .parallel import default_workers
from .poly import DirichletPoly, read_coeffs_csv
from .quadrature import QuadratureConfig, cauchy_mean_quadrature
from .report import to_json
from .telescope import cauchy_mean_telescope

EXIT_FAILED, EXIT_USAGE, EXIT_CAPACITY, EXIT_NONCONVERGENCE = 1, 2, 3, 4
METHODS = ("kernel", "telescope", "quadrature")


class UsageError(Exception):
    pass


def _range(text: str) -> tuple[float, float]:
    """``lo:hi`` (or a single value), accepting forms like ``1e3:1e6``."""
    parts = text.split(":")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[-1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _count(text: str) -> int:
    """Positive integer, also written as ``1e6``."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirichlet-cauchy", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", type=Path, help="key=value file presetting any flag")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mean", help="Cauchy mean of one polynomial")
    src = m.add_mutually_exclusive_group()
    src.add_argument("--coeffs", type=Path, help="CSV with rows n,re,im")
    src.add_argument("--unit", action="store_true", help="x_n = 1 for n <= N")
    m.add_argument("--N", type=_count, default=None)
    m.add_argument("--sigma", type=float, default=0.0)
    m.add_argument("--s", type=float, default=1.0)
    m.add_argument("--q", type=_count, default=1)
    m.add_argument("--method", choices=METHODS + ("all",), default="kernel")
    m.add_argument("--abs-tol", type=float, default=1e-12)
    m.add_argument("--rel-tol", type=float, default=1e-10)
    fmt = m.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=False, default=None,
                   choices=["wilf", "lemma-x", "telescope", "logkernel", "resum", "f1", "char",
                            "rm1"])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=_count, default=20)
    vfmt = v.add_mutually_exclusive_group()
    vfmt.add_argument("--json", action="store_true")
    vfmt.add_argument("--csv", action="store_true")

    a = sub.add_parser("asymptotics", help="CSV sweep of an asymptotic law")
    a.add_argument("--which", default=None,
                   choices=["acz", "variance", "wilf2", "fourth", "theorem-sk"])
    a.add_argument("--N", type=_range, default=None)
    a.add_argument("--k", type=_range, default=None)
    a.add_argument("--sigma", type=float, default=None)
    a.add_argument("--samples", type=_count, default=1_000_000)
    a.add_argument("--seed", type=int, default=7)
    a.add_argument("--points", type=_count, default=None)
    return p


# ----------------------------------------------------------------------------------------
# config file


def read_config(path: Path) -> dict[str, str]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("_", "-").lstrip("-")] = value
    return out


_TRUE, _FALSE = {"1", "true", "yes", "on"}, {"0", "false", "no", "off"}


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    """Turn config entries into subparser defaults, converted and validated like flags."""
    actions = {a.option_strings[0].lstrip("-"): a for a in sub._actions if a.option_strings}
    defaults = {}
    for key, raw in config.items():
        action = actions.get(key)
        if action is None or key == "help":
            raise UsageError(f"config key {key!r} is not a flag of this command")
        if isinstance(action, argparse._StoreTrueAction):
            low = raw.lower()
            if low not in _TRUE | _FALSE:
                raise UsageError(f"config key {key!r} expects a boolean, got {raw!r}")
            defaults[action.dest] = low in _TRUE
            continue
        try:
            value = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
        defaults[action.dest] = value
    sub.set_defaults(**defaults)


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is not None:
        config = read_config(known.config)
        command = next((a for a in argv if a in ("mean", "verify", "asymptotics")), None)
        if command is not None:
            sub = parser._subparsers._group_actions[0].choices[command]
            _apply_config(sub, config)
    return parser.parse_args(argv)


# ----------------------------------------------------------------------------------------
# commands


def _poly_from(args) -> DirichletPoly:
    if args.coeffs is not None:
        try:
            return read_coeffs_csv(args.coeffs, args.sigma)
        except OSError as exc:
            raise UsageError(f"cannot read {args.coeffs}: {exc.strerror}") from None
    if args.unit:
        if args.N is None:
            raise UsageError("--unit requires --N")
        return DirichletPoly.unit(args.N, args.sigma)
    raise UsageError("one of --coeffs or --unit is required")


def _one_method(name: str, poly: DirichletPoly, s: float, q: int, cfg: QuadratureConfig):
    if name == "kernel":
        return cauchy_mean_2q(poly, s, q)
    if name == "telescope":
        return cauchy_mean_telescope(poly, s, q)
    return cauchy_mean_quadrature(poly, s, q, cfg)


def cmd_mean(args, out) -> int:
    poly = _poly_from(args)
    if not args.s >= 0:
        raise UsageError("--s must be >= 0")
    cfg = QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol)
    names = METHODS if args.method == "all" else (args.method,)
    start = time.perf_counter()
    results = []
    for name in names:
        if name == "telescope" and args.s == 0:
            results.append(cauchy_mean_2q(poly, 0.0, args.q))  # every kernel factor is 1
            continue
        results.append(_one_method(name, poly, args.s, args.q, cfg))
    elapsed = 1000.0 * (time.perf_counter() - start)
    payload = {
        "inputs": {"N": poly.N, "sigma": poly.sigma, "s": args.s, "q": args.q,
                   "source": str(args.coeffs) if args.coeffs else "unit"},
        "results": [{"method": name, **r.as_dict()} for name, r in zip(names, results)],
        "version": __version__,
        "workers": default_workers(),
    }
    if len(results) > 1:
        payload["max_pairwise_deviation"] = max(
            abs(a.value - b.value) for a, b in itertools.combinations(results, 2))
    if len(results) == 1:
        payload.update({k: payload["results"][0][k] for k in ("value", "method", "error_bound")})
    payload["elapsed_ms"] = round(elapsed, 3)
    if args.json:
        out.write(to_json(payload) + "\n")
    elif args.csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["method", "value", "error_bound", "N", "sigma", "s", "q"])
        for r in payload["results"]:
            w.writerow([r["method"], repr(float(r["value"])), repr(float(r["error_bound"])), poly.N,
                        poly.sigma, args.s, args.q])
    else:
        for r in payload["results"]:
            out.write(f"{r['method']:<11} {r['value']:.15g}  (error bound {r['error_bound']:.3g})\n")
        if "max_pairwise_deviation" in payload:
            out.write(f"max pairwise deviation {payload['max_pairwise_deviation']:.3g}\n")
    return 0


def cmd_verify(args, out) -> int:
    from .suites import run_suite

    if args.suite is None:
        raise UsageError("--suite is required")
    rep = run_suite(args.suite, args.seed, args.cases)
    if args.csv:
        out.write(rep.to_csv())
    elif args.json:
        out.write(rep.to_json() + "\n")
    else:
        out.write(f"suite {rep.suite}: {len(rep.cases) - len(rep.failures)}/{len(rep.cases)} "
                  f"passed (seed {rep.seed})\n")
        for c in rep.failures:
            out.write(f"  FAIL {json.dumps(c.as_dict()['inputs'])} lhs={c.lhs!r} "
                      f"rhs={c.rhs!r} tol={c.tolerance!r} ({c.mode})\n")
    return 0 if rep.passed else EXIT_FAILED


def cmd_asymptotics(args, out) -> int:
    from . import suites

    if args.which is None:
        raise UsageError("--which is required")
    w = args.which
    if w == "acz":
        lo, hi = args.N or (256, 3000)
        sw = suites.sweep_acz(lo, hi, args.points or 12)
    elif w == "variance":
        lo, hi = args.N or (1e3, 1e6)
        sigma = 0.5 if args.sigma is None else args.sigma
        sw = suites.sweep_variance(sigma, lo, hi, args.points or 7)
    elif w == "wilf2":
        lo, hi = args.N or (16, 65536)
        sw = suites.sweep_wilf2(lo, hi)
    elif w == "fourth":
        lo, hi = args.N or (32, 4096)
        sw = suites.sweep_fourth(lo, hi)
    else:
        N = int((args.N or (100, 100))[1])
        k_lo, k_hi = args.k or (100, 6400)
        sigma = 0.0 if args.sigma is None else args.sigma
        sw = suites.sweep_theorem_sk(sigma, N, k_lo, k_hi, samples=args.samples, seed=args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(sw.columns)
    for row in sw.rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    out.write(buf.getvalue())
    out.write("# summary " + json.dumps(sw.summary, sort_keys=True, default=float) + "\n")
    return 0 if sw.summary.get("pass", True) else EXIT_FAILED


COMMANDS = {"mean": cmd_mean, "verify": cmd_verify, "asymptotics": cmd_asymptotics}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:  # argparse: bad flags, --help, --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NonConvergence as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
