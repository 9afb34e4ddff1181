"""Command-line front end: ``splinestab <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 hypothesis
violation (zero entry on an outer codiagonal without a band reduction).
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .exact_core import as_rational, format_rational

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2, 3


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> list[Fraction]:
    """``a:b:count`` (inclusive linear grid) or a comma separated list."""
    try:
        if ":" in text:
            a, b, count = text.split(":")
            a, b, count = as_rational(a), as_rational(b), int(count)
            if count < 2:
                return [a]
            return [a + (b - a) * Fraction(i, count - 1) for i in range(count)]
        return [as_rational(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splinestab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        if "p" in flags:
            sp.add_argument("-p", type=int, required=True, help="spline degree")
        if "k" in flags:
            sp.add_argument("-k", type=int, default=None, help="stabilization derivative order (default p)")
        if "rho" in flags:
            sp.add_argument("--rho", type=_rational)
        if "delta" in flags:
            sp.add_argument("--delta", type=_rational)
        sp.add_argument("--out", help="output file or directory; a manifest is written beside it")
        sp.add_argument("--format", choices=["csv", "json", "mm", "svg"])

    sp = sub.add_parser("thresholds", help="table of rho_p, delta_p and delta_p^k")
    sp.add_argument("--pmax", type=int, default=6)
    common(sp)

    sp = sub.add_parser("assemble", help="export an exact Galerkin matrix")
    sp.add_argument("-N", type=int, help="number of elements")
    sp.add_argument("-n", type=int, help="size of the scaled system (kind=system)")
    sp.add_argument("--T", type=_rational, help="final time (default N, i.e. h = 1)")
    sp.add_argument("--mu", type=_rational)
    sp.add_argument("--kind", default="mass", choices=["mass", "stiffness", "deriv", "system", "scaled"])
    common(sp, "p", "k", "rho", "delta")

    sp = sub.add_parser("classify", help="conditioning verdict of K_n^{p,k}(rho, delta)")
    common(sp, "p", "k", "rho", "delta")

    sp = sub.add_parser("codiag", help="outer codiagonals and critical rho")
    common(sp, "p", "k", "rho", "delta")

    sp = sub.add_parser("sweep", help="condition number sweeps and figure templates")
    sp.add_argument("--figure", type=int, choices=[4, 5, 6, 7, 8, 9])
    sp.add_argument("--scale", type=float, default=1.0, help="shrink n (or refinement levels) for quick runs")
    sp.add_argument("-n", type=int)
    sp.add_argument("-N", type=int)
    sp.add_argument("--mu", type=_rational)
    sp.add_argument("--T", type=_rational)
    sp.add_argument("--grid", type=_grid)
    sp.add_argument("--norm", default="two", choices=["one", "two", "inf"])
    sp.add_argument("-p", type=int)
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--rho", type=_rational)
    sp.add_argument("--delta", type=_rational)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["csv", "svg"])

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json"])
    return parser


class UsageError(Exception):
    pass


def _manifest(args, outputs: list[str]) -> dict:
    import mpmath
    import scipy

    inputs = {}
    for key, val in vars(args).items():
        if isinstance(val, Fraction):
            inputs[key] = format_rational(val)
        elif isinstance(val, list):
            inputs[key] = [format_rational(v) if isinstance(v, Fraction) else v for v in val]
        else:
            inputs[key] = val
    return {
        "command": args.command,
        "inputs": inputs,
        "outputs": outputs,
        "versions": {
            "splinestab": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "mpmath": mpmath.__version__,
        },
        "determinism": "no random seeds; exact assembly, deterministic output ordering",
    }


def _emit(args, text: str, default_name: str) -> list[str]:
    if not args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return []
    path = args.out
    if os.path.isdir(path) or path.endswith(os.sep):
        os.makedirs(path, exist_ok=True)
        path = os.path.join(path, default_name)
    else:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return [path]


def _write_manifest(args, outputs: list[str]) -> None:
    if not args.out or not outputs:
        return
    folder = os.path.dirname(outputs[0]) or "."
    with open(os.path.join(folder, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(_manifest(args, outputs), fh, indent=1)


def cmd_thresholds(args) -> int:
    from .symbols import thresholds

    rows = [thresholds(p) for p in range(1, args.pmax + 1)]
    fmt = args.format or "csv"
    if fmt == "json":
        data = [
            {
                "p": t.p,
                "rho_p": format_rational(t.rho_p),
                "delta_p": format_rational(t.delta_p),
                "rho_p_decimal": f"{float(t.rho_p):.15g}",
                "delta_p_decimal": f"{float(t.delta_p):.15g}",
                "delta_p_k": {str(k): format_rational(v) for k, v in t.delta_p_k.items()},
            }
            for t in rows
        ]
        text = json.dumps(data, indent=1)
    elif fmt == "csv":
        lines = ["p,rho_p,delta_p,rho_p_decimal,delta_p_decimal,delta_p_k"]
        for t in rows:
            dk = ";".join(f"{k}:{format_rational(v)}" for k, v in t.delta_p_k.items())
            lines.append(
                f"{t.p},{format_rational(t.rho_p)},{format_rational(t.delta_p)},"
                f"{float(t.rho_p):.15g},{float(t.delta_p):.15g},{dk}"
            )
        text = "\n".join(lines) + "\n"
    else:
        raise UsageError("thresholds supports --format csv or json")
    _write_manifest(args, _emit(args, text, f"thresholds.{fmt}"))
    return EXIT_OK


def cmd_assemble(args) -> int:
    from .galerkin import assemble, scaled_system, system_matrix

    p = args.p
    if args.kind == "scaled":
        if args.n is None or args.rho is None:
            raise UsageError("kind=scaled needs -n and --rho")
        mat = scaled_system(p, args.n, args.rho, args.delta or 0, args.k or p)
    else:
        if args.N is None:
            raise UsageError("-N is required")
        T = args.T if args.T is not None else Fraction(args.N)
        if args.kind == "system":
            if args.mu is None:
                raise UsageError("kind=system needs --mu")
            mat = system_matrix(p, args.N, T, args.mu, args.delta or 0, args.k or p)
        else:
            k = args.k if args.kind == "deriv" else None
            if args.kind == "deriv" and k is None:
                raise UsageError("kind=deriv needs -k")
            mat = assemble(p, args.N, T, args.kind, k)
    fmt = args.format or "json"
    if fmt == "json":
        text = mat.to_json()
    elif fmt == "mm":
        text = mat.to_matrix_market()
    elif fmt == "csv":
        text = "\n".join(",".join(format_rational(v) for v in row) for row in mat.to_dense()) + "\n"
    else:
        raise UsageError("assemble supports json, mm or csv")
    ext = {"json": "json", "mm": "mtx", "csv": "csv"}[fmt]
    _write_manifest(args, _emit(args, text, f"matrix.{ext}"))
    return EXIT_OK


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required")


def cmd_classify(args) -> int:
    from .galerkin import band_spec
    from .toeplitz import assoc_poly, classify_roots, classify_system

    _need(args, "rho", "delta")
    if args.rho <= 0 or args.delta > 0:
        raise UsageError("need rho > 0 and delta <= 0")
    k = args.k or args.p
    verdict = classify_system(args.p, args.rho, args.delta, k)
    spec = band_spec(args.p, args.rho, args.delta, k)
    coeffs = [float(c) for c in assoc_poly(spec).coeffs]
    roots = np.roots(coeffs[::-1])
    floating = classify_roots(spec.coeffs)
    data = {
        "p": args.p,
        "k": k,
        "rho": format_rational(args.rho),
        "delta": format_rational(args.delta),
        "band": {"m": spec.m, "k": spec.k, "coeffs": [format_rational(c) for c in spec.coeffs]},
        "type": verdict.evidence.as_list(),
        "eta": verdict.evidence.eta,
        "verdict": verdict.cls,
        "covered_by_theorem": verdict.covered,
        "band_reduced": verdict.fallback,
        "route": verdict.route,
        "float_type": floating.as_list(),
        "roots": [
            {"re": float(z.real), "im": float(z.imag), "modulus": float(abs(z))}
            for z in sorted(roots, key=lambda z: (abs(z), z.real, z.imag))
        ],
    }
    _write_manifest(args, _emit(args, json.dumps(data, indent=1), "classify.json"))
    return EXIT_OK


def cmd_codiag(args) -> int:
    from .galerkin import critical_rho, exceptional_deltas, outer_codiagonals

    _need(args, "rho", "delta")
    k = args.k or args.p
    star, hsh = outer_codiagonals(args.p, args.rho, args.delta, k)
    crit = critical_rho(args.p, args.delta, k)
    data = {
        "p": args.p,
        "k": k,
        "rho": format_rational(args.rho),
        "delta": format_rational(args.delta),
        "K_star": [format_rational(v) for v in star],
        "K_hash": [format_rational(v) for v in hsh],
        "critical_rho": None if crit is None else format_rational(crit),
        "exceptional_deltas": [format_rational(v) for v in exceptional_deltas(args.p, k)],
    }
    _write_manifest(args, _emit(args, json.dumps(data, indent=1), "codiag.json"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .lab import figure_sweeps, sweep

    fmt = args.format or "csv"
    if args.figure is not None:
        results = figure_sweeps(args.figure, scale=args.scale, degrees=[args.p] if args.p else None)
    else:
        if args.p is None or args.grid is None:
            raise UsageError("sweep needs --figure, or -p with --grid")
        k = args.k or args.p
        if args.mu is not None:
            axis, fixed = "N", {"mu": args.mu, "T": args.T or 1, "delta": args.delta or 0}
        elif args.n is None:
            raise UsageError("scaled sweeps need -n")
        elif args.rho is None:
            axis, fixed = "rho", {"n": args.n, "delta": args.delta or 0}
        elif args.delta is None:
            axis, fixed = "delta_abs", {"n": args.n, "rho": args.rho}
        else:
            raise UsageError("leave exactly one of --rho/--delta unset to choose the sweep axis")
        results = [sweep(args.p, k, axis, fixed, args.grid, norm=args.norm)]
    outputs = []
    if fmt == "csv":
        text = "".join(r.to_csv() if i == 0 else r.to_csv().split("\n", 1)[1] for i, r in enumerate(results))
        tag = f"figure{args.figure}" if args.figure else "sweep"
        outputs += _emit(args, text, f"{tag}.csv")
    else:
        if not args.out:
            raise UsageError("svg output needs --out")
        os.makedirs(args.out, exist_ok=True)
        for res in results:
            tag = f"figure{args.figure}" if args.figure else "sweep"
            path = os.path.join(args.out, f"{tag}_p{res.meta['p']}.svg")
            logx = args.figure in (7, 8, 9) or res.axis == "delta_abs"
            thr = res.meta.get("threshold")
            res.to_svg(path, logx=logx, title=f"p = {res.meta['p']}", vlines=() if thr is None else (thr,))
            outputs.append(path)
            csv_path = path[:-4] + ".csv"
            with open(csv_path, "w", encoding="utf-8") as fh:
                fh.write(res.to_csv())
            outputs.append(csv_path)
    _write_manifest(args, outputs)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks()
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, ok, detail in results]
    text = "\n".join(lines) + "\n"
    if args.format == "json":
        text = json.dumps([{"check": n, "ok": ok, "detail": d} for n, ok, d in results], indent=1)
    _write_manifest(args, _emit(args, text, "verify.txt"))
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VERIFY


COMMANDS = {
    "thresholds": cmd_thresholds,
    "assemble": cmd_assemble,
    "classify": cmd_classify,
    "codiag": cmd_codiag,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


_VALUE_FLAGS = ("--rho", "--delta", "--mu", "--T", "--grid")


def _join_negative(argv: list[str]) -> list[str]:
    # argparse takes "-1/240" for an option; glue such values to their flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:2] in ("-0", "-1", "-2", "-3", "-4", "-5",
                                                                           "-6", "-7", "-8", "-9", "-."):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None) -> int:
    from .toeplitz import HypothesisViolation

    parser = build_parser()
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisViolation as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
