"""Command-line front end: ``padic-spectra <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical refusal (a guard
violation or a singular resolvent system).  Every JSON output embeds a
manifest with the command, its parameters, the version and tolerances.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__, mseries, models, selftest
from .green import eval_h, h_coefficients
from .mseries import DEFAULT_TOL, GUARD_ABS, GUARD_REL, SpectralGuardError
from .operator import (
    ROOT_RTOL,
    RealizationConfig,
    boundary_residual,
    char_det,
    classify_realization,
    eta_matrix_parity,
    find_complex_eigenvalues,
    find_real_eigenvalues,
    resolvent_apply,
)
from .padic import as_fraction
from .wavelet import WaveletSum

EXIT_OK, EXIT_INVALID, EXIT_REFUSED = 0, 2, 3


class UsageError(ValueError):
    pass


# --- parsing helpers ---------------------------------------------------------

def parse_complex(text) -> complex | float:
    """A number, or an [re, im] JSON pair."""
    if isinstance(text, (int, float)):
        return float(text)
    if isinstance(text, list):
        if len(text) != 2:
            raise UsageError(f"complex values are [re, im] pairs, got {text!r}")
        re, im = float(text[0]), float(text[1])
        return complex(re, im) if im else re
    text = str(text).strip()
    if text.startswith("["):
        return parse_complex(json.loads(text))
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"malformed number {text!r}") from None


def parse_points(text: str) -> list[Fraction]:
    try:
        return [as_fraction(s) for s in text.split(",") if s.strip()]
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def parse_matrix(text: str | None, n: int):
    if text is None or text.strip().lower() in ("inf", "friedrichs"):
        return None
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"matrix is not valid JSON: {exc}") from None
    try:
        M = np.array([[complex(parse_complex(v)) for v in row] for row in rows])
    except (TypeError, UsageError) as exc:
        raise UsageError(f"malformed matrix: {exc}") from None
    if M.shape != (n, n):
        raise UsageError(f"matrix must be {n}x{n}, got shape {M.shape}")
    return M


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(s) for s in text.split(":"))
    except ValueError:
        raise UsageError(f"window must be N_lo:N_hi, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty window {text!r}")
    return lo, hi


def parse_b(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"malformed b {text!r}") from None


def parse_grid(text: str) -> list[float | complex]:
    """Either a single value or lo:hi:count (linear grid)."""
    if text.count(":") == 2:
        lo, hi, count = text.split(":")
        return [float(v) for v in np.linspace(float(lo), float(hi), int(count))]
    return [parse_complex(text)]


def cjson(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# --- commands -----------------------------------------------------------------

def cmd_mfunc(args) -> dict:
    rows = []
    for lam in parse_grid(args.lambda_):
        if args.diff:
            if args.gamma is None:
                raise UsageError("--diff needs --gamma")
            ev = mseries.eval_diff(args.gamma, lam, args.alpha, args.p, args.tol)
        elif args.derivative:
            ev = mseries.eval_M_prime(-math.inf if args.gamma is None else args.gamma,
                                      lam, args.alpha, args.p, args.tol)
        else:
            ev = mseries.eval_M(-math.inf if args.gamma is None else args.gamma,
                                lam, args.alpha, args.p, args.tol)
        rows.append({"lambda": cjson(lam), "value": cjson(ev.value),
                     "bound": ev.error_bound, "terms": ev.terms_used})
    return {"rows": rows}


def cmd_greens(args) -> dict:
    center = as_fraction(args.center)
    lam = parse_complex(args.lambda_)
    pts = parse_points(args.x)
    out = {"center": str(center), "lambda": cjson(lam), "values": []}
    series = h_coefficients(center, lam, args.alpha, args.p, tol=args.tol) if args.series else None
    for x in pts:
        ev = eval_h(center, lam, x, args.alpha, args.p, args.tol)
        row = {"x": str(x), "value": cjson(ev.value), "bound": ev.error_bound}
        if series is not None:
            row["series_value"] = cjson(series.coefficients(x))
            row["series_tail_bound"] = series.pointwise_tail_bound
        out["values"].append(row)
    if series is not None:
        out["series_window"] = list(series.window)
    return out


def _config(args) -> RealizationConfig:
    pts = parse_points(args.points)
    B = parse_matrix(args.B, len(pts))
    eta = None
    if getattr(args, "eta", "none") == "parity":
        eta = eta_matrix_parity(pts)
    return RealizationConfig(args.p, args.alpha, pts, B, eta)


def cmd_spectrum(args) -> dict:
    config = _config(args)
    out = {"classification": classify_realization(config)}
    if args.rect:
        rect = tuple(float(v) for v in args.rect.split(","))
        if len(rect) != 4:
            raise UsageError("--rect needs re_lo,re_hi,im_lo,im_hi")
        records = find_complex_eigenvalues(config, rect, tol=args.tol)
    else:
        records = find_real_eigenvalues(config, parse_window(args.window), args.negative_axis,
                                        args.tol)
    out["eigenvalues"] = [r.to_json() for r in records]
    return out


def cmd_resolvent(args) -> dict:
    config = _config(args)
    lam = parse_complex(args.lambda_)
    with open(args.input) as fh:
        f = WaveletSum.from_json(config.p, json.load(fh))
    result = resolvent_apply(config, lam, f, args.tol)
    out = result.to_json()
    out["boundary_residual"] = boundary_residual(config, result, args.tol)
    return out


def _trace(fn, alpha: float, p: int, window, per_interval: int = 200) -> list[tuple[float, float]]:
    rows = []
    for N in range(window[0], window[1] + 1):
        lo, hi = float(p) ** (alpha * N), float(p) ** (alpha * (N + 1))
        for k in range(1, per_interval):
            lam = lo * (hi / lo) ** (k / per_interval)
            try:
                rows.append((lam, fn(lam)))
            except SpectralGuardError:
                continue
    return rows


def cmd_model(args) -> dict:
    window = parse_window(args.window)
    p, alpha, tol = args.p, args.alpha, args.tol
    preset = args.preset
    if preset == "friedrichs":
        pts = parse_points(args.points)
        spec = models.friedrichs_spectrum(pts, alpha, p, window, args.negative_axis, tol)
        out = {"spectrum": spec.to_json()}
        if spec.type1:
            out["gamma_min"] = models.recover_gamma_min(spec)
        cfg = RealizationConfig(p, alpha, pts, None)
        fn = lambda lam: char_det(cfg, lam, tol).real  # noqa: E731
    elif preset == "sym2":
        spec = models.two_point_symmetric_spectrum(args.a, args.b, args.gamma, alpha, p, window,
                                                   True, tol)
        out = {"spectrum": spec.to_json()}
        fn = lambda lam: ((models._diff(args.gamma, lam, alpha, p, tol) + args.a - args.b)  # noqa: E731
                          * (models._m0(lam, alpha, p, tol) + models._mg(args.gamma, lam, alpha, p, tol)
                             + args.a + args.b))
    elif preset == "pt2":
        rep = models.pt_two_point_real_eigenvalues(args.a, args.b, args.gamma, alpha, p, window, tol)
        cfg = models.pt_config(args.a, args.b, args.gamma, alpha, p)
        out = {"report": rep.to_json(), "classification": classify_realization(cfg, use_eta=True)}
        fn = lambda lam: models.pt_char(lam, args.a, args.b, args.gamma, alpha, p, tol)  # noqa: E731
    else:
        b = parse_b(args.b_onepoint)
        roots = models.one_point_eigenvalues(b, alpha, p, window, True, tol)
        out = {"b": args.b_onepoint, "eigenvalues": [[t, lam] for t, lam in roots]}
        if b != 0:
            fn = models._one_point_fn(b, alpha, p, tol)
        else:
            fn = None
    if args.trace and fn is not None:
        with open(args.trace, "w") as fh:
            fh.write(f"# preset={preset} p={p} alpha={alpha}\n# lambda\tchar\n")
            for lam, v in _trace(fn, alpha, p, window):
                fh.write(f"{lam!r}\t{v!r}\n")
        out["trace_file"] = args.trace
    return out


def cmd_selftest(args) -> dict:
    results = selftest.run(args.seed)
    for name, ok in results.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=sys.stderr)
    return {"results": results, "all_passed": all(results.values())}


# --- argument parser -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-spectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series tolerance")
    ctx = argparse.ArgumentParser(add_help=False)
    ctx.add_argument("--p", type=int, required=True)
    ctx.add_argument("--alpha", type=float, required=True)
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mfunc", parents=[common, ctx], help="M-series values with error bounds")
    m.add_argument("--gamma", type=int, help="omit for M_0")
    m.add_argument("--lambda", dest="lambda_", required=True, help="value, [re,im] or lo:hi:count")
    m.add_argument("--diff", action="store_true", help="M_0 - M_{p^gamma} by its one-sided series")
    m.add_argument("--derivative", action="store_true")
    m.add_argument("--format", choices=("json", "csv"), default="json")
    m.set_defaults(func=cmd_mfunc)

    g = sub.add_parser("greens", parents=[common, ctx], help="Green's function values")
    g.add_argument("--center", required=True)
    g.add_argument("--lambda", dest="lambda_", required=True)
    g.add_argument("--x", required=True, help='evaluation points "x1,x2,..."')
    g.add_argument("--series", action="store_true", help="also sum the wavelet expansion")
    g.set_defaults(func=cmd_greens)

    def config_flags(sp):
        sp.add_argument("--points", required=True, help='"x1,x2,..." as integers or a/b')
        sp.add_argument("--B", help="row-major JSON matrix; entries number or [re,im]; "
                                    "omit or 'inf' for the Friedrichs extension")
        sp.add_argument("--eta", choices=("parity", "none"), default="none")

    s = sub.add_parser("spectrum", parents=[common, ctx], help="eigenvalues of a realization")
    config_flags(s)
    s.add_argument("--window", default="-3:3", help="N_lo:N_hi")
    s.add_argument("--negative-axis", action="store_true")
    s.add_argument("--rect", help="complex search rectangle re_lo,re_hi,im_lo,im_hi")
    s.set_defaults(func=cmd_spectrum)

    r = sub.add_parser("resolvent", parents=[common, ctx], help="apply the Krein resolvent")
    config_flags(r)
    r.add_argument("--lambda", dest="lambda_", required=True)
    r.add_argument("--input", required=True, help="WaveletSum JSON file")
    r.set_defaults(func=cmd_resolvent)

    md = sub.add_parser("model", parents=[common, ctx], help="worked models")
    md.add_argument("preset", choices=("friedrichs", "sym2", "pt2", "onepoint"))
    md.add_argument("--points", default="0,1")
    md.add_argument("--gamma", type=int, default=0)
    md.add_argument("--a", type=float, default=0.0)
    md.add_argument("--b", type=float, default=0.0)
    md.add_argument("--b-onepoint", default="inf", help="one-point coupling (number or inf)")
    md.add_argument("--window", default="-3:3")
    md.add_argument("--negative-axis", action="store_true")
    md.add_argument("--trace", help="write (lambda, characteristic function) rows here")
    md.set_defaults(func=cmd_model)

    st = sub.add_parser("selftest", parents=[common], help="fast invariant checks")
    st.add_argument("--seed", type=int, default=0)
    st.set_defaults(func=cmd_selftest)
    return parser


def manifest(args) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return {"command": args.command, "parameters": params, "version": __version__,
            "tolerances": {"series": args.tol, "roots_relative": ROOT_RTOL,
                           "guard_relative": GUARD_REL, "guard_absolute": GUARD_ABS},
            "output": args.out}


def _emit(args, payload: dict) -> None:
    if args.command == "mfunc" and args.format == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps(manifest(args), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda_re", "lambda_im", "value_re", "value_im", "bound"])
        for row in payload["rows"]:
            w.writerow([*row["lambda"], *row["value"], row["bound"]])
        text = buf.getvalue()
    else:
        text = json.dumps({"manifest": manifest(args), **payload}, indent=2, sort_keys=True,
                          default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


_VALUE_FLAGS = {"--window", "--lambda", "--rect", "--points", "--center", "--x", "--a", "--b",
                "--b-onepoint", "--gamma"}


def _join_values(argv: list[str]) -> list[str]:
    """Turn ``--window -3:3`` into ``--window=-3:3`` so argparse does not read a flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        payload = args.func(args)
    except SpectralGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except np.linalg.LinAlgError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(args, payload)
    if args.command == "selftest" and not payload["all_passed"]:
        return 1
    return EXIT_OK


def main() -> int:
    return run()
