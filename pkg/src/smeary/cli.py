"""Command-line entry point: ``smeary <command> [options]``.

Exit codes: 0 success, 1 domain error, 2 numerical failure, 64 usage error.
Errors are printed to stderr as a JSON object. Relative output paths are
resolved against ``$SMEARY_OUTPUT_DIR`` when it is set.
"""
import argparse
import csv
import io
import json
import os
import sys

from . import kernels as K
from .checks import ACCEPTANCE, run_acceptance
from .constructions import build_directional, build_smeary_rot
from .densities import load_density
from .errors import DomainError, SmearyError
from .montecarlo import DEFAULT_DIMS, DEFAULT_NS, DEFAULT_R_EPS, experiment_curse, to_csv, write_svg
from .spectra import spectral_report
from .taylor import METHODS, radial_coeffs, taylor_coeffs, taylor_coeffs_cosine

OUTPUT_DIR_ENV = "SMEARY_OUTPUT_DIR"
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "UsageError", "message": message}) + "\n")
        sys.exit(EX_USAGE)


def _out_path(path):
    if path is None or os.path.isabs(path):
        return path
    base = os.environ.get(OUTPUT_DIR_ENV)
    return os.path.join(base, path) if base else path


def _emit(text, path=None):
    path = _out_path(path)
    if path is None:
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n"


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _m_range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError("range must satisfy 2 <= LO <= HI")
    return lo, hi


def cmd_roots(args):
    lo, hi = args.m_range
    rows = []
    for m in range(lo, hi + 1):
        r = K.find_R_m(m)
        s = K.find_S_m(m) if m >= 4 else None
        rows.append({"m": m, "R_m": r.value, "S_m": None if s is None else s.value,
                     "residual_R": r.residual, "residual_S": None if s is None else s.residual})
    if args.out == "json":
        _emit(_json(rows), args.output)
        return 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["m", "R_m", "S_m", "residual_R", "residual_S"]
    w.writerow(cols)
    for row in rows:
        w.writerow(["" if row[c] is None else repr(row[c]) if isinstance(row[c], float) else row[c]
                    for c in cols])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_kernels(args):
    if args.what == "taylor":
        if args.R is None or args.alpha is None:
            raise DomainError("--what taylor needs --R and --alpha")
        if args.cosine:
            tc = taylor_coeffs_cosine(args.R, args.alpha, method=args.method)
        else:
            tc = taylor_coeffs(args.R, args.alpha, method=args.method)
        out = {"R": args.R, "alpha": args.alpha, "alpha_is_cosine": args.cosine,
               **tc.to_dict(), **radial_coeffs(args.R, method=args.method).to_dict()}
        _emit(_json(out), args.output)
        return 0
    if args.m is None:
        raise DomainError("--what kernel needs --m")
    R, b, h = K.kernel_table(args.m, args.grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R", "b_m", "h_m"])
    for row in zip(R, b, h):
        w.writerow([repr(float(x)) for x in row])
    _emit(buf.getvalue(), args.output)
    return 0


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError("cannot read density config", path=path, reason=str(exc))


def cmd_spectra(args):
    radial, angular, m_cfg = load_density(_read_json(args.density))
    m = args.m if args.m is not None else m_cfg
    if m is None:
        raise DomainError("dimension m missing: pass --m or set 'm' in the config")
    _emit(_json(spectral_report(radial, angular, int(m)).to_dict()), args.output)
    return 0


def cmd_construct(args):
    if args.kind == "smeary":
        rec = build_smeary_rot(args.m, args.eps, phi2_scale=args.phi2_scale)
    else:
        rec = build_directional(args.m, args.eps)
    _emit(_json(rec.to_dict()), args.out)
    return 0


def cmd_simulate(args):
    if args.reps < 1:
        raise DomainError("--reps must be positive", reps=args.reps)
    res = experiment_curse(dims=args.dims, ns=args.ns, reps=args.reps, R_eps=args.r_eps,
                           master_seed=args.seed, init=args.init, jobs=args.jobs)
    _emit(to_csv(res), args.out)
    if args.svg:
        write_svg(res, _out_path(args.svg))
    if args.reps_theory:
        sys.stdout.write(_json(res.summary()))
    return 2 if res.failures else 0


def cmd_verify(args):
    results = run_acceptance(args.only)
    for r in results:
        print(r.line(), flush=True)
    if args.json:
        _emit(_json([r.to_dict() for r in results]), args.json)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser():
    p = _Parser(prog="smeary", description="Smeary Frechet means on spheres: kernels, spectra, "
                                           "constructions and modulation experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("roots", help="critical radii R_m and S_m")
    r.add_argument("--m-range", type=_m_range, default=(2, 200), help="inclusive LO:HI (default 2:200)")
    r.add_argument("--out", choices=("csv", "json"), default="csv", help="output format")
    r.add_argument("--output", help="output file (default stdout)")
    r.set_defaults(func=cmd_roots)

    k = sub.add_parser("kernels", help="Taylor coefficients or a tabulated kernel")
    k.add_argument("--what", choices=("taylor", "kernel"), default="kernel")
    k.add_argument("--R", type=float, help="radius for --what taylor")
    k.add_argument("--alpha", type=float, help="<a, v> with |alpha| <= R (a cosine with --cosine)")
    k.add_argument("--cosine", action="store_true", help="read --alpha as the cosine of the angle")
    k.add_argument("--method", choices=METHODS, default="auto", help="coefficient evaluation route")
    k.add_argument("--m", type=int, help="dimension for the kernel table")
    k.add_argument("--grid", type=int, default=200, help="number of radii in the table")
    k.add_argument("--output", help="output file (default stdout)")
    k.set_defaults(func=cmd_kernels)

    s = sub.add_parser("spectra", help="Hessian spectrum, quartic and classification of a density")
    s.add_argument("--density", required=True, help="JSON density config or construction recipe")
    s.add_argument("--m", type=int, help="dimension (overrides the config)")
    s.add_argument("--output", help="output file (default stdout)")
    s.set_defaults(func=cmd_spectra)

    c = sub.add_parser("construct", help="build a smeary or directionally smeary density")
    c.add_argument("kind", choices=("smeary", "directional"))
    c.add_argument("--m", type=int, required=True, help="dimension")
    c.add_argument("--eps", type=float, required=True, help="support radius beyond pi/2")
    c.add_argument("--phi2-scale", type=float, default=1.0, help="initial width factor of the outer bump")
    c.add_argument("--out", help="recipe JSON path (default stdout)")
    c.set_defaults(func=cmd_construct)

    m = sub.add_parser("simulate", help="Monte Carlo modulation experiment")
    m.add_argument("--dims", type=_int_list, default=list(DEFAULT_DIMS), help="comma-separated m values")
    m.add_argument("--ns", type=_int_list, default=list(DEFAULT_NS), help="comma-separated sample sizes")
    m.add_argument("--reps", type=int, default=3, help="replicates per cell")
    m.add_argument("--reps-theory", action="store_true", help="print mean Z_n against theory as JSON")
    m.add_argument("--r-eps", type=float, default=DEFAULT_R_EPS, help="cap radius (< pi/2)")
    m.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    m.add_argument("--init", choices=("north", "random"), default="north", help="gradient-descent start")
    m.add_argument("--jobs", type=int, default=1, help="worker processes")
    m.add_argument("--out", default="results.csv", help="CSV path")
    m.add_argument("--svg", help="optional SVG plot path")
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--only", nargs="*", choices=[n.split()[0] for n, _ in ACCEPTANCE],
                   help="subset of check numbers")
    v.add_argument("--json", help="also write results as JSON")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SmearyError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), default=float, sort_keys=True) + "\n")
        return exc.exit_code
    except (ValueError, FloatingPointError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
