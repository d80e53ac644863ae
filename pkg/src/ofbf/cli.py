"""Command-line interface: ``ofbf construct | classify | covariance | simulate | verify``."""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import construct, groups, sim, specfile, verify
from .errors import ConstructionFailure, InvalidInput, NumericalFailure, OfbfError
from .measures import AtomicMeasure, ConstantMeasure, PiecewiseMeasure
from .spectral import QuadratureConfig, covariance_detail, oss_check
from .symmetry import classify

EXIT_OK, EXIT_CHECKS, EXIT_USER, EXIT_CONSTRUCTION, EXIT_NUMERICAL = 0, 1, 2, 3, 4


def _print_json(obj, stream=None):
    print(json.dumps(obj, indent=2, default=float), file=stream or sys.stdout)


def _parse_points(text, m):
    pts = []
    for chunk in text.replace("\n", ";").split(";"):
        if chunk.strip():
            try:
                pts.append([float(v) for v in chunk.split(",")])
            except ValueError:
                raise InvalidInput(f"cannot parse point {chunk!r}") from None
    if not pts or any(len(p) != m for p in pts):
        raise InvalidInput(f"points must be ';'-separated lists of {m} comma-separated numbers")
    return np.array(pts)


def _points(args, m):
    if args.points_file:
        with open(args.points_file) as fh:
            return _parse_points(fh.read(), m)
    if args.points:
        return _parse_points(args.points, m)
    raise InvalidInput("give --points or --points-file")


def _load(path):
    doc = specfile.load(path)
    return doc.spec, doc.quadrature


def _writer(path):
    return open(path, "w", newline="") if path else io.StringIO()


def cmd_construct(args):
    g = groups.parse_group(args.domain)
    spec = construct.build(g, args.range, args.mode, h=args.h, kappa=args.kappa)
    if args.out:
        specfile.save(args.out, spec, notes=[f"built for domain {args.domain}, range {args.range}, mode {args.mode}"])
    else:
        print(specfile.dumps(spec))
    _print_json(classify(spec).to_dict(), sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_classify(args):
    spec, _ = _load(args.spec)
    _print_json(classify(spec).to_dict())
    return EXIT_OK


def _axis_names(m):
    return ["x", "y"][:m] if m <= 2 else [f"c{k}" for k in range(m)]


def _slice_rows(meas):
    if isinstance(meas, PiecewiseMeasure):
        return [{"start": specfile.theta_to_json(s), "end": specfile.theta_to_json(e), "value": specfile._matrix_json(v)} for s, e, v in meas.arcs()]
    if isinstance(meas, ConstantMeasure):
        return [{"start": 0.0, "end": "1/1*2pi", "value": specfile._matrix_json(meas.value)}]
    if isinstance(meas, AtomicMeasure):
        return [{"theta": specfile.theta_to_json(t), "value": specfile._matrix_json(v)} for t, v in meas.atoms]
    raise InvalidInput("unknown measure type")


def cmd_covariance(args):
    spec, quad = _load(args.spec)
    cfg = quad or QuadratureConfig()
    if args.emit_slices:
        with open(args.emit_slices, "w") as fh:
            json.dump({"version": specfile.VERSION, "slices": _slice_rows(spec.spherical)}, fh, indent=2)
    pts = _points(args, spec.m)
    ax = _axis_names(spec.m)
    n = spec.n
    header = [f"t1_{a}" for a in ax] + [f"t2_{a}" for a in ax] + [f"g{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    fh = _writer(args.out)
    w = csv.writer(fh)
    w.writerow(header)
    errs = []
    for a in pts:
        for b in pts:
            res = covariance_detail(spec, a, b, cfg)
            errs.append(res.error_estimate)
            w.writerow([repr(float(v)) for v in (*a, *b, *res.value.ravel())])
    if args.out:
        fh.close()
        side = {"rows": len(errs), "max_error_estimate": max(errs), "error_estimates": errs, "quadrature": cfg.to_dict()}
        with open(args.out + ".json", "w") as sfh:
            json.dump(side, sfh, indent=2)
    else:
        sys.stdout.write(fh.getvalue())
    if args.check_oss is not None:
        dev = oss_check(spec, args.check_oss, verify.probe_pairs(spec.m), cfg)
        print(f"operator self-similarity deviation at c={args.check_oss}: {dev:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    spec, quad = _load(args.spec)
    pts = _points(args, spec.m)
    state = sim.build_sampler(spec, sim.GridDesign(pts), quad, seed=args.seed)
    X = sim.sample(state, args.count)
    ax = _axis_names(spec.m)
    fh = _writer(args.out)
    w = csv.writer(fh)
    w.writerow(["sample_id", *ax, *[f"x{k + 1}" for k in range(spec.n)]])
    for s in range(args.count):
        for i, p in enumerate(pts):
            w.writerow([s, *(repr(float(v)) for v in p), *(repr(float(v)) for v in X[s, i])])
    if args.out:
        fh.close()
        with open(args.out + ".json", "w") as sfh:
            json.dump({"dims": [len(pts), spec.n], "points": pts.tolist(), "seed": args.seed, "jitter": state.jitter, "jitter_ladder": list(sim.JITTER_LADDER)}, sfh, indent=2)
    else:
        sys.stdout.write(fh.getvalue())
    return EXIT_OK


def cmd_verify(args):
    checks = []
    if args.suite in ("spec", "all"):
        if not args.spec:
            raise InvalidInput(f"suite {args.suite!r} needs a spec file")
        spec, quad = _load(args.spec)
        checks += verify.spec_checks(spec, quad)
    if args.suite in ("tables", "all"):
        checks += verify.table_checks()
    summary = verify.summarize(checks)
    _print_json(summary)
    if not summary["passed"]:
        print("failed checks: " + ", ".join(summary["failed"]), file=sys.stderr)
        return EXIT_CHECKS
    return EXIT_OK


def _add_points(p):
    p.add_argument("--points", help="points as 'x,y;x,y;...'")
    p.add_argument("--points-file", help="file with one comma-separated point per line")


def build_parser():
    ap = argparse.ArgumentParser(prog="ofbf", description="Operator fractional Brownian fields: construction, classification, covariance and simulation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a spec with prescribed domain and range symmetry groups")
    p.add_argument("--domain", required=True, help="cyclic:N, dihedral:N, dstar1 or o2")
    p.add_argument("--range", required=True, help="c2, d2, so2 or o2")
    p.add_argument("--mode", choices=("ac", "singular"), default="ac")
    p.add_argument("--h", type=float, default=construct.DEFAULT_H)
    p.add_argument("--kappa", type=float, default=construct.DEFAULT_KAPPA)
    p.add_argument("--out", help="output spec file (stdout if omitted)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify", help="print the symmetry report of a spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("covariance", help="covariance on all pairs of the given points as CSV")
    p.add_argument("spec")
    _add_points(p)
    p.add_argument("--out", help="CSV path; a .json sidecar with error estimates is written next to it")
    p.add_argument("--check-oss", type=float, metavar="C", help="also report the self-similarity deviation at scale C")
    p.add_argument("--emit-slices", metavar="PATH", help="write the arcs and values of the spherical measure as JSON")
    p.set_defaults(func=cmd_covariance)

    p = sub.add_parser("simulate", help="draw Gaussian realizations on the given points")
    p.add_argument("spec")
    _add_points(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run invariant checks on a spec and/or the reference tables")
    p.add_argument("spec", nargs="?")
    p.add_argument("--suite", choices=("spec", "tables", "all"), default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "suite", "unset") is None:
        args.suite = "spec" if args.spec else "tables"
    try:
        return args.func(args)
    except ConstructionFailure as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except OfbfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
