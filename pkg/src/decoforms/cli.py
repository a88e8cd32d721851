"""Command-line interface: ``decoforms <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .counting import count_box, count_total
from .errors import DecoformsError, FormError, PreconditionError, ResourceError
from .factorization import NormForm, NumberFieldSpec, build_norm_form, factor_form, norm_value
from .forms import Form
from .harness import (CHECKS, EXIT_PRECONDITION, EXIT_RESOURCE, cmd_sweep, cmd_verify,
                      geometric_grid, sweep_csv)
from .invariants import analyze
from .parser import parse_form, render_form
from .ratios import estimate_lemma_constants, min_product_ratio, write_witness_csv
from .volume import volume_box, volume_region, volume_VF


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d(0), help="RNG seed (u64)")
    p.add_argument("--threads", type=int, default=d(1), help="worker count (results do not depend on it)")
    p.add_argument("--tol", type=float, default=d(1e-6), help="quadrature tolerance")
    p.add_argument("--budget", type=float, default=d(1e9), help="enumeration op budget")
    p.add_argument("--qmax", type=int, default=d(None), help="largest convergent denominator for Thue counts")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=d("json"))
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", default=d("json"))
    p.add_argument("--out", default=d(None), help="write output to this path")
    return p


def _add_form_args(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
    p.add_argument("expr", nargs="?", help="form expression, e.g. 'x^3 + 2*y^3'")
    p.add_argument("--form-file", help="JSON form file")
    p.add_argument("--normform-spec", help="JSON number field spec: {minpoly, coeffs}")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decoforms", parents=[_common(True)],
                                     description="Decomposable form invariants, counts and volumes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    parents = [_common(False)]

    def add(name, help, first=None):
        p = sub.add_parser(name, parents=parents, help=help)
        if first:
            first(p)
        return _add_form_args(p)

    add("parse", "canonical form and JSON")
    add("analyze", "invariant report")
    add("factor", "linear factorization")
    p = add("normform", help="build a norm form from a field spec")
    p.add_argument("--checks", type=int, default=20, help="random resultant checks")

    p = add("count", "exact lattice point counts")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--B", type=int, help="box bound; omit for a total count")

    p = add("volume", "volume estimates")
    p.add_argument("--kind", choices=["VF", "region", "box"], default="VF")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)

    p = add("verify", "run a verification check",
            lambda q: q.add_argument("check", choices=sorted(CHECKS)))
    p.add_argument("--m", type=int)
    p.add_argument("--B", type=int)
    p.add_argument("--grid", help="comma separated m values")
    p.add_argument("--K", type=float, help="allowed constant for eq36")

    p = add("sweep", "count/volume sweep with exponent fit")
    p.add_argument("--mode", choices=["total-bounded", "thue", "box"], default="total-bounded")
    p.add_argument("--grid", help="comma separated m values (default geometric)")
    p.add_argument("--mmin", type=int, default=100)
    p.add_argument("--mmax", type=int, default=10**6)
    p.add_argument("--ratio", type=float, default=10.0)
    p.add_argument("--B", type=int, help="box bound for --mode box")

    p = add("ratio", "factor product ratios")
    p.add_argument("--point", help="comma separated point; omit to estimate constants")
    p.add_argument("--family", choices=["I'", "J"], default="J")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--witnesses", type=int, default=0, help="samples to include in CSV output")
    return parser


def _load_form(args):
    """Return ``(form, source)`` where source is a NormForm or the Form itself."""
    given = [v is not None for v in (args.expr, args.form_file, args.normform_spec)]
    if sum(given) != 1:
        raise PreconditionError("give exactly one of: expression, --form-file, --normform-spec")
    if args.expr is not None:
        F = parse_form(args.expr)
        return F, F
    if args.form_file is not None:
        with open(args.form_file) as fh:
            F = Form.from_json(json.load(fh))
        return F, F
    with open(args.normform_spec) as fh:
        spec = NumberFieldSpec.from_json(json.load(fh))
    nf = build_norm_form(spec)
    return nf.form, nf


def _grid(text):
    return [int(float(v)) for v in text.split(",")] if text else None


def _run(args):
    """Dispatch; returns ``(payload, exit_code)`` where payload is dict or str."""
    F, source = _load_form(args)
    cmd = args.command
    if cmd == "parse":
        return {"form": render_form(F), **F.to_json()}, 0
    if cmd == "analyze":
        rep = analyze(source, budget=int(min(args.budget, 10**6)))
        out = rep.to_json()
        if rep.quadratic_power is not None:
            qp = rep.quadratic_power
            out["quadratic_power"] = {"h": qp.h, "k": qp.k, "A": qp.A, "B": qp.B, "C": qp.C}
        return out, 0
    if cmd == "factor":
        return factor_form(source).to_json(), 0
    if cmd == "normform":
        if not isinstance(source, NormForm):
            raise PreconditionError("normform needs --normform-spec")
        import random
        rng = random.Random(args.seed)
        checks = []
        for _ in range(args.checks):
            a = tuple(rng.randint(-20, 20) for _ in range(F.n))
            checks.append(F(a) == norm_value(source.spec, a))
        return {"form": render_form(F), "form_json": F.to_json(), "checks": len(checks),
                "checks_passed": sum(checks)}, 0 if all(checks) else 1
    if cmd == "count":
        res = count_box(F, args.m, args.B, int(args.budget)) if args.B is not None \
            else count_total(F, args.m, int(args.budget), args.qmax)
        return res.to_json(), 0
    if cmd == "volume":
        fs = source
        if args.kind == "VF":
            est = volume_VF(fs, args.tol, args.seed)
        elif args.kind == "region":
            est = volume_region(fs, args.m, args.B, args.tol, args.seed)
        else:
            est = volume_box(fs, args.m, args.B, args.tol, args.seed)
        return est.to_json(), 0
    if cmd == "verify":
        params = {}
        if args.m is not None:
            params["m"] = args.m
        if args.B is not None:
            params["B"] = args.B
        if args.grid:
            params["m_grid"] = _grid(args.grid)
        elif args.check == "eq36" and args.m is not None:
            params["m_grid"] = [args.m]
        if args.K is not None:
            params["K"] = args.K
        if args.check == "eq3-homogeneity":
            params["seed"] = args.seed
        rep = cmd_verify(args.check, F, **params)
        return rep.to_json(), rep.exit_code
    if cmd == "sweep":
        grid = _grid(args.grid) or geometric_grid(args.mmin, args.mmax, args.ratio)
        records, fit = cmd_sweep(F, grid, args.mode, B=args.B, tol=args.tol,
                                 q_max=args.qmax, budget=int(args.budget))
        if args.fmt == "csv":
            if fit is not None:
                print(f"# fit slope={fit.slope:.12g} stderr={fit.stderr:.12g} "
                      f"intercept={fit.intercept:.12g} points={fit.points_used}", file=sys.stderr)
            return sweep_csv(records), 0
        return {"records": [r.__dict__ for r in records],
                "fit": None if fit is None else fit.to_json()}, 0
    if cmd == "ratio":
        fs = factor_form(source)
        if args.point:
            x = [float(v) for v in args.point.split(",")]
            s = min_product_ratio(fs, x, args.family)
            return {"point": list(s.point), "tuple": list(s.tuple), "ratio": s.ratio}, 0
        res = estimate_lemma_constants(fs, args.samples, args.seed, keep=args.witnesses)
        if args.fmt == "csv":
            import io
            buf = io.StringIO()
            write_witness_csv([w for w in (res.witness1, res.witness2) if w] + res.samples, buf)
            return buf.getvalue(), 0
        return {"C1_hat": res.C1_hat, "C2_hat": res.C2_hat,
                "witness1": None if res.witness1 is None else res.witness1.point,
                "witness2": None if res.witness2 is None else res.witness2.point}, 0
    raise PreconditionError(f"unknown command {cmd}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = _run(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FormError, DecoformsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))
    return code


if __name__ == "__main__":
    sys.exit(main())
