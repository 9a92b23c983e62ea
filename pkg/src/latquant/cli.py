"""Command-line front end: ``latquant <command> [options]``.

Primary output goes to stdout (or ``--output``).  With ``--output`` a
``<output>.manifest.json`` is written next to it recording the command line,
catalog version, seeds, precision, wall time and a digest of the output.
Exit codes: 0 success, 1 computation error or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__, catalog
from .exact.scalars import ScalarSyntaxError, parse_scalar

OPT_CACHE = ".latquant-opt.json"


class UsageError(Exception):
    pass


# -- lattice resolution -------------------------------------------------------------------


def _opt_values(family: str, run_dir: Path) -> dict:
    """Certified optimum for ``family`` as decimal strings, cached in the run directory."""
    path = run_dir / OPT_CACHE
    cache = {}
    if path.exists():
        try:
            cache = json.loads(path.read_text())
        except json.JSONDecodeError:
            cache = {}
    key = f"{family}@{catalog.CATALOG_VERSION}"
    if key not in cache:
        from . import exact_nsm

        if family == "B14":
            o = exact_nsm.optimize_g14()
            cache[key] = {"a": o.a_opt.to_decimal(40)}
        else:
            o = exact_nsm.optimize_g13()
            cache[key] = {"a1": "1", "a2": o.a2.to_decimal(40), "a3": o.a3.to_decimal(40)}
        try:
            path.write_text(json.dumps(cache, indent=1, sort_keys=True) + "\n")
        except OSError:
            pass  # read-only run directory: still usable, just not cached
    return cache[key]


def _parse_value(text: str):
    try:
        return parse_scalar(text)
    except (ScalarSyntaxError, ZeroDivisionError) as exc:
        raise UsageError(f"bad parameter value {text!r}: {exc}") from None


def _parse_params(items) -> dict:
    out = {}
    for item in items:
        for part in item.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"parameter {part!r} must look like name=value")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def resolve_lattice(spec: str | None, file: str | None, params: list[str], run_dir: Path):
    """Lattice from ``--lattice name[:k=v,...]`` or ``--file``."""
    if bool(spec) == bool(file):
        raise UsageError("give exactly one of --lattice or --file")
    extra = _parse_params(params or [])
    if file:
        from .latfile import LatticeFileError, read_lattice_file
        from .lattice import GlueSpec, glue

        try:
            obj = read_lattice_file(file, {k: _parse_value(v) for k, v in extra.items()} or None)
        except LatticeFileError as exc:
            raise UsageError(f"{file}: {exc}") from None
        except OSError as exc:
            raise UsageError(str(exc)) from None
        return glue(obj) if isinstance(obj, GlueSpec) else obj
    name, _, rest = spec.partition(":")
    kv = _parse_params([rest]) if rest else {}
    kv.update(extra)
    key = catalog._ALIASES.get(name, name)
    if kv.get("a") == "opt" and key in ("B14", "B14-glued", "B13", "B13-glued"):
        fam = "B14" if key.startswith("B14") else "B13"
        vals = _opt_values(fam, run_dir)
        kv.pop("a")
        parsed = {k: float(v) for k, v in vals.items()}
        if fam == "B13":
            parsed["a1"] = 1.0
    else:
        parsed = {}
        for k, v in kv.items():
            parsed[k] = int(v) if k == "n" else _parse_value(v)
    try:
        obj = catalog.get(name, **parsed)
    except catalog.CatalogError as exc:
        raise UsageError(str(exc)) from None
    from .lattice import GlueSpec, Lattice, glue

    if isinstance(obj, GlueSpec):
        return glue(obj)
    if not isinstance(obj, Lattice):
        raise UsageError(f"catalog entry {name!r} is data, not a lattice")
    return obj


# -- output -----------------------------------------------------------------------------------


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _emit(args, text: str, started: float) -> None:
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        manifest = {
            "command": sys.argv[1:] if args.argv is None else args.argv,
            "catalog_version": catalog.CATALOG_VERSION,
            "package_version": __version__,
            "seed": getattr(args, "seed", None),
            "samples": getattr(args, "samples", None),
            "digits": getattr(args, "digits", None),
            "tol": getattr(args, "tol", None),
            "workers": getattr(args, "workers", None),
            "wall_seconds": round(time.perf_counter() - started, 3),
            "output": out.name,
            "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
        out.with_name(out.name + ".manifest.json").write_text(_json(manifest))
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------------------------


def _lat(args):
    return resolve_lattice(args.lattice, args.file, args.param, Path(args.run_dir))


def cmd_theta(args) -> tuple[str, int]:
    from .enumeration import theta_image

    L = _lat(args)
    th = theta_image(L, args.rmax, det1=args.det1)
    if args.out == "csv":
        return th.to_csv(), 0
    return _json({"lattice": L.describe(), "det1": args.det1, "r2_max": args.rmax, "steps": [list(s) for s in th.steps]}), 0


def cmd_nsm(args) -> tuple[str, int]:
    from .moments import estimate_nsm

    L = _lat(args)
    rep = estimate_nsm(L, args.samples, args.seed, args.workers)
    row = {"lattice": L.describe(), "samples": rep.samples, "seed": rep.seed, "G_hat": rep.G_hat, "G_stderr": rep.G_stderr}
    if args.out == "csv":
        return _csv([list(row.values())], list(row)), 0
    return _json(row), 0


def cmd_smm(args) -> tuple[str, int]:
    from . import moments

    L = _lat(args)
    rep = moments.estimate_second_moment_matrix(L, args.samples, args.seed, args.workers)
    groups = {"b13": moments.b13_groups, "b14": moments.b14_groups}.get(args.pool)
    diag = moments.zamir_feder_diagnostic(rep, groups=groups() if groups else None)
    if args.out == "csv":
        U = rep.U_normalized
        return _csv([[i, j, U[i, j], rep.U_normalized_stderr[i, j]] for i in range(rep.n) for j in range(rep.n)], ["i", "j", "U", "stderr"]), 0
    d = rep.to_dict(diag)
    if "pooled" in diag:
        d["pooled"] = diag["pooled"]
    return _json(d), 0


def cmd_geometry(args) -> tuple[str, int]:
    from .moments import geometry_report

    L = _lat(args)
    g = geometry_report(L, mc_samples=args.samples, seed=args.seed, workers=args.workers).to_dict()
    if args.out == "csv":
        return _csv([list(g.values())], list(g)), 0
    return _json(g), 0


def cmd_facets(args) -> tuple[str, int]:
    from .enumeration import relevant_vectors

    L = _lat(args)
    rv = relevant_vectors(L, workers=args.workers)
    if args.out == "csv":
        return _csv([list(v) for v in rv.vectors], [f"u{i}" for i in range(L.n)]), 0
    return _json({"lattice": L.describe(), "facets": len(rv), "exact": rv.exact, "flagged": len(rv.flagged), "sha256": rv.digest()}), 0


def cmd_kissing(args) -> tuple[str, int]:
    from .enumeration import shortest_vectors

    L = _lat(args)
    sv = shortest_vectors(L)
    row = {"lattice": L.describe(), "min_norm2": sv.min_norm2, "kissing": sv.kissing}
    if args.out == "csv":
        return _csv([list(row.values())], list(row)), 0
    return _json(row), 0


def cmd_phase_check(args) -> tuple[str, int]:
    from .enumeration import default_phase_points, phase_condition_i

    if args.points:
        pts = [_parse_value(p) for p in args.points.split(",")]
    elif args.range:
        pts = default_phase_points(args.range[0], args.range[1], args.count)
    else:
        raise UsageError("give --points or --range")
    rep = phase_condition_i(args.family, pts, args.workers)
    d = rep.to_dict()
    if args.out == "csv":
        return _csv([[p, c, h] for p, c, h in zip(d["points"], d["facets"], d["digests"])], ["point", "facets", "sha256"]), 0
    return _json(d), 0


def _exact_param(text: str | None, family: str, key: str):
    if text is None:
        raise UsageError(f"--{key} is required for {family}")
    if text == "opt":
        from . import exact_nsm

        o = exact_nsm.optimize_g14() if family == "B14" else exact_nsm.optimize_g13()
        return o.a_opt if family == "B14" else getattr(o, key)
    return _parse_value(text)


def cmd_exact_nsm(args) -> tuple[str, int]:
    from . import exact_nsm

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", exact_nsm.PhaseWarning)
        if args.family == "B14":
            a = _exact_param(args.a, "B14", "a")
            G = exact_nsm.g14(a, args.digits)
            params = {"a": str(a) if not hasattr(a, "to_decimal") else a.to_decimal(args.digits)}
        else:
            a2 = _exact_param(args.a2, "B13", "a2")
            a3 = _exact_param(args.a3, "B13", "a3")
            G = (exact_nsm.gA13 if args.phase == "A" else exact_nsm.gB13)(a2, a3, args.digits)
            params = {k: str(v) if not hasattr(v, "to_decimal") else v.to_decimal(args.digits) for k, v in (("a2", a2), ("a3", a3))}
    row = {
        "family": args.family,
        "params": params,
        "G": G.to_decimal(args.digits),
        "error_bound": str(G.err),
        "digits": args.digits,
        "phase_warnings": [str(w.message) for w in caught if issubclass(w.category, exact_nsm.PhaseWarning)],
    }
    if args.out == "csv":
        return _csv([[args.family, json.dumps(params), row["G"], row["error_bound"]]], ["family", "params", "G", "error_bound"]), 0
    return _json(row), 0


def cmd_optimize_exact(args) -> tuple[str, int]:
    from . import exact_nsm

    tol = _parse_value(args.tol) if args.tol else Fraction(1, 10**40)
    o = exact_nsm.optimize_g14(tol, args.digits) if args.family == "B14" else exact_nsm.optimize_g13(tol, args.digits)
    d = o.to_dict(min(args.digits, 40))
    if args.out == "csv":
        return _csv([[k, json.dumps(v)] for k, v in d.items()], ["key", "value"]), 0
    return _json(d), 0


def cmd_descend(args) -> tuple[str, int]:
    from .optimizer import DescentConfig, descend

    L = _lat(args)
    cfg = DescentConfig(args.samples, args.seed, args.eps_rule, args.max_steps, args.variant, args.workers)
    lines = []

    def on_step(rec):
        rec = {k: v for k, v in rec.items() if k != "line_search"} | (
            {"line_search": rec["line_search"]} if "line_search" in rec else {}
        )
        lines.append(json.dumps(rec, sort_keys=True, default=float))

    state = descend(L, cfg, on_step)
    lines.append(json.dumps({"final": True, "verdict": state.verdict, "steps": len(state.history), "lattice": state.lattice.describe()}, sort_keys=True))
    return "\n".join(lines) + "\n", 0


def cmd_verify(args) -> tuple[str, int]:
    from .equivalence import appendix_checks

    if args.what != "appendix-b":
        raise UsageError("only 'verify appendix-b' is available")
    rep = appendix_checks()
    code = 0 if all(rep.values()) else 1
    if args.out == "csv":
        return _csv([[k, "pass" if v else "fail"] for k, v in rep.items()], ["check", "result"]), code
    return _json(rep), code


def cmd_catalog(args) -> tuple[str, int]:
    if args.action == "list":
        rows = [[n, catalog.describe(n)] for n in catalog.names()]
        if args.out == "csv":
            return _csv(rows, ["name", "description"]), 0
        return "".join(f"{n:26s} {d}\n" for n, d in rows), 0
    if not args.name:
        raise UsageError("catalog show needs a name")
    from .latfile import format_lattice_file
    from .lattice import GlueSpec, Lattice

    name, _, rest = args.name.partition(":")
    try:
        obj = catalog.get(name, **{k: _parse_value(v) for k, v in _parse_params([rest]).items()} if rest else {})
    except catalog.CatalogError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(obj, (Lattice, GlueSpec)):
        return format_lattice_file(obj), 0
    return _json(obj), 0


def cmd_reproduce(args) -> tuple[str, int]:
    from .acceptance import run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    lines = []

    def show(res):
        print(res.line(), file=sys.stderr, flush=True)
        lines.append(res)

    results = run_all(quick=args.quick, workers=args.workers, seed=args.seed, only=only, on_result=show)
    table = "".join(r.line() + "\n" for r in results)
    passed = sum(r.passed for r in results)
    table += f"{passed}/{len(results)} criteria pass\n"
    return table, 0 if passed == len(results) else 1


# -- parser -----------------------------------------------------------------------------------


def _family_args(sp) -> None:
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--family", choices=("B14", "B13"))
    g.add_argument("--dim", type=int, choices=(13, 14), help="same as --family B13 / B14")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latquant", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"latquant {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lattice=True, mc=False, out=True):
        if lattice:
            sp.add_argument("--lattice", help="catalog name with optional parameters, e.g. B14:a=25/19 or B14:a=opt")
            sp.add_argument("--file", help="lattice document to parse")
            sp.add_argument("--param", action="append", default=[], help="name=value bindings for --lattice/--file")
        if mc:
            sp.add_argument("--samples", type=int, default=1_000_000)
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        if out:
            sp.add_argument("--out", choices=("json", "csv"), default="json")
        sp.add_argument("--output", help="write the primary output here (and a manifest next to it)")
        sp.add_argument("--run-dir", default=os.getcwd(), help="directory for the a=opt cache")

    sp = sub.add_parser("theta", help="theta image (cumulative shell counts)")
    common(sp)
    sp.add_argument("--rmax", type=float, default=4.23, help="largest squared radius")
    sp.add_argument("--det1", action="store_true", help="radii of the lattice rescaled to unit volume")
    sp.set_defaults(fn=cmd_theta)

    sp = sub.add_parser("nsm", help="Monte Carlo normalized second moment")
    common(sp, mc=True)
    sp.set_defaults(fn=cmd_nsm)

    sp = sub.add_parser("smm", help="Monte Carlo second-moment matrix and isotropy test")
    common(sp, mc=True)
    sp.add_argument("--pool", choices=("none", "b13", "b14"), default="none")
    sp.set_defaults(fn=cmd_smm)

    sp = sub.add_parser("geometry", help="packing, covering and kissing data")
    common(sp, mc=True)
    sp.set_defaults(fn=cmd_geometry, samples=100_000)

    sp = sub.add_parser("facets", help="Voronoi-relevant vectors")
    common(sp)
    sp.set_defaults(fn=cmd_facets)

    sp = sub.add_parser("kissing", help="minimal norm and kissing number")
    common(sp)
    sp.set_defaults(fn=cmd_kissing)

    sp = sub.add_parser("phase-check", help="compare relevant-vector sets across parameter points")
    common(sp, lattice=False)
    sp.add_argument("--family", default="B14")
    sp.add_argument("--points", help="comma-separated parameter values, e.g. 1.30,25/19,1.36")
    sp.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    sp.add_argument("--count", type=int, default=20)
    sp.set_defaults(fn=cmd_phase_check)

    sp = sub.add_parser("exact-nsm", help="closed-form NSM with a rigorous error bound")
    common(sp, lattice=False)
    _family_args(sp)
    sp.add_argument("--a", help="B14 parameter (rational literal or 'opt')")
    sp.add_argument("--a2")
    sp.add_argument("--a3")
    sp.add_argument("--phase", choices=("A", "B"), default="B", help="B13 expression to use")
    sp.add_argument("--digits", type=int, default=40)
    sp.set_defaults(fn=cmd_exact_nsm)

    sp = sub.add_parser("optimize-exact", help="certified minimum of the closed-form NSM")
    common(sp, lattice=False)
    _family_args(sp)
    sp.add_argument("--digits", type=int, default=80)
    sp.add_argument("--tol", help="bracket width, rational literal (default 1/10^40)")
    sp.set_defaults(fn=cmd_optimize_exact)

    sp = sub.add_parser("descend", help="iterative second-moment refinement (JSON lines)")
    common(sp, mc=True, out=False)
    sp.add_argument("--max-steps", type=int, default=5)
    sp.add_argument("--eps-rule", choices=("auto", "closed-form", "line-search"), default="auto")
    sp.add_argument("--variant", choices=("linear", "exponential"), default="linear")
    sp.set_defaults(fn=cmd_descend)

    sp = sub.add_parser("verify", help="check shipped equivalence certificates")
    common(sp, lattice=False)
    sp.add_argument("what", choices=("appendix-b",))
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("catalog", help="list or print catalog entries")
    common(sp, lattice=False)
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("name", nargs="?")
    sp.set_defaults(fn=cmd_catalog)

    sp = sub.add_parser("reproduce-paper", help="run every acceptance check and print a pass/fail table")
    common(sp, lattice=False)
    sp.add_argument("--quick", action="store_true", help="smaller Monte Carlo budgets")
    sp.add_argument("--only", help="comma-separated check numbers")
    sp.add_argument("--seed", type=int, default=20240601)
    sp.set_defaults(fn=cmd_reproduce)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = list(argv) if argv is not None else None
    if getattr(args, "dim", None):
        args.family = f"B{args.dim}"
    started = time.perf_counter()
    try:
        text, code = args.fn(args)
    except UsageError as exc:
        print(f"latquant {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failures
        print(f"latquant {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, text, started)
    return code


def main() -> None:
    sys.exit(run())
