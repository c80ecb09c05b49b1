"""Command-line front end.

    solitonsurf tower    --seed SEED.json [--out FILE]
    solitonsurf verify   --seed SEED.json [--format json|table] [--timings]
    solitonsurf spectrum --n N [--format table|csv|svg|json] [--out FILE]
    solitonsurf numeric  --seed SEED.json [--grid-center RE,IM] [--grid-width W]
                         [--samples M] [--fd-step H]

Exit codes: 0 success, 1 input error, 2 mathematical degeneracy,
3 violated invariant or internal failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .errors import DimensionTooSmall, ParseError, SolitonSurfError
from .exact import BiPoly, MatRF, parse_gaussian
from .numeric import GridSpec, action_convergence, multiplicities, random_points, \
    residual_record, residual_study, surface_spectrum
from .sigma import (
    Holomorphy,
    HoloSeed,
    ProjectorTower,
    build_tower,
    completeness_holds,
    holomorphy_class,
    is_projector,
    orthogonality_holds,
    verify_conservation,
    verify_el,
)
from .spectrum import build_S, figure_data, format_table
from .surfaces import (
    build_surfaces,
    chi_minus,
    chi_plus,
    invert_linear,
    invert_quadratic,
    is_antihermitian,
    is_traceless,
    minimal_poly_check,
    surfaces_commute,
    verify_dXdX,
    verify_eigen_assignment,
    verify_el_surface,
    verify_spin_sum,
    verify_tangent,
)


# -- serialization ----------------------------------------------------------------

def dumps(obj) -> str:
    """JSON with every float printed to 17 significant digits."""
    return _encode(obj, 0) + "\n"


def _encode(obj, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        text = format(x, ".17g")
        return text if any(ch in text for ch in ".e") else text + ".0"
    if isinstance(obj, (str, Fraction)):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_encode(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, depth + 1) for v in obj) + "]"
        items = [inner + _encode(v, depth + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def poly_table(p: BiPoly) -> list[list]:
    """Coefficient table ``[[deg_xi, deg_xibar, "coefficient"], ...]``."""
    return [[a, b, str(c)] for (a, b), c in p.terms.items()]


def mat_table(M: MatRF) -> dict:
    return {"den": poly_table(M.den), "nums": [[poly_table(e) for e in row] for row in M.nums]}


def load_seed(path: str) -> HoloSeed:
    """Read ``{"n": N, "components": [["1"], ["0", "1"], ...]}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read seed file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"seed file is not valid JSON: {exc}") from None
    return seed_from_json(data)


def seed_from_json(data) -> HoloSeed:
    if not isinstance(data, dict) or "n" not in data or "components" not in data:
        raise ParseError('seed must be an object with keys "n" and "components"')
    n, comps = data["n"], data["components"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("n must be an integer")
    if n < 2:
        raise DimensionTooSmall(f"n must be at least 2, got {n}")
    if not isinstance(comps, list) or len(comps) != n:
        raise ParseError(f"components must be a list of length n={n}")
    rows = []
    for comp in comps:
        if not isinstance(comp, list):
            raise ParseError("each component must be a list of coefficient strings")
        row = []
        for c in comp:
            if not isinstance(c, str):
                raise ParseError(f"coefficient {c!r} must be a string literal")
            row.append(parse_gaussian(c))
        rows.append(row)
    return HoloSeed.from_coefficients(rows).validate()


def seed_echo(seed: HoloSeed) -> dict:
    return {"n": seed.n, "components": [str(c) for c in seed.components]}


# -- exact verification catalogue ------------------------------------------------------

def _expected_holomorphy(k: int, n: int) -> Holomorphy:
    if k == 0:
        return Holomorphy.HOLOMORPHIC
    if k == n - 1:
        return Holomorphy.ANTIHOLOMORPHIC
    return Holomorphy.MIXED


def exact_catalogue(tower: ProjectorTower) -> list[tuple[str, Callable[[], bool]]]:
    """Every exact check, each named once."""
    n = tower.n
    S = build_surfaces(tower)
    checks: list[tuple[str, Callable[[], bool]]] = []
    for k, P in enumerate(tower):
        checks += [
            (f"projector[{k}]", lambda P=P: is_projector(P)),
            (f"euler_lagrange[{k}]", lambda P=P: verify_el(P)),
            (f"conservation[{k}]", lambda P=P: verify_conservation(P)),
            (f"holomorphy[{k}]",
             lambda P=P, k=k: holomorphy_class(P) is _expected_holomorphy(k, n)),
        ]
    checks += [
        ("orthogonality", lambda: orthogonality_holds(tower)),
        ("completeness", lambda: completeness_holds(tower)),
    ]
    for k, (X, P) in enumerate(zip(S, tower)):
        checks += [
            (f"surface_algebra[{k}]", lambda X=X: is_antihermitian(X) and is_traceless(X)),
            (f"tangent[{k}]", lambda X=X, P=P: verify_tangent(X, P)),
            (f"dXdX[{k}]", lambda X=X, P=P: verify_dXdX(X, P)),
            (f"surface_euler_lagrange[{k}]", lambda X=X: verify_el_surface(X)),
            (f"minimal_polynomial[{k}]", lambda X=X, k=k: minimal_poly_check(X, k, n)),
            (f"inversion_linear[{k}]",
             lambda P=P, k=k: invert_linear(S.surfaces, k, n) == P),
            (f"inversion_quadratic[{k}]",
             lambda X=X, P=P, k=k: invert_quadratic(X, k, n) == P),
        ]
        if k < n - 1:
            checks.append((f"chi_plus[{k}]",
                           lambda X=X, P=P, k=k: chi_plus(X, P, n) == S[k + 1]))
        if k > 0:
            checks.append((f"chi_minus[{k}]",
                           lambda X=X, P=P, k=k: chi_minus(X, P, n) == S[k - 1]))
    checks += [
        ("cartan_commute", lambda: surfaces_commute(S.surfaces)),
        ("spin_sum", lambda: verify_spin_sum(S, tower)),
        ("eigen_assignment", lambda: verify_eigen_assignment(S, tower)),
    ]
    return checks


def verify_report(seed: HoloSeed, *, timings: bool = False) -> dict:
    t0 = time.perf_counter()
    tower = build_tower(seed)
    t_build = time.perf_counter() - t0
    results = []
    for name, fn in exact_catalogue(tower):
        t1 = time.perf_counter()
        try:
            ok, detail = bool(fn()), ""
        except SolitonSurfError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        entry = {"name": name, "kind": "exact", "passed": ok, "detail": detail}
        if timings:
            entry["seconds"] = time.perf_counter() - t1
        results.append(entry)
    report = {"seed": seed_echo(seed), "checks": results,
              "passed": all(r["passed"] for r in results)}
    if timings:
        report["timings"] = {"build_tower": t_build, "total": time.perf_counter() - t0}
    return report


# -- numeric report -----------------------------------------------------------------

def numeric_report(seed: HoloSeed, grid: GridSpec, *, eigen_points: int = 5,
                   resolutions=(64, 128, 256)) -> dict:
    tower = build_tower(seed)
    n = tower.n
    h = grid.h
    study = residual_study(tower, grid, (2 * h, h, h / 2))
    levels = [{
        "h": L.h,
        "residuals": L.residuals,
        "expanded_covariant_gap": max(L.first_gap, L.second_gap),
        "nu_gap": L.nu_gap,
        "unitarity_drift": L.unitarity_drift,
        "points_used": L.points_used,
        "points_skipped": L.points_skipped,
    } for L in study.levels]
    ratios_ok = all(0.15 <= r <= 0.45 for rs in study.ratios.values() for r in rs)

    surfaces = build_surfaces(tower)
    es = build_S(n)
    eigen = []
    for k, X in enumerate(surfaces):
        exact = es.spectrum_of(k)
        worst, counts_ok = 0.0, True
        for p in random_points(eigen_points, seed=k):
            w = surface_spectrum(X, p)
            expected = sorted(v for v, m in exact.items() for _ in range(m))
            worst = max(worst, float(np.max(np.abs(w - np.array([float(v) for v in expected])))))
            counts_ok &= multiplicities(w, exact) == exact
        eigen.append({"k": k, "exact": {str(v): m for v, m in sorted(exact.items())},
                      "max_deviation": worst, "multiplicities_match": counts_ok})

    action = []
    for k, P in enumerate(tower):
        conv = action_convergence(P, resolutions)
        conv["k"] = k
        action.append(conv)

    return {
        "seed": seed_echo(seed),
        "grid": {"center": [grid.center.real, grid.center.imag],
                 "half_width": grid.half_width, "samples_per_axis": grid.samples_per_axis,
                 "fd_steps": [L.h for L in study.levels]},
        "diagonalization_error": study.diagonalization_error,
        "residual_study": {"levels": levels, "ratios": study.ratios,
                           "ratios_in_range": ratios_ok},
        "center_record": residual_record(tower, grid, grid.center),
        "eigenvalues": eigen,
        "action": action,
    }


# -- argument handling ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _complex_pair(text: str) -> complex:
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="solitonsurf", description="Soliton surfaces of the CP^(N-1) sigma model.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tower", help="build the projector tower and serialize it")
    t.add_argument("--seed", required=True)
    t.add_argument("--out")

    v = sub.add_parser("verify", help="run every exact identity on the tower")
    v.add_argument("--seed", required=True)
    v.add_argument("--out")
    v.add_argument("--format", choices=("json", "table"), default="json")
    v.add_argument("--timings", action="store_true", help="include wall-clock timings")

    s = sub.add_parser("spectrum", help="eigenvalue set S(N) with ghosts")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--format", choices=("table", "csv", "svg", "json"), default="table")
    s.add_argument("--out")

    m = sub.add_parser("numeric", help="finite-difference and quadrature study")
    m.add_argument("--seed", required=True)
    m.add_argument("--out")
    m.add_argument("--grid-center", type=_complex_pair, default=complex(0.3, 0.2))
    m.add_argument("--grid-width", type=float, default=1.0, help="half-width of the grid")
    m.add_argument("--samples", type=int, default=41, help="grid points per axis")
    m.add_argument("--fd-step", type=float, default=1e-3,
                   help="middle finite-difference step; the study uses 2h, h, h/2")
    return p


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_tower(args) -> int:
    seed = load_seed(args.seed)
    tower = build_tower(seed)
    doc = {"seed": seed_echo(seed), "n": tower.n,
           "projectors": [mat_table(P) for P in tower]}
    _emit(dumps(doc), args.out)
    return 0


def _verify_table(report: dict) -> str:
    width = max(len(c["name"]) for c in report["checks"])
    lines = [f"seed: {', '.join(report['seed']['components'])}"]
    for c in report["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        lines.append(f"{c['name']:<{width}}  {c['kind']:<5}  {mark}  {c['detail']}".rstrip())
    lines.append("all passed" if report["passed"] else "FAILURES present")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    report = verify_report(load_seed(args.seed), timings=args.timings)
    text = dumps(report) if args.format == "json" else _verify_table(report)
    _emit(text, args.out)
    return 0 if report["passed"] else 3


def cmd_spectrum(args) -> int:
    if args.n < 2:
        raise DimensionTooSmall(f"n must be at least 2, got {args.n}")
    if args.format == "table":
        text = format_table(args.n)
    elif args.format == "csv":
        text = figure_data(args.n).to_csv()
    elif args.format == "svg":
        text = figure_data(args.n).to_svg()
    else:
        es = build_S(args.n)
        text = dumps({
            "n": args.n,
            "members": [{"value": m.value, "klass": m.klass.value, "k": m.k_origin,
                         "ghost": m.ghost} for m in es.members],
            "distinct": sorted(es.S),
        })
    _emit(text, args.out)
    return 0


def cmd_numeric(args) -> int:
    seed = load_seed(args.seed)
    if args.samples < 3 or args.grid_width <= 0 or args.fd_step <= 0:
        raise ParseError("need --samples >= 3 and positive --grid-width, --fd-step")
    grid = GridSpec(args.grid_center, args.grid_width, args.samples, args.fd_step)
    report = numeric_report(seed, grid)
    _emit(dumps(report), args.out)
    return 0


COMMANDS = {"tower": cmd_tower, "verify": cmd_verify,
            "spectrum": cmd_spectrum, "numeric": cmd_numeric}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SolitonSurfError as exc:
        print(f"solitonsurf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # invariant breach we did not anticipate
        print(f"solitonsurf: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
