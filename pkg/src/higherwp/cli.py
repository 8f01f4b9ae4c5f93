"""Command-line interface.

Commands: ``coeffs``, ``tau``, ``intersect``, ``volume``, ``verify``.  Only
``tau`` writes to the cache; ``intersect`` and ``volume`` read from it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .cache import CACHE_ENV, TauCache
from .cutjoin import coeff_A, coeff_A_diagonal, coeff_C
from .polyring import GradedPoly, monomial_exponents
from .recursion import (InsufficientLevels, IntersectionQuery, compute_tau, free_energy,
                        intersection_number, required_level, verify_dual, verify_translation,
                        verify_virasoro)
from .volumes import (check_f0_closed_form, check_f1_closed_form, verify_closed_forms, volume_level,
                      volume_polynomial)

JSON_SCHEMA = "higherwp/1"


class UsageError(Exception):
    pass


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _index_list(text: str | None, name: str, minimum: int) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated integers, got {text!r}") from None
    if any(v < minimum for v in vals):
        raise UsageError(f"--{name} entries must be >= {minimum}")
    return vals


def _poly_json(p: GradedPoly) -> dict:
    terms = []
    for m, c in p.items():
        t, s = monomial_exponents(m)
        mono = {f"t{k}": e for k, e in t}
        mono.update({f"s{j}": e for j, e in s})
        terms.append({"monomial": mono, "coeff": _fmt(c)})
    return {"text": p.to_text(), "terms": terms}


def _emit(out, fmt: str, payload: dict, rows: list[tuple], header: tuple, text_lines: list[str]) -> None:
    if fmt == "json":
        out.write(json.dumps({"schema": JSON_SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write("\n".join(text_lines) + "\n")


def _positive(name: str, value: int | None, allow_zero: bool = False) -> None:
    if value is None:
        return
    if value < 0 or (value == 0 and not allow_zero):
        raise UsageError(f"--{name} must be {'non-negative' if allow_zero else 'positive'}")


# ---------------------------------------------------------------------------

def cmd_coeffs(args, out) -> int:
    """A_m, A_{k,m} (k < m) and C_k with s-weight up to ``--order``."""
    N = args.order
    _positive("order", N)
    a = args.alpha
    Z = 4 * N + 4 * a + 12
    rows = []
    for m in range(N + 1):
        rows.append((f"A_{m}", coeff_A_diagonal(a, m, Z_max=Z, s_cap=N)))
    for m in range(1, N + 1):
        for k in range(m):
            rows.append((f"A_{k},{m}", coeff_A(a, k, m, Z_max=Z, s_cap=N)))
    for k in range(-a - 1, N - a):
        rows.append((f"C_{k}", coeff_C(a, k, Z_max=Z, s_cap=N)))
    payload = {"command": "coeffs", "alpha": a, "order": N,
               "coefficients": [{"name": n, **_poly_json(p)} for n, p in rows]}
    _emit(out, args.format, payload, [(n, p.to_text()) for n, p in rows], ("name", "value"),
          [f"{n} = {p.to_text()}" for n, p in rows])
    return 0


def cmd_tau(args, out) -> int:
    P, D = args.max_level, args.s_degree
    _positive("max-level", P, allow_zero=True)
    _positive("s-degree", D, allow_zero=True)
    cache = TauCache(args.cache)
    levels = compute_tau(args.alpha, P, D, cache=cache)
    F = free_energy(levels)
    payload = {"command": "tau", "alpha": args.alpha, "max_level": P, "s_degree": D,
               "levels": [{"level": lv.level, "tau": _poly_json(lv.value), "free_energy": _poly_json(f)}
                          for lv, f in zip(levels, F)]}
    rows = [(lv.level, lv.value.to_text(), f.to_text()) for lv, f in zip(levels, F)]
    lines = []
    for lv, f in zip(levels, F):
        lines.append(f"tau[{lv.level}] = {lv.value.to_text()}")
        lines.append(f"F[{lv.level}] = {f.to_text()}")
    _emit(out, args.format, payload, rows, ("level", "tau", "free_energy"), lines)
    return 0


def _cached_F(alpha: int, level: int, s_need: int, cache_dir):
    cache = TauCache(cache_dir)
    levels = cache.load(alpha, level, s_need)
    if levels is None:
        have = cache.available(alpha)
        best_level = max((top for cap, top in have if cap is None or cap >= s_need), default=-1)
        raise InsufficientLevels(level, s_need, best_level, s_need if best_level >= 0 else 0)
    return free_energy(levels)


def cmd_intersect(args, out) -> int:
    psi = _index_list(args.psi, "psi", 0)
    kappa = _index_list(args.kappa, "kappa", 1)
    if not psi and not kappa:
        raise UsageError("give at least one of --psi / --kappa")
    q = IntersectionQuery(args.alpha, psi, kappa)
    level, s_need = required_level(q)
    F = _cached_F(args.alpha, level, s_need, args.cache) if level is not None else None
    res = intersection_number(q, F, s_degree_cap=s_need) if F is not None else intersection_number(q, [])
    payload = {"command": "intersect", "alpha": args.alpha, "psi": list(psi), "kappa": list(kappa),
               "value": _fmt(res.value), "genus": _fmt(res.genus), "level": res.level,
               "status": res.status, "dimension": res.dimension}
    _emit(out, args.format, payload,
          [(_fmt(res.value), _fmt(res.genus), res.level if res.level is not None else "", res.status)],
          ("value", "genus", "level", "status"),
          [f"value = {_fmt(res.value)}", f"genus = {_fmt(res.genus)}", f"dimension: {res.dimension}"])
    return 0


def cmd_volume(args, out) -> int:
    g, n = args.genus, args.npoints
    if g is None or n is None:
        raise UsageError("volume needs --genus and --npoints")
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise UsageError(f"(g, n) = ({g}, {n}) must satisfy n >= 1 and 2g - 2 + n > 0")
    level, s_need = volume_level(args.alpha, g, n)
    F = _cached_F(args.alpha, level, s_need, args.cache)
    V = volume_polynomial(args.alpha, g, n, F, s_degree_cap=s_need)
    payload = {"command": "volume", **V.to_json()}
    rows = [(*term["exponents"], term["coeff"]) for term in V.to_json()["terms"]]
    _emit(out, args.format, payload, rows, tuple(V.to_json()["variables"]) + ("coeff",),
          [f"V[{args.alpha}]_{{{g},{n}}} = {V.to_text()}"])
    return 0


def cmd_verify(args, out) -> int:
    suite = args.suite
    P, D = args.max_level, args.s_degree
    if suite == "virasoro":
        _positive("max-level", P)
        reps = [verify_virasoro(args.alpha, P)]
    elif suite == "translation":
        _positive("max-level", P, allow_zero=True)
        _positive("s-degree", D, allow_zero=True)
        reps = [verify_translation(args.alpha, P, 1 if D is None else D)]
    elif suite == "dual":
        _positive("max-level", P, allow_zero=True)
        reps = [verify_dual(args.alpha, P, D)]
    else:
        reps = [verify_closed_forms(args.max_m), check_f0_closed_form(), check_f1_closed_form()]
    passed = all(r.passed for r in reps)
    payload = {"command": "verify", "suite": suite, "passed": passed, "reports": [r.to_json() for r in reps]}
    rows = [(r.suite, r.alpha, "pass" if r.passed else "fail", r.checked,
             json.dumps(r.failure, sort_keys=True) if r.failure else "") for r in reps]
    lines = []
    for r in reps:
        line = f"{r.suite}: {'PASS' if r.passed else 'FAIL'} ({r.checked} identities checked)"
        if r.failure:
            line += f"; first failure {json.dumps(r.failure, sort_keys=True)}"
        lines.append(line)
    _emit(out, args.format, payload, rows, ("suite", "alpha", "result", "checked", "failure"), lines)
    return 0 if passed else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=int, choices=(0, 1), default=1)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--cache", default=None,
                        help=f"cache directory (default: ${CACHE_ENV} or ~/.cache/higherwp)")

    parser = argparse.ArgumentParser(prog="higherwp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="print cut-and-join coefficient tables")
    p.add_argument("--order", type=int, default=3, help="largest s-weight of the printed coefficients")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("tau", parents=[common], help="compute tau levels and write them to the cache")
    p.add_argument("--max-level", type=int, default=4)
    p.add_argument("--s-degree", type=int, default=0)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("intersect", parents=[common], help="one intersection number from the cache")
    p.add_argument("--psi", help="psi exponents a1,a2,...")
    p.add_argument("--kappa", help="kappa indices b1,b2,... (each >= 1)")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("volume", parents=[common], help="volume polynomial from the cache")
    p.add_argument("--genus", type=int)
    p.add_argument("--npoints", type=int)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=("virasoro", "translation", "dual", "closedform"), required=True)
    p.add_argument("--max-level", type=int, default=4)
    p.add_argument("--s-degree", type=int, default=None)
    p.add_argument("--max-m", type=int, default=6, help="largest index for the closedform suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, InsufficientLevels) as exc:
        print(f"higherwp {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
