"""Command-line runner: ``flatlab <command> [options]``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage errors.  Reports go to ``--out`` (JSON or CSV) with a one-line
summary on stdout; without ``--out`` the report itself is printed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .characters import verify_gauss
from .exponents import EpsExponent, ExponentPair, check_ledger, conjecture_region, necessary_ok
from .field import FieldError, field_of_order, make_field, parse_modulus
from .normlab import (
    PROBES,
    identity_suite,
    kakeya_lower_bound,
    kakeya_maximal,
    kakeya_ratio,
    kakeya_test_inputs,
    opnorm_lower,
    probe_closed_form,
    probe_ratio,
    probe_ratio_direct,
    subspace_probe_exponent,
)
from .oracle import decay_profile, verify_kernels, verify_sigma_ft
from .report import Report
from .transform import GridFunction, _character_sum, naive_character_sum
from .varieties import make_variety

DEFAULTS = {"seed": 0, "iters": 500, "restarts": 16, "tol": 1e-10}


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# argument parsing helpers
# ----------------------------------------------------------------------


def parse_rational(text: str) -> EpsExponent | float:
    """``A/B``, ``A/B+eps``, ``A/B-eps`` or ``inf``."""
    s = text.strip().lower()
    if s in ("inf", "infinity", "oo"):
        return math.inf
    base, sign, tail = s, "", ""
    for op in ("+", "-"):
        head, found, rest = s.rpartition(op)
        if found and head and rest.strip() == "eps":
            base, sign, tail = head, op, rest
            break
    try:
        value = Fraction(base.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid rational {text!r}; expected A/B, A/B+eps or inf") from None
    out = EpsExponent.const(value)
    if tail:
        out = out + EpsExponent.variable() if sign == "+" else out - EpsExponent.variable()
    return out


def _plain(x):
    """A finite exponent as Fraction, or inf, for the numeric estimators."""
    if isinstance(x, float):
        return x
    if not x.is_constant:
        raise UsageError("numeric estimators need exponents without eps")
    return x.constant()


def _qlist(text: str) -> list[int]:
    try:
        qs = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"invalid q list {text!r}") from None
    if not qs:
        raise UsageError("empty q list")
    return qs


def _field(args):
    try:
        if getattr(args, "modulus", None):
            coeffs = parse_modulus(args.modulus)
            ell = len(coeffs) - 1
            p = round(args.q ** (1 / ell))
            if p**ell != args.q:
                raise UsageError(f"q={args.q} is not p^{ell} for the given modulus")
            return make_field(p, ell, tuple(coeffs))
        return field_of_order(args.q)
    except FieldError as exc:
        raise UsageError(f"q={args.q}: {exc}") from None


def _config(args) -> dict:
    # execution knobs that cannot change results stay out of the report
    skip = {"func", "out", "timing", "jobs"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        if isinstance(v, (EpsExponent, Fraction)) or (isinstance(v, float) and math.isinf(v)):
            v = str(v)
        cfg[k] = v
    return cfg


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def cmd_verify_oracle(args) -> Report:
    return verify_sigma_ft(_field(args), args.d)


def cmd_verify_gauss(args) -> Report:
    qs = _qlist(args.qs)
    try:
        return verify_gauss(qs, args.square_max)
    except FieldError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify_kernels(args) -> Report:
    return verify_kernels(_field(args), args.d)


def cmd_verify_transform(args) -> Report:
    F = _field(args)
    n = args.n if args.n is not None else 2 * args.d
    rng = np.random.default_rng(args.seed)
    shape = (F.q,) * n
    r = Report("verify transform")
    params = dict(q=F.q, p=F.p, ell=F.ell, d=n // 2)
    naive_ok = 0
    for _ in range(args.naive_trials):
        vals = rng.integers(-3, 4, size=shape)
        g = GridFunction.from_array(F, n, vals, backend="exact")
        fast = _character_sum(g.values, F, -1)
        slow = naive_character_sum(g.values, F, n, -1)
        naive_ok += bool(np.all(fast.equal(slow)))
    r.add("fast_equals_naive", naive_ok, args.naive_trials, naive_ok == args.naive_trials, **params)
    sub = identity_suite(F, n // 2, trials=args.trials, backend=args.backend, seed=args.seed,
                         only=("plancherel", "inversion", "convolution"))
    r.extend(sub)
    return r


def cmd_verify_identities(args) -> Report:
    F = _field(args)
    rep = identity_suite(F, args.d, trials=args.trials, backend=args.backend, seed=args.seed)
    return rep


def cmd_norms_extension(args) -> Report:
    F = _field(args)
    V = make_variety("flat_disk" if args.variety == "flat" else "paraboloid", F, args.d)
    r_exp = _plain(args.r)
    try:
        est = opnorm_lower(V, r_exp, restarts=args.restarts, iters=args.iters, tol=args.tol,
                           seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = Report("norms extension")
    params = dict(q=F.q, p=F.p, ell=F.ell, d=args.d)
    again = est.reevaluate()
    rep.add("lower_bound", est.best, ">= 1 - 1e-9", est.best >= 1 - 1e-9, **params)
    rep.add("monotone_iterations", est.monotone, True, est.monotone, **params)
    rep.add("witness_reproduces", again, est.best,
            abs(again - est.best) <= 1e-10 * max(1.0, est.best), **params)
    rep.data["estimate"] = est.to_json()
    rep.data["trace"] = est.trace
    return rep


def _probe_grid(d: int):
    n = 2 * d
    sharp_r = Fraction(2 * n + 4, n - 2)
    ps = (Fraction(3, 2), Fraction(2), Fraction(3))
    rs = (sharp_r, sharp_r + 2, sharp_r + 4)
    return [(p, r) for p in ps for r in rs], sharp_r


def cmd_norms_probes(args) -> Report:
    F = _field(args)
    d = args.d
    rep = Report("norms probes")
    params = dict(q=F.q, p=F.p, ell=F.ell, d=d)
    grid, sharp_r = _probe_grid(d)
    rows = []
    for p, r in grid:
        for probe in PROBES:
            fast = probe_ratio(probe, p, r, F, d)
            support = {"constant": F.q ** (2 * d - 2), "subspace_H": F.q ** (d - 1), "delta": 1}[probe]
            slow = (probe_ratio_direct(probe, p, r, F, d)
                    if support * F.q ** (2 * d) <= args.direct_limit else None)
            closed = probe_closed_form(probe, p, r, F.q, d)
            ok = abs(fast - closed) <= 1e-12 * max(1.0, closed)
            if slow is not None:
                ok = ok and abs(fast - slow) <= 1e-12 * max(1.0, slow)
            rows.append({"probe": probe, "p": str(p), "r": str(r), "ratio": fast,
                         "closed_form": closed, "independent": slow})
            rep.add(f"{probe}[p={p},r={r}]", fast, closed, ok, **params)
    expo = subspace_probe_exponent(2, sharp_r, d)
    ratio = probe_ratio("subspace_H", 2, sharp_r, F, d)
    rep.add("sharp_pair_exponent", expo, 0, expo == 0, **params)
    rep.add("sharp_pair_ratio", ratio, 1, abs(ratio - 1) <= 1e-12, **params)
    rep.data["probes"] = rows
    return rep


def cmd_kakeya(args) -> Report:
    F = _field(args)
    d = args.d
    p, r = _plain(args.p), _plain(args.r)
    rep = Report("kakeya")
    params = dict(q=F.q, p=F.p, ell=F.ell, d=d)
    inputs = kakeya_test_inputs(F, d, args.seed)
    q = F.q
    star = {k: kakeya_maximal(h).values.real for k, h in inputs.items()}
    rep.add("point_mass_star_is_1", bool(np.all(star["point_mass"] == 1)), True,
            bool(np.all(star["point_mass"] == 1)), **params)
    rep.add("constant_star_is_q", bool(np.all(star["constant"] == q)), True,
            bool(np.all(star["constant"] == q)), **params)
    line = star["single_line"].reshape(-1)
    ok = line[1 % line.size] == q and np.sum(line == q) == 1 and np.all((line == 1) | (line == q))
    rep.add("single_line_star", bool(ok), True, bool(ok), **params)
    ratios = {k: kakeya_ratio(h, p, r) for k, h in inputs.items()}
    for k, v in ratios.items():
        rep.add(f"ratio[{k}]", v, f"<= {args.bound}", v <= args.bound, **params)
    rep.data["ratios"] = ratios
    return rep


def cmd_exponents_derive(args) -> Report:
    return check_ledger()


def cmd_exponents_check(args) -> Report:
    pair = ExponentPair.from_pr(args.p, args.r)
    rep = Report("exponents check")
    nec = necessary_ok(pair, args.n)
    region = conjecture_region(pair, args.n)
    rep.data.update(necessary_ok=nec, conjecture_region=region, pair=str(pair))
    rep.add("necessary_ok", nec, True, nec, d=args.n // 2)
    rep.add("conjecture_region", region, "inside|boundary", region != "outside", d=args.n // 2)
    return rep


def _sweep_one(task):
    quantity, q, d, r_exp, p_exp, variety, restarts, iters, tol, seed = task
    F = field_of_order(q)
    if quantity == "opnorm":
        V = make_variety(variety, F, d)
        est = opnorm_lower(V, r_exp, restarts=restarts, iters=iters, tol=tol, seed=seed)
        return {"value": est.best, "monotone": est.monotone, "status": est.status,
                "reevaluated": est.reevaluate(), "p": F.p, "ell": F.ell}
    if quantity == "decay":
        rep = decay_profile(F, d)
        chk = rep.checks[0]
        return {"value": chk.measured, "expected": chk.expected, "pass": rep.passed,
                "p": F.p, "ell": F.ell}
    if quantity == "kakeya":
        val, name = kakeya_lower_bound(F, d, p_exp, r_exp, seed)
        return {"value": val, "input": name, "p": F.p, "ell": F.ell}
    raise ValueError(quantity)


def cmd_sweep(args) -> Report:
    qs = _qlist(args.qs)
    for q in qs:
        try:
            field_of_order(q)
        except FieldError as exc:
            raise UsageError(f"q={q}: {exc}") from None
    r_exp = _plain(args.r) if args.r is not None else Fraction(6)
    p_exp = _plain(args.p) if args.p is not None else Fraction(2)
    variety = "flat_disk" if args.variety == "flat" else "paraboloid"
    tasks = [(args.quantity, q, args.d, r_exp, p_exp, variety, args.restarts, args.iters,
              args.tol, args.seed) for q in qs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]
    rep = Report("sweep")
    values = []
    for q, res in zip(qs, results):
        params = dict(q=q, p=res["p"], ell=res["ell"], d=args.d)
        if args.quantity == "opnorm":
            ok = res["value"] >= 1 - 1e-9 and res["monotone"]
            rep.add("opnorm_lower", res["value"], ">= 1 - 1e-9", ok, **params)
            values.append(res["value"])
        elif args.quantity == "decay":
            rep.add("max_abs2_nonzero", res["value"], res["expected"], res["pass"], **params)
            values.append(float(res["value"]) * q ** (args.d - 1))
        else:
            rep.add("kakeya_ratio", res["value"], f"<= {args.bound}", res["value"] <= args.bound,
                    **params)
            values.append(res["value"])
    spread = max(values) / min(values) if min(values) > 0 else math.inf
    bound = args.bound if args.quantity != "decay" else 1.0
    rep.add("max_over_min", spread, f"<= {bound}", spread <= bound + 1e-12)
    rep.data["results"] = [{"q": q, **res} for q, res in zip(qs, results)]
    return rep


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, field: bool = True, d: int | None = 2):
    if field:
        p.add_argument("--q", type=int, default=3, help="field order (odd prime power)")
        p.add_argument("--modulus", help='irreducible modulus, constant term first, e.g. "1,0,1"')
    if d is not None:
        p.add_argument("--d", type=int, default=d)
    p.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here; stdout then gets a summary")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")


def _rational(text: str):
    try:
        return parse_rational(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    verify = sub.add_parser("verify", help="exact verification suites")
    vsub = verify.add_subparsers(dest="what", parser_class=_Parser)
    vsub.required = True
    p = vsub.add_parser("oracle", help="closed-form (dsigma)^v against brute force")
    _common(p)
    p.set_defaults(func=cmd_verify_oracle)
    p = vsub.add_parser("gauss", help="Gauss sums and the complete-the-square identity")
    _common(p, field=False, d=None)
    p.add_argument("--qs", default="3,5,7,9,11,13,25,27,49")
    p.add_argument("--square-max", type=int, default=27)
    p.set_defaults(func=cmd_verify_gauss)
    p = vsub.add_parser("kernels", help="kernel bounds and transform identities")
    _common(p)
    p.set_defaults(func=cmd_verify_kernels)
    p = vsub.add_parser("transform", help="fast path against the naive sum, Plancherel, inversion, convolution")
    _common(p)
    p.add_argument("--n", type=int, help="ambient dimension (default 2d)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--naive-trials", type=int, default=3)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.set_defaults(func=cmd_verify_transform)
    p = vsub.add_parser("identities", help="randomized identity suite including adjointness and RR*")
    _common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.set_defaults(func=cmd_verify_identities)

    norms = sub.add_parser("norms", help="operator-norm experiments")
    nsub = norms.add_subparsers(dest="what", parser_class=_Parser)
    nsub.required = True
    p = nsub.add_parser("extension", help="lower bound for R*(2 -> r)")
    _common(p)
    p.add_argument("--variety", choices=("flat", "parab"), default="flat")
    p.add_argument("--r", type=_rational, default=Fraction(6))
    p.add_argument("--restarts", type=int, default=DEFAULTS["restarts"])
    p.add_argument("--iters", type=int, default=DEFAULTS["iters"])
    p.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    p.set_defaults(func=cmd_norms_extension)
    p = nsub.add_parser("probes", help="structured probe ratios against their closed forms")
    _common(p)
    p.add_argument("--direct-limit", type=int, default=10**8,
                   help="largest |supp f| * q^n evaluated by the direct character sum")
    p.set_defaults(func=cmd_norms_probes)

    p = sub.add_parser("kakeya", help="Kakeya maximal function examples and ratios")
    _common(p)
    p.add_argument("--p", type=_rational, default=None)
    p.add_argument("--r", type=_rational, default=None)
    p.add_argument("--bound", type=float, default=2.0)
    p.set_defaults(func=cmd_kakeya)

    expo = sub.add_parser("exponents", help="exact exponent calculus")
    esub = expo.add_subparsers(dest="what", parser_class=_Parser)
    esub.required = True
    p = esub.add_parser("derive", help="replay the flat-disk ledger")
    _common(p, field=False, d=None)
    p.set_defaults(func=cmd_exponents_derive)
    p = esub.add_parser("check", help="necessary conditions and conjectured region for one pair")
    _common(p, field=False, d=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--r", type=_rational, required=True)
    p.set_defaults(func=cmd_exponents_check)

    p = sub.add_parser("sweep", help="one measured quantity across several q")
    _common(p, field=False)
    p.add_argument("quantity", choices=("opnorm", "decay", "kakeya"))
    p.add_argument("--qs", default="3,5,7")
    p.add_argument("--variety", choices=("flat", "parab"), default="flat")
    p.add_argument("--p", type=_rational, default=None)
    p.add_argument("--r", type=_rational, default=None)
    p.add_argument("--restarts", type=int, default=DEFAULTS["restarts"])
    p.add_argument("--iters", type=int, default=DEFAULTS["iters"])
    p.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    p.add_argument("--bound", type=float, default=2.0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (results stay ordered by q)")
    p.set_defaults(func=cmd_sweep)
    return parser


LEDGER_COLUMNS = ("key", "variety", "d_constraint", "hypotheses", "p", "r", "eps", "provenance")


def _ledger_csv(report: Report) -> str:
    """One row per estimate; list-valued cells are joined with '; '."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=LEDGER_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in report.data["ledger"]:
        w.writerow({k: "; ".join(v) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


def run(argv: list[str]) -> tuple[int, Report | None, str, str | None]:
    """Parse and execute; returns (exit status, report, serialized report, output path)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "kakeya" or (args.command == "sweep" and args.quantity == "kakeya"):
            if args.p is None:
                args.p = EpsExponent.const(args.d)
            if args.r is None:
                args.r = EpsExponent.const(args.d)
        start = time.perf_counter()
        report = args.func(args)
        report.wall_time = time.perf_counter() - start
    except UsageError as exc:
        print(f"flatlab: error: {exc}", file=sys.stderr)
        return 2, None, "", None
    report.config = {**_config(args), **report.config}
    if args.format == "csv":
        text = _ledger_csv(report) if "ledger" in report.data else report.to_csv()
    else:
        text = report.to_json(args.timing) + "\n"
    return (0 if report.passed else 1), report, text, args.out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        status, report, text, out = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if report is None:
        return status
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(report.summary())
    else:
        sys.stdout.write(text)
        print(report.summary(), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
