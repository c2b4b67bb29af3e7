"""Command-line front end.

Exit codes: 0 success, 2 bad parameters, 3 uncertified result under
--require-certificate, 4 two value paths disagree.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

from loccg import serialize
from loccg.classical import (
    DeterministicStrategy,
    brute_force_value,
    closed_form_value,
    is_dyadic,
    protocol2_strategy,
    strategy_value,
)
from loccg.errors import CapacityError, ConsistencyError, DomainError, LoccgError
from loccg.experiments import grid, majority_scaling, sweep_nk, table3
from loccg.games import Grouping, ThresholdGame, alpha
from loccg.numerics import PSD_TOL, format_rational, over_power_of_two, parse_rational
from loccg.quantum import (
    GAP_TOL,
    SolverConfig,
    dual_and_closed_form,
    dual_biased_chsh_closed_form,
    dual_majority_conjecture,
    evaluate_protocol,
    k1_biased_game,
    protocol1,
    quantum_value,
    vq_threshold_formula,
)
from loccg.reduction import merge_duplicate_inputs, ns_box_value, reduce

EXIT_OK, EXIT_DOMAIN, EXIT_UNCERTIFIED, EXIT_MISMATCH = 0, 2, 3, 4

CLASSICAL_METHODS = ("formula", "bruteforce", "protocol")
QUANTUM_METHODS = ("formula", "protocol", "sdp")


def threshold_game(n: int, t: str | None, t_abs: str | None) -> ThresholdGame:
    """--t is a fraction of n; a value above 1 is read as an absolute threshold."""
    if t_abs is not None:
        return ThresholdGame.from_threshold(n, t_abs)
    q = parse_rational(t)
    if q > 1:
        return ThresholdGame.from_threshold(n, q)
    if q <= 0:
        raise DomainError(f"threshold fraction must be positive, got {t}")
    return ThresholdGame.from_fraction(n, q)


def solver_config(args) -> SolverConfig:
    if args.restarts < 1:
        raise DomainError("--restarts must be at least 1")
    return SolverConfig(restarts=args.restarts, seed=args.seed, psd_tol=args.psd_tol, gap_tol=args.gap_tol)


def _params(game: ThresholdGame, k: int) -> dict:
    return {"n": game.n, "k": k, "t": format_rational(game.ratio)}


class _Clock:
    def __init__(self):
        self.times: dict[str, float] = {}

    @contextmanager
    def __call__(self, name):
        start = time.perf_counter()
        yield
        self.times[name] = time.perf_counter() - start


# ---------------------------------------------------------------- value paths


def _classical(method: str, game: ThresholdGame, grouping: Grouping) -> Fraction:
    if method == "formula":
        return closed_form_value(game, grouping)
    if method == "bruteforce":
        bg, _ = reduce(game, grouping)
        return brute_force_value(bg)[0]
    if method == "protocol":
        bg, _ = reduce(game, grouping)
        if grouping.k == 1 or game.is_and:
            # answering +1 on every input loses only on the rare corner
            return strategy_value(bg, DeterministicStrategy([1] * bg.mA, [1] * bg.mB))
        if game.is_majority:
            return strategy_value(bg, protocol2_strategy(game, grouping))
        raise DomainError("the classical protocol path covers k = 1, AND and MAJORITY")
    raise DomainError(f"method {method!r} has no classical path")


def _quantum(method: str, game: ThresholdGame, grouping: Grouping, cfg: SolverConfig):
    """Return (value, certificate dict or None, protocol dict or None)."""
    if method == "formula":
        if grouping.k == 1:
            return vq_threshold_formula(game.n, alpha(game)), None, None
        if game.is_and:
            return float(closed_form_value(game, grouping)), None, None
        raise DomainError("closed-form quantum values exist for k = 1 and for AND")
    if method == "protocol":
        if grouping.k != 1:
            raise DomainError("the quantum protocol path covers k = 1 only")
        a = alpha(game)
        qp = protocol1(game.n, a)
        return evaluate_protocol(k1_biased_game(game.n, a), qp), None, qp.to_dict()
    if method == "sdp":
        res = quantum_value(game, grouping, cfg)
        cert = res.certificate.to_dict()
        return res.value, cert, res.protocol.to_dict() if res.protocol else None
    raise DomainError(f"method {method!r} has no quantum path")


def _attempt(fn, method, skipped, side, *args):
    """Run one value path; a path that does not cover this game is noted and skipped."""
    try:
        return fn(method, *args)
    except DomainError as exc:
        skipped[f"{side}_{method}"] = str(exc)
        return None


def _ran(values: dict, skipped: dict, side: str) -> dict:
    values = {m: v for m, v in values.items() if v is not None}
    if not values:
        raise DomainError(f"no requested {side} method covers this game: " + "; ".join(skipped.values()))
    return values


def run_value(args) -> tuple[dict, int]:
    game = threshold_game(args.n, args.t, args.t_abs)
    grouping = Grouping(args.k)
    grouping.check(game)
    cfg = solver_config(args)
    sides = {"classical": args.side in ("classical", "both"), "quantum": args.side in ("quantum", "both")}
    requested = args.method or []
    for m in requested:
        if not any(
            on and m in (CLASSICAL_METHODS if side == "classical" else QUANTUM_METHODS) for side, on in sides.items()
        ):
            raise DomainError(f"method {m!r} does not apply to the selected value(s)")
    clock = _Clock()
    report: dict = {"parameters": _params(game, args.k)}
    problems: list[str] = []
    skipped: dict[str, str] = {}

    if sides["classical"]:
        methods = [m for m in requested if m in CLASSICAL_METHODS]
        if not methods:
            try:
                closed_form_value(game, grouping)
                methods = ["formula"]
            except DomainError:
                methods = ["bruteforce"]
        values = {}
        for m in methods:
            with clock(f"classical_{m}"):
                values[m] = _attempt(_classical, m, skipped, "classical", game, grouping)
        values = _ran(values, skipped, "classical")
        vc = next(iter(values.values()))
        if len(set(values.values())) > 1:
            problems.append("classical values disagree: " + ", ".join(f"{m}={v}" for m, v in values.items()))
        entry = {"value": vc, "decimal": float(vc), "methods": values}
        if is_dyadic(vc, game.n):
            entry["dyadic"] = over_power_of_two(vc, game.n)
        entry["winning_probability"] = float((1 + vc) / 2)
        report["classical"] = entry

    uncertified = False
    if sides["quantum"]:
        methods = [m for m in requested if m in QUANTUM_METHODS] or ["sdp"]
        values = {}
        for m in methods:
            with clock(f"quantum_{m}"):
                out = _attempt(_quantum, m, skipped, "quantum", game, grouping, cfg)
            if out is None:
                continue
            value, cert, proto = out
            values[m] = value
            if cert is not None:
                report.setdefault("certificate", cert)
                uncertified |= not cert["certified"]
            if proto is not None:
                report.setdefault("protocol", proto)
        values = _ran(values, skipped, "quantum")
        vq = next(iter(values.values()))
        spread = max(values.values()) - min(values.values())
        if spread > cfg.gap_tol:
            problems.append("quantum values disagree: " + ", ".join(f"{m}={v!r}" for m, v in values.items()))
        report["quantum"] = {"value": vq, "methods": values, "winning_probability": (1 + vq) / 2}

    if sides["classical"] and sides["quantum"]:
        report["ratio"] = report["quantum"]["value"] / float(report["classical"]["value"])
    if args.timings:
        report["timings"] = clock.times
    if skipped:
        report["skipped"] = skipped
    if problems:
        report["disagreements"] = problems
    code = EXIT_OK
    if problems:
        code = EXIT_MISMATCH
    elif uncertified and args.require_certificate:
        code = EXIT_UNCERTIFIED
    return report, code


def _render_value(report: dict) -> str:
    p = report["parameters"]
    lines = [f"n={p['n']} k={p['k']} t={p['t']}*n"]
    if "classical" in report:
        c = report["classical"]
        exact = format_rational(c["value"])
        if "dyadic" in c:
            exact += f" = {c['dyadic']}"
        lines.append(f"classical  {exact}  ({serialize.fmt_real(c['decimal'], 6)})")
        for m, v in c["methods"].items():
            lines.append(f"  {m:<10} {format_rational(v)}")
    if "quantum" in report:
        q = report["quantum"]
        lines.append(f"quantum    {serialize.fmt_real(q['value'], 12)}")
        for m, v in q["methods"].items():
            lines.append(f"  {m:<10} {serialize.fmt_real(v, 12)}")
        if "certificate" in report:
            cert = report["certificate"]
            verdict = "certified" if cert["certified"] else "NOT certified"
            lines.append(f"  dual {serialize.fmt_real(cert['dual_value'], 12)}, min eig K "
                         f"{serialize.fmt_real(cert['min_eig_K'], 3)}: {verdict}")
    if "ratio" in report:
        lines.append(f"ratio      {serialize.fmt_real(report['ratio'], 6)}")
    for side in ("classical", "quantum"):
        if side in report:
            lines.append(f"P(win) {side:<9} {serialize.fmt_real(report[side]['winning_probability'], 6)}")
    for name, secs in report.get("timings", {}).items():
        lines.append(f"time {name}: {secs:.3f}s")
    for name, why in report.get("skipped", {}).items():
        lines.append(f"skipped {name}: {why}")
    for msg in report.get("disagreements", []):
        lines.append(f"MISMATCH {msg}")
    return "\n".join(lines) + "\n"


def _value_csv(report: dict) -> str:
    p = report["parameters"]
    c, q = report.get("classical", {}), report.get("quantum", {})
    header = ["n", "k", "t", "classical", "classical_decimal", "quantum", "ratio", "certified"]
    row = [
        p["n"], p["k"], p["t"], c.get("value"), c.get("decimal"), q.get("value"),
        report.get("ratio"), report.get("certificate", {}).get("certified"),
    ]
    return serialize.to_csv(header, [row])


# ---------------------------------------------------------------- commands


def cmd_reduce(args) -> int:
    game = threshold_game(args.n, args.t, args.t_abs)
    bg, _ = reduce(game, Grouping(args.k))
    if args.merge:
        bg = merge_duplicate_inputs(bg)
    doc = bg.to_dict()
    if args.format == "csv":
        rows = [["A", i, format_rational(p)] for i, p in enumerate(bg.pA)]
        rows += [["B", j, format_rational(q)] for j, q in enumerate(bg.pB)]
        sys.stdout.write(serialize.to_csv(["party", "input", "probability"], rows))
    else:
        sys.stdout.write(serialize.dumps(doc) + "\n")
    return EXIT_OK


def cmd_value(args) -> int:
    report, code = run_value(args)
    if args.format == "json":
        sys.stdout.write(serialize.dumps(report) + "\n")
    elif args.format == "csv":
        sys.stdout.write(_value_csv(report))
    else:
        sys.stdout.write(_render_value(report))
    for msg in report.get("disagreements", []):
        print(f"loccg: {msg}", file=sys.stderr)
    return code


def cmd_certify(args) -> int:
    game = threshold_game(args.n, args.t, args.t_abs)
    grouping = Grouping(args.k)
    grouping.check(game)
    cfg = solver_config(args)
    proto = None
    if args.dual == "kkt":
        res = quantum_value(game, grouping, cfg)
        cert, value = res.certificate, res.value
        proto = res.protocol
    elif args.dual == "and-closed":
        if not game.is_and or grouping.k < 2:
            raise DomainError("the closed-form AND dual needs t = n and k >= 2")
        cert = dual_and_closed_form(game.n, grouping.k, cfg.psd_tol, cfg.gap_tol)
        value = cert.reference
    elif args.dual == "majority-conjecture":
        if not game.is_majority:
            raise DomainError("the conjectured dual is for MAJORITY (t = n/2)")
        cert = dual_majority_conjecture(game.n, grouping.k, cfg.psd_tol, cfg.gap_tol)
        value = cert.reference
    else:  # chsh-closed
        if grouping.k != 1:
            raise DomainError("the closed-form biased CHSH dual needs k = 1")
        a = alpha(game)
        cert = dual_biased_chsh_closed_form(game.n, a, psd_tol=cfg.psd_tol, gap_tol=cfg.gap_tol)
        value = cert.reference
        proto = protocol1(game.n, a)
    doc = {"parameters": _params(game, grouping.k), "dual": args.dual, "value": value}
    doc.update(cert.to_dict())
    if proto is not None:
        doc.update(proto.to_dict())
    if args.format == "csv":  # JSON otherwise, also without a format flag
        header = ["n", "k", "t", "dual", "value", "dual_value", "min_eig_K", "certified", "gap"]
        p = doc["parameters"]
        row = [p["n"], p["k"], p["t"], args.dual, value, cert.dual_value, cert.min_eig_K, cert.certified, cert.gap]
        sys.stdout.write(serialize.to_csv(header, [row]))
    else:
        sys.stdout.write(serialize.dumps(doc) + "\n")
    if args.require_certificate and not cert.certified:
        return EXIT_UNCERTIFIED
    return EXIT_OK


def _emit_rows(args, header, rows) -> None:
    if args.format == "json":
        sys.stdout.write(serialize.dumps([dict(zip(header, r)) for r in rows]) + "\n")
    elif args.format == "csv":
        sys.stdout.write(serialize.to_csv(header, rows))
    else:
        sys.stdout.write(serialize.to_table(header, rows))


def cmd_sweep_nk(args) -> int:
    cfg = solver_config(args)
    rows = []
    for k in args.k or [2, 4]:
        chk = sweep_nk(k, args.n_max, cfg)
        if chk is None:
            rows.append([k, None, None, None, None])
        else:
            rows.append([k, chk.n, chk.method, float(chk.vc), chk.vq])
    _emit_rows(args, ["k", "n_k", "certificate", "classical", "quantum"], rows)
    if args.require_certificate and any(r[1] is None for r in rows):
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_table3(args) -> int:
    rows_in = table3(solver_config(args))
    width = max(len(r.thetaA) for r in rows_in) if rows_in else 0
    wb = max(len(r.phiB) for r in rows_in) if rows_in else 0
    header = ["n", "vq", "vc", "vc_decimal", "ratio", "certified"]
    header += [f"theta{i}" for i in range(width)] + [f"phi{j}" for j in range(wb)]
    rows = []
    for r in rows_in:
        thetas = list(r.thetaA) + [None] * (width - len(r.thetaA))
        phis = list(r.phiB) + [None] * (wb - len(r.phiB))
        rows.append([r.n, r.vq, r.vc, float(r.vc), r.ratio, r.certified] + thetas + phis)
    _emit_rows(args, header, rows)
    if args.require_certificate and not all(r.certified for r in rows_in):
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_grid(args) -> int:
    if args.k != 1:
        raise DomainError("the grid covers the (n - 1, 1) grouping only (k = 1)")
    rows = [[r.n, r.t, r.vq, r.winning_probability] for r in grid(args.n_max)]
    _emit_rows(args, ["n", "t", "vq", "winning_probability"], rows)
    return EXIT_OK


def cmd_majority_scaling(args) -> int:
    rows_in = majority_scaling(args.n_max, solver_config(args))
    rows = [
        [r.n, float(r.vc_formula), float(r.vc_bruteforce), r.vq, r.gap, r.gap_bruteforce, r.certified]
        for r in rows_in
    ]
    header = ["n", "vc_formula", "vc_bruteforce", "vq", "gap", "gap_bruteforce", "certified"]
    _emit_rows(args, header, rows)
    if args.require_certificate and not all(r.certified for r in rows_in):
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_ns_box(args) -> int:
    game = threshold_game(args.n, args.t, args.t_abs)
    bg, _ = reduce(game, Grouping(args.k))
    value = ns_box_value(bg)
    doc = {"parameters": _params(game, args.k), "mA": bg.mA, "mB": bg.mB, "ns_value": value}
    if args.format == "json":
        sys.stdout.write(serialize.dumps(doc) + "\n")
    elif args.format == "csv":
        sys.stdout.write(serialize.to_csv(["n", "k", "t", "ns_value"], [[game.n, args.k, doc["parameters"]["t"], value]]))
    else:
        sys.stdout.write(f"no-signalling box value {format_rational(value)}\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="seed for the SDP restarts (default 0)")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--psd-tol", type=float, default=PSD_TOL)
    p.add_argument("--gap-tol", type=float, default=GAP_TOL)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.add_argument("--require-certificate", action="store_true", help="exit 3 if a dual certificate fails")
    p.add_argument("--timings", action="store_true", help="report wall-clock times (output no longer reproducible)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _game_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-n", type=int, required=True, help="number of players")
    p.add_argument("-k", type=int, required=True, help="size of the smaller group")
    th = p.add_mutually_exclusive_group(required=True)
    th.add_argument("--t", help="threshold as a fraction r/s of n (values above 1 are absolute)")
    th.add_argument("--t-abs", help="absolute threshold, e.g. 8 or 15/2")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="loccg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="print the reduced biased game")
    _game_args(p)
    p.add_argument("--merge", action="store_true", help="fold inputs with identical sign rows/columns")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("value", parents=[common], help="classical and/or quantum value")
    _game_args(p)
    side = p.add_mutually_exclusive_group()
    side.add_argument("--classical", dest="side", action="store_const", const="classical")
    side.add_argument("--quantum", dest="side", action="store_const", const="quantum")
    side.add_argument("--both", dest="side", action="store_const", const="both")
    p.add_argument(
        "--method",
        action="append",
        choices=sorted(set(CLASSICAL_METHODS + QUANTUM_METHODS)),
        help="value path; repeat to cross-check",
    )
    p.set_defaults(func=cmd_value, side="both")

    p = sub.add_parser("certify", parents=[common], help="check a dual certificate")
    _game_args(p)
    p.add_argument("--dual", choices=["kkt", "and-closed", "majority-conjecture", "chsh-closed"], default="kkt")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep-nk", parents=[common], help="where the MAJORITY advantage disappears")
    p.add_argument("--k", type=int, action="append", help="even group size (repeatable, default 2 and 4)")
    p.add_argument("--n-max", type=int, default=60)
    p.set_defaults(func=cmd_sweep_nk)

    p = sub.add_parser("table3", parents=[common], help="MAJORITY with k = 2, n = 4..10")
    p.set_defaults(func=cmd_table3)

    p = sub.add_parser("grid", parents=[common], help="optimal (n-1, 1) protocol winning probabilities")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("majority-scaling", parents=[common], help="MAJORITY split into equal halves")
    p.add_argument("--n-max", type=int, default=16)
    p.set_defaults(func=cmd_majority_scaling)

    p = sub.add_parser("ns-box", parents=[common], help="value with a no-signalling box")
    _game_args(p)
    p.set_defaults(func=cmd_ns_box)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DomainError, CapacityError) as exc:
        print(f"loccg: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConsistencyError as exc:
        print(f"loccg: consistency failure: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except LoccgError as exc:
        print(f"loccg: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
