"""Command-line frontend.

Numbers cross this boundary as decimal (or a/b rational) strings and are
parsed to exact rationals, so certified comparisons never see a silently
rounded double.  Every command writes either human-readable text or a
stable JSON document; enclosure fields are always {"mid": ..., "rad": ...}
decimal strings or {"infinite": true}.

Exit codes: 0 success, 1 usage, 2 domain error, 3 precision insufficient.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import __version__
from .balls import Enclosure
from .cache import EvalCache, eval_key
from .decompose import (
    decompose_difference,
    decompose_product,
    decompose_quotient,
    decompose_sum,
)
from .errors import DomainError, PrecisionInsufficient, ZetaStarError
from .evaluate import (
    DEFAULT_PRECISION,
    DEFAULT_TRUNCATION,
    eval_tailed,
    tail_factor,
    tail_factor_limit,
)
from .expansion import expand
from .explorer import (
    box_count_sequence,
    covering_length,
    dimension_record,
    search_algebraic,
)
from .indices import Composition, ConstTail, NO_TAIL, TailedIndex
from .subdivision import (
    ETA_DQ,
    ETA_TP_CLOSURE,
    TAU_BK,
    TAU_LP_CLOSURE,
    Family,
    check_hall_condition,
    node_endpoints,
    make_node,
    subdivide,
    thickness,
    thickness_exact,
)
from .tau import DigitSeq, Periodic, tau_decompose_sum, tau_expand, tau_value
from .theorems import GAP_OPS, theorem12_gaps

_FAMILIES = {
    "eta-dq": ETA_DQ,
    "tau-bk": TAU_BK,
    "eta-tp-closure": ETA_TP_CLOSURE,
    "tau-lp-closure": TAU_LP_CLOSURE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def parse_rational(text: str) -> Fraction:
    """Exact rational from '7/3', '3.99', '1e-8', or an integer string."""
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (ValueError, ArithmeticError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def parse_index(text: str) -> Composition:
    return Composition(tuple(int(tok) for tok in text.split(",") if tok.strip()))


def parse_digits(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def parse_tail(text: str):
    if text == "none":
        return NO_TAIL
    if text == "ones":
        return ConstTail(1)
    return ConstTail(int(text))


def _digits_for(prec: int) -> int:
    return max(20, int(prec * 0.302) + 2)


def enc_json(e: Enclosure) -> dict:
    if e.upper_infinite:
        return {"infinite": True}
    d = _digits_for(e.prec)
    return {"mid": format(e.mid, f".{d}g"), "rad": format(e.rad, ".6g")}


def enc_text(e: Enclosure) -> str:
    if e.upper_infinite:
        return "+inf"
    d = _digits_for(e.prec)
    return f"{format(e.mid, f'.{d}g')} +/- {format(e.rad, '.3g')}"


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cache_dir(args) -> Path:
    if args.cache_dir:
        return Path(args.cache_dir)
    base = os.environ.get("XDG_DATA_HOME", os.path.expanduser("~/.local/share"))
    return Path(base) / "zstar"


def _open_cache(args) -> EvalCache:
    return EvalCache(_cache_dir(args) / "eval-cache.jsonl")


# -- command handlers ----------------------------------------------------------


def cmd_eval(args) -> int:
    index = parse_index(args.index)
    tail = parse_tail(args.tail)
    t = TailedIndex(index, tail)
    cache = _open_cache(args)
    key = eval_key(t, args.precision_bits, args.truncation)
    value = cache.get(key, args.precision_bits)
    cached = value is not None
    if value is None:
        value = eval_tailed(t, args.truncation, args.precision_bits)
        cache.put(key, value)
        cache.save()
    _emit(
        args,
        {
            "index": list(index.parts),
            "tail": str(t.tail) if not t.is_finite else "none",
            "value": enc_json(value),
            "precision": args.precision_bits,
            "truncation": args.truncation,
            "cached": cached,
        },
        [f"zeta*{t} = {enc_text(value)}" + ("  [cached]" if cached else "")],
    )
    return 0


def cmd_expand(args) -> int:
    x = parse_rational(args.x)
    result = expand(x, args.depth, args.truncation, args.precision_bits, args.escalations)
    payload = {
        "x": args.x,
        "digits": list(result.digits),
        "status": result.status,
        "tail_digit": result.tail_digit,
        "ambiguous_position": result.ambiguous_position,
        "residual": enc_json(result.residual) if result.residual else None,
    }
    _emit(args, payload, [f"digits: {list(result.digits)}", f"status: {result.status}"])
    return 0


def cmd_tails(args) -> int:
    payload: dict = {"q": args.q}
    lines = []
    if args.m is not None:
        fm = tail_factor(args.m, args.q)
        payload["m"] = args.m
        payload["factor"] = f"{fm.numerator}/{fm.denominator}"
        lines.append(f"F_{args.m}({args.q}) = {fm} = {float(fm):.12g}")
    limit = tail_factor_limit(args.q, args.precision_bits)
    payload["limit"] = enc_json(limit)
    lines.append(f"F_inf({args.q}) = {enc_text(limit)}")
    _emit(args, payload, lines)
    return 0


def _family(args) -> Family:
    return Family(_FAMILIES[args.family], args.bound)


def cmd_subdivide(args) -> int:
    family = _family(args)
    prefix = parse_digits(args.prefix) if args.prefix else ()
    node = make_node(family, prefix, args.type_i, args.precision_bits)
    lower, (g_lo, g_hi), upper = subdivide(node, args.precision_bits)
    payload = {
        "family": str(family),
        "node": {"prefix": list(node.prefix), "type": node.type_i,
                 "low": enc_json(node.low), "high": enc_json(node.high)},
        "lower_child": {"prefix": list(lower.prefix), "type": lower.type_i,
                        "low": enc_json(lower.low), "high": enc_json(lower.high)},
        "gap": {"low": enc_json(g_lo), "high": enc_json(g_hi)},
        "upper_child": {"prefix": list(upper.prefix), "type": upper.type_i,
                        "low": enc_json(upper.low), "high": enc_json(upper.high)},
    }
    _emit(args, payload, [
        f"node  {node}: [{enc_text(node.low)}, {enc_text(node.high)}]",
        f"lower {lower}: [{enc_text(lower.low)}, {enc_text(lower.high)}]",
        f"gap   ({enc_text(g_lo)}, {enc_text(g_hi)})",
        f"upper {upper}: [{enc_text(upper.low)}, {enc_text(upper.high)}]",
    ])
    return 0


def cmd_endpoints(args) -> int:
    family = _family(args)
    prefix = parse_digits(args.prefix) if args.prefix else ()
    low, high = node_endpoints(family, prefix, args.type_i, args.precision_bits)
    _emit(
        args,
        {"family": str(family), "low": enc_json(low), "high": enc_json(high)},
        [f"low  = {enc_text(low)}", f"high = {enc_text(high)}"],
    )
    return 0


def cmd_hall_check(args) -> int:
    family = _family(args)
    report = check_hall_condition(family, args.depth, args.precision_bits)
    worst = report.worst_margin
    if isinstance(worst, Fraction):
        worst_json: object = f"{worst.numerator}/{worst.denominator}"
        worst_text = str(worst)
    elif worst is None:
        worst_json = None
        worst_text = "n/a"
    else:
        worst_json = enc_json(worst)
        worst_text = enc_text(worst)
    payload = {
        "family": str(family),
        "depth": args.depth,
        "nodes": report.nodes_checked,
        "worst_margin": worst_json,
        "violations": [
            {"prefix": list(node.prefix), "type": node.type_i}
            for node, _m in report.violations
        ],
        "exact": report.exact,
    }
    _emit(args, payload, [
        f"{family} depth {args.depth}: {report.nodes_checked} nodes checked",
        f"worst margin: {worst_text}",
        f"violations: {len(report.violations)}",
    ])
    return 0


def _cert_payload(cert) -> dict:
    return {
        "op": cert.op,
        "left_digits": list(cert.left.prefix.parts),
        "left_tail": cert.left.tail.q,
        "right_digits": list(cert.right.prefix.parts),
        "right_tail": cert.right.tail.q,
        "combined": enc_json(cert.combined),
        "target": cert.target_text,
        "residual_bound": format(cert.residual_bound, ".6g"),
        "tolerance": f"{cert.tolerance.numerator}/{cert.tolerance.denominator}",
        "q": cert.q,
        "precision": cert.precision,
    }


def cmd_decompose(args) -> int:
    x = parse_rational(args.x)
    tol = parse_rational(args.tol)
    fn = {
        "sum": decompose_sum,
        "product": decompose_product,
        "difference": decompose_difference,
        "quotient": decompose_quotient,
    }[args.operation]
    cert = fn(x, args.q, tol, args.precision_bits)
    payload = _cert_payload(cert)
    _emit(args, payload, [
        f"{args.operation}({args.x}) with digits <= {args.q}:",
        f"  left  = {cert.left}",
        f"  right = {cert.right}",
        f"  combined = {enc_text(cert.combined)}",
        f"  residual bound = {format(cert.residual_bound, '.3g')}",
    ])
    return 0


def cmd_tau(args) -> int:
    if args.tau_command == "value":
        prefix = parse_digits(args.prefix) if args.prefix else ()
        tail = Periodic((1,)) if args.ones_tail else Periodic(parse_digits(args.period))
        v = tau_value(DigitSeq(prefix, tail))
        _emit(args, {"value": f"{v.numerator}/{v.denominator}"},
              [f"tau = {v} = {float(v):.15g}"])
        return 0
    if args.tau_command == "expand":
        seq = tau_expand(parse_rational(args.x), args.depth)
        payload = {
            "prefix": list(seq.prefix),
            "period": list(seq.tail.period) if seq.tail else None,
        }
        _emit(args, payload, [f"digits: {seq}"])
        return 0
    left, right, residual = tau_decompose_sum(parse_rational(args.x), args.k, args.depth)
    payload = {
        "left_prefix": list(left.prefix),
        "left_period": list(left.tail.period),
        "right_prefix": list(right.prefix),
        "right_period": list(right.tail.period),
        "residual": f"{residual.numerator}/{residual.denominator}",
    }
    _emit(args, payload, [
        f"left  = {left}",
        f"right = {right}",
        f"residual = {residual} = {float(residual):.3e}",
    ])
    return 0


def cmd_gaps(args) -> int:
    ops = GAP_OPS if args.op == "all" else (args.op,)
    reports = [theorem12_gaps(args.p, args.precision_bits, op) for op in ops]
    payload = {"p": args.p, "reports": []}
    lines = []
    for rep in reports:
        payload["reports"].append({
            "op": rep.op,
            "intervals": [
                {"label": lbl, "low": enc_json(lo), "high": enc_json(hi)}
                for lbl, lo, hi in rep.combined_intervals
            ],
            "gaps": [
                {"low": enc_json(lo), "high": enc_json(hi)} for lo, hi in rep.gaps
            ],
            "note": rep.note,
        })
        lines.append(f"[{rep.op}] stage intervals:")
        for lbl, lo, hi in rep.combined_intervals:
            lines.append(f"  {lbl}: [{enc_text(lo)}, {enc_text(hi)}]")
        if rep.gaps:
            for lo, hi in rep.gaps:
                lines.append(f"  certified gap: ({enc_text(lo)}, {enc_text(hi)})")
        else:
            lines.append("  no certified stage-one gap")
    _emit(args, payload, lines)
    return 0


def cmd_thickness(args) -> int:
    family = _family(args)
    value = thickness(family, args.depth, args.precision_bits)
    payload = {"family": str(family), "depth": args.depth, "thickness": enc_json(value)}
    lines = [f"thickness({family}, depth {args.depth}) = {enc_text(value)}"]
    if family.exact:
        exact = thickness_exact(family, args.depth)
        payload["exact"] = f"{exact.numerator}/{exact.denominator}"
        lines.append(f"exact = {exact}")
    _emit(args, payload, lines)
    return 0


def cmd_dimension(args) -> int:
    rec = dimension_record(args.p, args.precision_bits, args.box_depth)
    payload = {
        "p": rec.p,
        "alpha": enc_json(rec.alpha),
        "dim": enc_json(rec.dim),
        "empirical_dim": rec.empirical_dim,
        "box_depth": rec.depth,
    }
    _emit(args, payload, [
        f"alpha_{rec.p} = {enc_text(rec.alpha)}",
        f"dim = {enc_text(rec.dim)}",
        f"box-count estimate (depth {rec.depth}): {rec.empirical_dim}",
    ])
    return 0


def cmd_box_count(args) -> int:
    seq = box_count_sequence(args.p, args.n)
    import math

    rows = [
        (j, seq[j], math.log2(seq[j] / seq[j - 1]) if j >= 1 and seq[j - 1] else None)
        for j in range(1, args.n + 1)
    ]
    payload = {"p": args.p, "counts": seq, "ratio": rows[-1][2]}
    _emit(args, payload, [f"{j} {c} {'' if r is None else format(r, '.10f')}" for j, c, r in rows])
    return 0


def cmd_covering(args) -> int:
    rows = []
    for d in range(1, args.depth + 1):
        rows.append((d, covering_length(args.q, d, args.precision_bits, args.window_depth)))
    payload = {
        "q": args.q,
        "lengths": [{"depth": d, "length": enc_json(v)} for d, v in rows],
    }
    _emit(args, payload, [f"{d} {format(v.mid, '.15g')}" for d, v in rows])
    return 0


def cmd_search_algebraic(args) -> int:
    entries = search_algebraic(
        args.q, args.max_degree, args.max_height, args.expand_depth, args.precision_bits
    )
    payload = {
        "q": args.q,
        "candidates": [
            {
                "polynomial": list(e.polynomial),
                "root": enc_json(e.root),
                "classification": e.classification,
                "eliminated_at": e.eliminated_at,
                "digits": list(e.digits),
            }
            for e in entries
        ],
    }
    lines = []
    for e in entries:
        where = "" if e.eliminated_at is None else f" at digit {e.eliminated_at}"
        lines.append(
            f"{format(e.root.mid, '.12g'):>18}  {e.classification}{where}  "
            f"poly={list(e.polynomial)} digits={list(e.digits)}"
        )
    _emit(args, payload, lines)
    return 0


def cmd_cache(args) -> int:
    cache = _open_cache(args)
    if args.cache_command == "stats":
        stats = cache.stats()
        _emit(args, stats, [f"{k}: {v}" for k, v in stats.items()])
        return 0
    n = cache.clear()
    _emit(args, {"cleared": n}, [f"cleared {n} entries"])
    return 0


# -- parser --------------------------------------------------------------------


def _env_default(name: str, fallback, cast):
    raw = os.environ.get(f"ZSTAR_{name}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        return fallback


def build_parser() -> _Parser:
    parser = _Parser(prog="zstar", description="certified zeta-star value machinery")
    parser.add_argument("--version", action="version", version=f"zstar {__version__}")
    parser.add_argument(
        "--precision-bits",
        type=int,
        default=_env_default("PRECISION_BITS", DEFAULT_PRECISION, int),
        help="working precision for midpoints (default 128)",
    )
    parser.add_argument(
        "--truncation",
        type=int,
        default=_env_default("TRUNCATION", DEFAULT_TRUNCATION, int),
        help="direct-summation budget (default 10^6)",
    )
    parser.add_argument(
        "--format",
        choices=("text", "json"),
        default=_env_default("FORMAT", "text", str),
    )
    parser.add_argument(
        "--cache-dir", default=_env_default("CACHE_DIR", None, str), help="cache directory"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a finite or tail-completed index")
    p.add_argument("--index", required=True, help="comma-separated exponents, e.g. 2,1")
    p.add_argument("--tail", default="none", help="none, ones, or a digit q for {q}^inf")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("expand", help="greedy digit expansion of x > 1")
    p.add_argument("--x", required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--escalations", type=int, default=3)
    p.set_defaults(fn=cmd_expand)

    p = sub.add_parser("tails", help="partial and limiting tail factors")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int)
    p.set_defaults(fn=cmd_tails)

    for name, fn in (("subdivide", cmd_subdivide), ("endpoints", cmd_endpoints)):
        p = sub.add_parser(name, help=f"{name} a subdivision node")
        p.add_argument("--family", choices=sorted(_FAMILIES), required=True)
        p.add_argument("--bound", type=int, required=True, help="q, k, p or m of the family")
        p.add_argument("--prefix", default="", help="comma-separated digits")
        p.add_argument("--type-i", type=int, required=True, dest="type_i")
        p.set_defaults(fn=fn)

    p = sub.add_parser("hall-check", help="sweep the Hall gap condition")
    p.add_argument("--family", choices=sorted(_FAMILIES), required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(fn=cmd_hall_check)

    p = sub.add_parser("decompose", help="decompose a target into two tail values")
    p.add_argument("operation", choices=("sum", "product", "difference", "quotient"))
    p.add_argument("--x", required=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--tol", default="1e-8")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("tau", help="exact binary-map operations")
    tau_sub = p.add_subparsers(dest="tau_command", required=True)
    pv = tau_sub.add_parser("value")
    pv.add_argument("--prefix", default="")
    pv.add_argument("--period", default="")
    pv.add_argument("--ones-tail", action="store_true")
    pe = tau_sub.add_parser("expand")
    pe.add_argument("--x", required=True)
    pe.add_argument("--depth", type=int, default=64)
    pd = tau_sub.add_parser("decompose")
    pd.add_argument("--x", required=True)
    pd.add_argument("--k", type=int, default=2)
    pd.add_argument("--depth", type=int, default=40)
    p.set_defaults(fn=cmd_tau)

    p = sub.add_parser("gaps", help="first-stage gap report for the closure family")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--op", choices=GAP_OPS + ("all",), default="sum")
    p.set_defaults(fn=cmd_gaps)

    p = sub.add_parser("thickness", help="Newhouse thickness of a truncation")
    p.add_argument("--family", choices=sorted(_FAMILIES), required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(fn=cmd_thickness)

    p = sub.add_parser("dimension", help="dimension root, formula, box estimate")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--box-depth", type=int, default=60)
    p.set_defaults(fn=cmd_dimension)

    p = sub.add_parser("box-count", help="dyadic interval counts and growth")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=40)
    p.set_defaults(fn=cmd_box_count)

    p = sub.add_parser("covering", help="total subdivision length per depth")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--window-depth", type=int, default=8)
    p.set_defaults(fn=cmd_covering)

    p = sub.add_parser("search-algebraic", help="expand and classify algebraic candidates")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--max-height", type=int, default=4)
    p.add_argument("--expand-depth", type=int, default=12)
    p.set_defaults(fn=cmd_search_algebraic)

    p = sub.add_parser("cache", help="evaluation cache maintenance")
    p.add_argument("cache_command", choices=("stats", "clear"))
    p.set_defaults(fn=cmd_cache)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrecisionInsufficient as exc:
        print(f"precision insufficient: {exc}", file=sys.stderr)
        return 3
    except ZetaStarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
