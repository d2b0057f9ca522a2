"""Command-line entry point: ``bexp <command> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 parse error,
3 contract violation, 4 undecided at the working depth.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from bexp import __version__, spectra, twoexp
from bexp.errors import BexpError, ContractViolation, ParseError, UndecidedAtDepth
from bexp.numeric import DEFAULT_TOL, algebraic, decimal_string, eval_series, rational
from bexp.words import parse_stream, parse_word

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    m: int = 1
    precision_bits: int = 128
    depth: int = 64
    tol: Fraction = DEFAULT_TOL
    out_dir: Path = Path("out")
    format: str = "json"
    timestamp: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ContractViolation("m must be >= 1")
        if self.precision_bits < 64:
            raise ContractViolation("precision must be >= 64 bits")
        if self.depth < 8:
            raise ContractViolation("depth must be >= 8")
        if self.format not in FORMATS:
            raise ContractViolation(f"format must be one of {FORMATS}")

    def to_json(self):
        return {"m": self.m, "precision_bits": self.precision_bits, "depth": self.depth,
                "tol": str(self.tol), "format": self.format}


# --------------------------------------------------------------------------
# parsing


_NAMED = re.compile(r"^(golden|tribonacci|qf|qkl|G)(?:\((\d+)\))?$")
_ROOT = re.compile(r"^root:(?P<coeffs>[-+\d, ]+):(?P<lo>[^,]+),(?P<hi>[^,]+)$")


def _fraction(text, whole):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", whole, whole.find(text)) from None


def parse_base(text, m=1):
    """Decimal or p/q rationals, named constants, or root:<coeffs>:<lo>,<hi>."""
    text = text.strip()
    named = _NAMED.match(text)
    if named:
        name, arg = named.group(1), named.group(2)
        mm = int(arg) if arg else m
        if name == "golden":
            return spectra.golden()
        if name == "tribonacci":
            return spectra.tribonacci()
        if name == "qf":
            return spectra.q_f(mm)
        if name == "qkl":
            return spectra.q_KL(mm)
        return spectra.G(mm)
    root = _ROOT.match(text)
    if root:
        try:
            coeffs = [int(c) for c in root.group("coeffs").split(",")]
        except ValueError:
            raise ParseError("root coefficients must be integers", text, 5) from None
        lo = _fraction(root.group("lo"), text)
        hi = _fraction(root.group("hi"), text)
        return algebraic(coeffs, lo, hi)
    return rational(_fraction(text, text))


def parse_m_range(text):
    """``3`` or ``1-4``; an empty range such as ``3-2`` is allowed."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:-\s*(\d+))?\s*", text)
    if not match:
        raise ParseError(f"bad m range {text!r}", text, 0)
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    return range(lo, hi + 1)


# --------------------------------------------------------------------------
# output


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _stamp(obj, cfg):
    if cfg.timestamp:
        obj = dict(obj, timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    return obj


def _write(cfg, sub, name, text):
    path = cfg.out_dir / sub / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _safe(text):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_")[:80]


def _approx(q):
    return decimal_string(q.interval(96).mid, 20)


# --------------------------------------------------------------------------
# commands


def cmd_eval(args, cfg):
    q = parse_base(args.q, cfg.m)
    s = parse_stream(args.stream, cfg.m)
    v = eval_series(s, q, cfg.depth, cfg.precision_bits)
    print(v)
    return 0


def constants_rows(ms, tol=DEFAULT_TOL):
    rows = []
    for m in ms:
        row = {"m": m}
        for key, q in (("G", spectra.G(m)), ("q_f", spectra.q_f(m, tol)),
                       ("q_KL", spectra.q_KL(m, tol))):
            iv = q.interval(96)
            text = decimal_string(iv.mid, 15)
            # bound on |printed value - true value|: rounding plus half the enclosure
            err = abs(Fraction(text) - iv.mid) + iv.width / 2
            row[key] = text
            row[f"{key}_err"] = f"{float(err * Fraction(1001, 1000)):.3e}" if err else "0"
        rows.append(row)
    return rows


CONSTANT_FIELDS = ["m", "G", "G_err", "q_f", "q_f_err", "q_KL", "q_KL_err"]


def cmd_constants(args, cfg):
    rows = constants_rows(parse_m_range(args.m_range), cfg.tol)
    if cfg.format == "csv":
        buf = io.StringIO(newline="")
        writer = csv.DictWriter(buf, fieldnames=CONSTANT_FIELDS, lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
        _write(cfg, "tables", "constants.csv", text)
        sys.stdout.write(text)
    else:
        text = _dump(_stamp({"constants": rows}, cfg))
        _write(cfg, "tables", "constants.json", text + "\n")
        print(text)
    return 0


def _pair(args, m):
    return twoexp.PairFunction(parse_stream(args.c, m), parse_stream(args.d, m), m)


def _emit_certificate(cert, cfg, name):
    body = _stamp(dict(cert.to_json(), ok=True, q_approx=_approx(cert.q)), cfg)
    text = _dump(body)
    _write(cfg, "certificates", f"{_safe(name)}.json", text + "\n")
    print(text)
    return 0


def cmd_b2_certify(args, cfg):
    q = parse_base(args.q, cfg.m)
    cert = twoexp.certify_b2_membership(q, _pair(args, cfg.m), twoexp.RESIDUAL_TOL,
                                        max(cfg.depth, 32))
    return _emit_certificate(cert, cfg, f"certify_m{cfg.m}_{args.q}_{args.c}_{args.d}")


def cmd_b2_construct(args, cfg):
    m = cfg.m
    a = parse_word(args.word, m)
    depth = max(cfg.depth, 32)
    if args.kind == "V":
        cert = twoexp.certify_V(a, m, depth=depth)
        name = f"V_m{m}_{args.word}"
    elif args.kind == "accumulation":
        p = twoexp.construct_accumulation_family(a, m, args.j, args.ell)
        q0 = twoexp.v_base(a, m)
        cert = twoexp.solve_q_cd(p, q0, cfg.tol, depth, require_start_membership=False,
                                 construction=f"Lemma4_5({args.j},{args.ell})")
        name = f"accumulation_m{m}_{args.word}_j{args.j}_l{args.ell}"
    else:
        if not args.alpha_p:
            raise ParseError("--kind ubar needs --alpha-p", "", 0)
        if not args.q:
            raise ParseError("--kind ubar needs --q", "", 0)
        p = twoexp.construct_ubar_pair(a, parse_stream(args.alpha_p, m), m)
        cert = twoexp.certify_b2_membership(parse_base(args.q, m), p, depth=depth,
                                            construction="Lemma4_2")
        name = f"ubar_m{m}_{args.word}"
    return _emit_certificate(cert, cfg, name)


def cmd_b2_order(args, cfg):
    m = cfg.m
    pairs = []
    for text in args.pair:
        if ";" not in text:
            raise ParseError("a pair is written 'c;d'", text, len(text))
        c, d = text.split(";", 1)
        pairs.append(twoexp.PairFunction(parse_stream(c, m), parse_stream(d, m), m))
    q0 = parse_base(args.q_start, m)
    rep = twoexp.pair_order_check(q0, pairs, cfg.tol, max(cfg.depth, 32))
    body = {"m": m, "q_start": q0.to_json(), "ok": rep["ok"], "checks": rep["checks"],
            "roots": [dict(c.to_json(), q_approx=_approx(c.q)) for c in rep["roots"]]}
    text = _dump(_stamp(body, cfg))
    _write(cfg, "certificates", f"order_m{m}_{_safe(args.q_start)}.json", text + "\n")
    print(text)
    return 0 if rep["ok"] else 1


def cmd_b2_search(args, cfg):
    q = parse_base(args.q, cfg.m)
    p = twoexp.search_b2_pair(q, cfg.m, args.max_size, max(cfg.depth, 32))
    if p is None:
        raise ContractViolation(f"no pair with preperiod+period <= {args.max_size} "
                                f"has f(q) = 0 at q = {args.q}")
    cert = twoexp.certify_b2_membership(q, p, depth=max(cfg.depth, 32))
    return _emit_certificate(cert, cfg, f"search_m{cfg.m}_{args.q}")


def _language_spec(args, m):
    from bexp.uniqlang import LanguageSpec, RightEndpoint, Slice
    c0 = parse_word(args.c0, m) if args.c0 else spectra.first_generator(m)
    sl = RightEndpoint() if args.slice in (None, "right") else Slice(int(args.slice))
    return LanguageSpec(m, c0, sl)


def cmd_uniqlang_check(args, cfg):
    from bexp.uniqlang import recognize
    spec = _language_spec(args, cfg.m)
    verdict = recognize(parse_word(args.word, cfg.m), spec)
    if verdict:
        d = verdict.decomposition
        body = {"word": args.word, "spec": str(spec), "accept": True,
                "decomposition": {"omega": str(d.omega), "j": "inf" if d.j == float("inf")
                                  else d.j, "blocks": [[b.index, b.repeat, b.link]
                                                       for b in d.blocks],
                                  "reflected": d.reflected, "unresolved": d.unresolved}}
    else:
        body = {"word": args.word, "spec": str(spec), "accept": False, "reason": verdict.reason}
    print(_dump(body))
    return 0


def cmd_uniqlang_enum(args, cfg):
    from bexp.uniqlang import enumerate_words
    spec = _language_spec(args, cfg.m)
    for w in enumerate_words(spec, args.length):
        print(str(w))
    return 0


def cmd_uniqlang_cross(args, cfg):
    from bexp.uniqlang import cross_validate
    spec = _language_spec(args, cfg.m)
    q = parse_base(args.q, cfg.m) if args.q else None
    rep = cross_validate(spec, q, args.length, cfg.depth)
    text = _dump(_stamp(rep.to_json(), cfg))
    _write(cfg, "reports", f"cross_{_safe(str(spec))}_L{args.length}.json", text + "\n")
    print(text)
    return 0 if rep.ok else 1


def cmd_verify(args, cfg):
    from bexp.suite import SuiteConfig, exit_code, format_matrix, run_suite
    groups = set(args.group) if args.group else None
    results = run_suite(SuiteConfig(depth=cfg.depth, seed=args.seed), groups, args.jobs)
    print(format_matrix(results))
    body = {"config": cfg.to_json(), "seed": args.seed,
            "results": [r.to_json() for r in results]}
    _write(cfg, "reports", "verify.json", _dump(_stamp(body, cfg)) + "\n")
    return exit_code(results)


def cmd_alpha(args, cfg):
    q = parse_base(args.q, cfg.m)
    fn = spectra.alpha_of if args.kind == "alpha" else spectra.beta_of
    w = fn(q, cfg.m, args.digits)
    body = {"q": q.to_json(), "m": cfg.m, args.kind: str(w),
            "class": spectra.classify_base(q, cfg.m, cfg.depth).value}
    print(_dump(body))
    return 0


# --------------------------------------------------------------------------
# argument parser


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{name} must be an integer, got {raw!r}", raw, 0) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _global_options(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--precision", type=int, default=default(None),
                        help="working bits (>= 64)")
    parser.add_argument("--depth", type=int, default=default(None), help="digit depth (>= 8)")
    parser.add_argument("--tol", default=default(None), help="root tolerance, e.g. 2^-64 or 1/1000")
    parser.add_argument("--out", default=default("out"), help="output directory")
    parser.add_argument("--format", choices=FORMATS, default=default("json"))
    parser.add_argument("--no-timestamp", action="store_true", default=default(False))


def build_parser():
    p = _Parser(prog="bexp", description="Expansions in non-integer bases: certified tools.")
    p.add_argument("--version", action="version", version=f"bexp {__version__}")
    _global_options(p, suppress=False)
    common = _Parser(add_help=False)
    _global_options(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub_add = sub.add_parser

    def add(name, **kw):
        return sub_add(name, parents=[common], **kw)

    sub.add_parser = add

    e = sub.add_parser("eval", help="certified value of a stream at a base")
    e.add_argument("stream")
    e.add_argument("--q", required=True)
    e.add_argument("--m", type=int, default=1)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("constants", help="G, q_f and q_KL per m")
    c.add_argument("m_range", nargs="?", default="1-4", help="m or lo-hi")
    c.set_defaults(func=cmd_constants, m=1)

    a = sub.add_parser("alpha", help="alpha(q) or beta(q) prefix and the base class")
    a.add_argument("--q", required=True)
    a.add_argument("--m", type=int, default=1)
    a.add_argument("--digits", type=int, default=32)
    a.add_argument("--kind", choices=("alpha", "beta"), default="alpha")
    a.set_defaults(func=cmd_alpha)

    b2 = sub.add_parser("b2", help="two-expansion certificates")
    b2sub = b2.add_subparsers(dest="b2_command", required=True, parser_class=_Parser)
    _with_common(b2sub, common)
    bc = b2sub.add_parser("certify")
    bc.add_argument("--m", type=int, required=True)
    bc.add_argument("--q", required=True)
    bc.add_argument("--c", required=True)
    bc.add_argument("--d", required=True)
    bc.set_defaults(func=cmd_b2_certify)
    bk = b2sub.add_parser("construct")
    bk.add_argument("--m", type=int, required=True)
    bk.add_argument("--word", required=True)
    bk.add_argument("--kind", choices=("V", "ubar", "accumulation"), default="V")
    bk.add_argument("--j", type=int, default=1)
    bk.add_argument("--ell", type=int, default=0)
    bk.add_argument("--alpha-p", default=None)
    bk.add_argument("--q", default=None)
    bk.set_defaults(func=cmd_b2_construct)
    bo = b2sub.add_parser("order")
    bo.add_argument("--m", type=int, required=True)
    bo.add_argument("--q-start", required=True)
    bo.add_argument("--pair", action="append", required=True, help="'c;d' stream literals")
    bo.set_defaults(func=cmd_b2_order)
    bs = b2sub.add_parser("search")
    bs.add_argument("--m", type=int, required=True)
    bs.add_argument("--q", required=True)
    bs.add_argument("--max-size", type=int, default=4)
    bs.set_defaults(func=cmd_b2_search)

    u = sub.add_parser("uniqlang", help="unique-expansion languages")
    usub = u.add_subparsers(dest="u_command", required=True, parser_class=_Parser)
    _with_common(usub, common)
    for name, func in (("check", cmd_uniqlang_check), ("enum", cmd_uniqlang_enum),
                       ("cross", cmd_uniqlang_cross)):
        sp = usub.add_parser(name)
        if name == "check":
            sp.add_argument("word")
        else:
            sp.add_argument("--length", type=int, default=8)
        if name == "cross":
            sp.add_argument("--q", default=None)
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--c0", default=None, help="generator word (first component if omitted)")
        sp.add_argument("--slice", default=None, help="'right' or a level >= 1")
        sp.set_defaults(func=func)

    v = sub.add_parser("verify", help="run the acceptance criteria and property groups")
    v.add_argument("--group", action="append", help="restrict to a group (repeatable)")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--seed", type=int, default=None)
    v.set_defaults(func=cmd_verify)
    return p


def _with_common(subparsers, common):
    plain = subparsers.add_parser

    def add(name, **kw):
        return plain(name, parents=[common], **kw)

    subparsers.add_parser = add


def _parse_tol(text):
    if text is None:
        return DEFAULT_TOL
    match = re.fullmatch(r"\s*2\^-(\d+)\s*", text)
    if match:
        return Fraction(1, 2 ** int(match.group(1)))
    return _fraction(text, text)


def config_from_args(args):
    precision = args.precision if args.precision is not None else _env_int("BEXP_PRECISION", 128)
    depth = args.depth if args.depth is not None else _env_int("BEXP_DEPTH", 64)
    return RunConfig(m=getattr(args, "m", 1), precision_bits=precision, depth=depth,
                     tol=_parse_tol(args.tol), out_dir=Path(args.out), format=args.format,
                     timestamp=not args.no_timestamp)


def _failure(exc, code):
    body = {"ok": False, "error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ParseError) and exc.position is not None:
        body["position"] = exc.position
    print(_dump(body))
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "seed", "absent") is None:
            from bexp.suite import DEFAULT_SEED
            args.seed = DEFAULT_SEED
        cfg = config_from_args(args)
        return args.func(args, cfg)
    except UndecidedAtDepth as exc:
        return _failure(exc, 4)
    except BexpError as exc:
        return _failure(exc, exc.exit_code)
    except ValueError as exc:
        # malformed arguments that slipped past the parser
        return _failure(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
