"""Batch front end: read JSON documents, run one operation, print JSON.

Exit status is 0 on success, 1 on a domain error (including a failed check),
and 2 when an input cannot be parsed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import io
from . import laws
from . import openmarkov as om
from . import opennet as on
from .exactlin import to_rational
from .finset import is_pullback, pushforward_matrix
from .linrel import is_rel_2morphism

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


class DomainError(Exception):
    pass


def _expect(path: str, kind: str, wanted: tuple[str, ...]) -> None:
    if kind not in wanted:
        raise io.ParseError(path, "$.type", f"expected {' or '.join(wanted)}, got {kind}")


def _pair(args, wanted=("open_markov", "open_net")):
    k1, a, _ = io.load(args.first)
    k2, b, _ = io.load(args.second)
    _expect(args.first, k1, wanted)
    _expect(args.second, k2, wanted)
    if k1 != k2:
        raise DomainError(f"cannot combine a {k1} with a {k2}")
    return k1, a, b


def cmd_validate(args):
    kind, value, _ = io.load(args.input)
    out = {"format_version": io.FORMAT_VERSION, "type": "validation", "document_type": kind, "valid": True}
    if kind == "markov_morphism" and not om.check_morphism(value):
        raise DomainError("InvalidMorphism: boundary squares are not pullbacks or p_* H != H' p_*")
    if kind == "net_square" and not on.check_net_square(value):
        raise DomainError("not a valid square of open nets")
    return out


def cmd_compose(args):
    kind, a, b = _pair(args)
    if kind == "open_markov":
        return io.open_markov_doc(om.compose_open(a, b))
    return io.open_net_doc(on.compose_open_net(a, b))


def cmd_tensor(args):
    kind, a, b = _pair(args)
    if kind == "open_markov":
        return io.open_markov_doc(om.tensor_open(a, b))
    return io.open_net_doc(on.tensor_open_net(a, b))


def cmd_blackbox(args):
    kind, M, _ = io.load(args.input)
    _expect(args.input, kind, ("open_markov",))
    return io.relation_doc(om.black_box(M))


def _generator_and_map(path: str):
    kind, value, data = io.load(path)
    _expect(path, kind, ("open_markov", "generator"))
    gen = value.gen if kind == "open_markov" else value
    p = io._lumping(io._Shape(path), data, gen.states, "$")
    return gen, p


def _parse_weights(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise io.ParseError("--fiber-weights", item, "expected state=weight")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = to_rational(v.strip())
        except (TypeError, ValueError, ZeroDivisionError):
            raise io.ParseError("--fiber-weights", k, f"not an exact rational: {v!r}") from None
    return out


def cmd_lump(args):
    gen, p = _generator_and_map(args.input)
    s = om.stochastic_section(p, _parse_weights(args.fiber_weights))
    lumped = om.lump(gen, p, s)
    doc = io.lump_doc(lumped, p, s)
    doc["lumpable"] = om.is_lumpable(gen, p)
    return doc


def cmd_check_lumpable(args):
    gen, p = _generator_and_map(args.input)
    ok = om.is_lumpable(gen, p)
    return {"format_version": io.FORMAT_VERSION, "type": "lumpability",
            "lumpable": ok, "pushforward": om.pushforward_generator(gen, p).to_json()}, ok


def cmd_check_morphism(args):
    kind, m, _ = io.load(args.input)
    _expect(args.input, kind, ("markov_morphism", "net_square"))
    if kind == "net_square":
        ok = on.check_net_square(m)
        return {"format_version": io.FORMAT_VERSION, "type": "check", "valid": ok}, ok
    squares = {}
    for name, sq in (("input_square", m.input_square()), ("output_square", m.output_square())):
        squares[name] = sq.commutes() and is_pullback(sq)
    P = pushforward_matrix(m.p)
    squares["intertwines"] = P @ m.source.H == m.target.H @ P
    ok = om.check_morphism(m)
    body = {"format_version": io.FORMAT_VERSION, "type": "check", "valid": ok, **squares}
    if args.blackbox:
        body["blackbox_contained"] = is_rel_2morphism(om.black_box_morphism(m))
    return body, ok


def cmd_iso(args):
    _, a, b = _pair(args, ("open_net",))
    sq = on.are_isomorphic(a, b)
    body = {"format_version": io.FORMAT_VERSION, "type": "iso", "isomorphic": sq is not None}
    if sq is not None:
        body["square"] = io.net_square_doc(sq)
    return body, sq is not None


def cmd_laws(args):
    names = list(laws.SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in laws.SUITES:
        raise DomainError(f"UnknownSuite: {args.suite}")
    reports = [laws.run_suite(n, args.seed, args.size_bound, args.cases) for n in names]
    ok = all(r.ok for r in reports)
    if len(reports) == 1:
        return io.report_doc(reports[0]), ok
    return {"format_version": io.FORMAT_VERSION, "type": "law_reports",
            "reports": [r.to_json() for r in reports]}, ok


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opencospan", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def one(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", help="JSON document, or - for stdin")
        p.set_defaults(fn=fn)
        return p

    def two(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("first")
        p.add_argument("second")
        p.set_defaults(fn=fn)
        return p

    one("validate", cmd_validate, "parse and validate a document")
    two("compose", cmd_compose, "compose two open Markov processes or open nets")
    two("tensor", cmd_tensor, "tensor two open Markov processes or open nets")
    one("blackbox", cmd_blackbox, "steady-state boundary relation of an open Markov process")
    lp = one("lump", cmd_lump, "lump a generator along a coarse-graining")
    lp.add_argument("--fiber-weights", help="section weights, e.g. b1=1/3,b2=2/3 (default uniform)")
    one("check-lumpable", cmd_check_lumpable, "test the lumpability condition")
    cm = one("check-morphism", cmd_check_morphism, "check a morphism of open Markov processes or a net square")
    cm.add_argument("--blackbox", action="store_true", help="also check black-box containment")
    two("iso", cmd_iso, "search for an isomorphism of open nets with the same feet")
    lw = sub.add_parser("laws", help="run a seeded law suite")
    lw.add_argument("suite", help="suite name or 'all'")
    lw.add_argument("--seed", type=int, default=0)
    lw.add_argument("--cases", type=int, default=100)
    lw.add_argument("--size-bound", type=int, default=6)
    lw.set_defaults(fn=cmd_laws)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        result = args.fn(args)
    except io.ParseError as exc:
        sys.stderr.write(f"ParseError: {exc}\n")
        return EXIT_PARSE
    except (DomainError, ValueError, KeyError, ZeroDivisionError) as exc:
        name = type(exc).__name__
        msg = str(exc)
        sys.stderr.write(msg if msg.startswith(name) else f"{name}: {msg}")
        sys.stderr.write("\n")
        sys.stdout.write(io.dumps({"format_version": io.FORMAT_VERSION, "type": "error",
                                   "error": name, "message": msg}) + "\n")
        return EXIT_DOMAIN
    ok = True
    if isinstance(result, tuple):
        result, ok = result
    sys.stdout.write(io.dumps(result) + "\n")
    return EXIT_OK if ok else EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
