"""Versioned JSON documents for the command line.

Every document carries ``"format_version": "1"`` and a ``"type"`` tag. Loading
happens in two stages: the shape of the JSON is checked first (problems raise
:class:`ParseError` with a location), then objects are built, at which point the
domain validation of the owning module applies.
"""

from __future__ import annotations

import json
import sys
from typing import Any

from . import openmarkov as om
from . import opennet as on
from .exactlin import RationalMatrix, RationalSubspace, format_rational, to_rational
from .finset import FinFunction, FinSet
from .linrel import LinearRelation

FORMAT_VERSION = "1"

TYPES = ("generator", "open_markov", "open_net", "markov_morphism", "net_square",
         "linear_relation", "lump_result", "law_report")


class ParseError(ValueError):
    def __init__(self, path: str, location: str, message: str):
        self.path, self.location = path, location
        super().__init__(f"{path}: {location}: {message}")


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(path, "<file>", exc.strerror or str(exc)) from exc


def parse_json(text: str, path: str = "<input>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if not isinstance(data, dict):
        raise ParseError(path, "$", "top level must be an object")
    version = data.get("format_version", FORMAT_VERSION)
    if str(version) != FORMAT_VERSION:
        raise ParseError(path, "$.format_version", f"unsupported version {version!r}")
    return data


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


# -- shape checks -------------------------------------------------------------

class _Shape:
    def __init__(self, path: str):
        self.path = path

    def fail(self, loc: str, msg: str):
        raise ParseError(self.path, loc, msg)

    def get(self, obj: dict, key: str, loc: str):
        if not isinstance(obj, dict):
            self.fail(loc, "expected an object")
        if key not in obj:
            self.fail(f"{loc}.{key}", "missing field")
        return obj[key]

    def labels(self, x, loc: str) -> list[str]:
        if not isinstance(x, list) or not all(isinstance(s, str) for s in x):
            self.fail(loc, "expected a list of strings")
        if len(set(x)) != len(x):
            self.fail(loc, "labels must be distinct")
        return x

    def mapping(self, x, loc: str) -> dict:
        if not isinstance(x, dict) or not all(isinstance(v, str) for v in x.values()):
            self.fail(loc, "expected an object of string values")
        return x

    def rational(self, x, loc: str):
        try:
            return to_rational(x)
        except (TypeError, ValueError, ZeroDivisionError):
            self.fail(loc, f"not an exact rational: {x!r}")

    def matrix(self, x, loc: str) -> list[list]:
        if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
            self.fail(loc, "expected a list of rows")
        return [[self.rational(v, f"{loc}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)]

    def function(self, x, loc: str) -> FinFunction:
        dom = self.labels(self.get(x, "dom", loc), f"{loc}.dom")
        cod = self.labels(self.get(x, "cod", loc), f"{loc}.cod")
        return FinFunction(FinSet(dom), FinSet(cod), self.mapping(self.get(x, "map", loc), f"{loc}.map"))


def _generator(sh: _Shape, d: dict, loc: str) -> om.Generator:
    X = FinSet(sh.labels(sh.get(d, "states", loc), f"{loc}.states"))
    rows = sh.matrix(sh.get(d, "H", loc), f"{loc}.H")
    if any(len(r) != len(X) for r in rows) or len(rows) != len(X):
        raise om.ShapeMismatch(f"ShapeMismatch: H must be {len(X)}x{len(X)}")
    return om.Generator(X, RationalMatrix(rows, shape=(len(X), len(X))))


def _open_markov(sh: _Shape, d: dict, loc: str) -> om.OpenMarkov:
    gen = _generator(sh, d, loc)
    S = FinSet(sh.labels(sh.get(d, "inputs", loc), f"{loc}.inputs"))
    T = FinSet(sh.labels(sh.get(d, "outputs", loc), f"{loc}.outputs"))
    i = sh.mapping(sh.get(d, "i", loc), f"{loc}.i")
    o = sh.mapping(sh.get(d, "o", loc), f"{loc}.o")
    return om.OpenMarkov(S, T, gen, FinFunction(S, gen.states, i), FinFunction(T, gen.states, o))


def _open_net(sh: _Shape, d: dict, loc: str) -> on.OpenNet:
    dec = sh.get(d, "decoration", loc)
    for key in ("left_foot", "right_foot", "i", "o"):
        sh.get(d, key, loc)
    if "transitions" in dec:
        for k, t in enumerate(dec["transitions"]):
            for key in ("name", "src", "tgt", "rate"):
                sh.get(t, key, f"{loc}.decoration.transitions[{k}]")
    else:
        sh.get(dec, "nodes", f"{loc}.decoration")
        for k, e in enumerate(sh.get(dec, "edges", f"{loc}.decoration")):
            for key in ("name", "src", "tgt"):
                sh.get(e, key, f"{loc}.decoration.edges[{k}]")
    return on.OpenNet.from_json(d)


def _lumping(sh: _Shape, d: dict, states: FinSet, loc: str) -> FinFunction:
    """A coarse-graining ``p`` given either as ``"p"`` (a function document) or
    ``"lumping"`` (state -> block label, blocks ordered by first appearance)."""
    if "p" in d:
        return sh.function(d["p"], f"{loc}.p")
    table = sh.mapping(sh.get(d, "lumping", loc), f"{loc}.lumping")
    blocks = []
    for x in states:
        if x not in table:
            sh.fail(f"{loc}.lumping", f"no block given for state {x!r}")
        if table[x] not in blocks:
            blocks.append(table[x])
    return FinFunction(states, FinSet(blocks), table)


def load_document(data: dict, path: str = "<input>") -> tuple[str, Any]:
    """Return ``(type, value)``; documents without a tag are read as open Markov
    processes if they have ``"H"`` and as open nets if they have ``"decoration"``."""
    sh = _Shape(path)
    kind = data.get("type")
    if kind is None:
        kind = "open_markov" if "H" in data else "open_net" if "decoration" in data else None
    if kind not in TYPES:
        sh.fail("$.type", f"unknown document type {kind!r}")
    if kind == "generator":
        return kind, _generator(sh, data, "$")
    if kind == "open_markov":
        return kind, _open_markov(sh, data, "$")
    if kind == "open_net":
        return kind, _open_net(sh, data, "$")
    if kind == "linear_relation":
        m = sh.get(data, "dom_dim", "$")
        n = sh.get(data, "cod_dim", "$")
        basis = sh.matrix(sh.get(data, "basis", "$"), "$.basis")
        return kind, LinearRelation(m, n, RationalSubspace(m + n, basis))
    if kind == "markov_morphism":
        src = _open_markov(sh, sh.get(data, "source", "$"), "$.source")
        tgt = _open_markov(sh, sh.get(data, "target", "$"), "$.target")
        f, p, g = (sh.function(sh.get(data, k, "$"), f"$.{k}") for k in ("f", "p", "g"))
        return kind, om.MarkovMorphism(src, tgt, f, p, g)
    if kind == "net_square":
        src = _open_net(sh, sh.get(data, "source", "$"), "$.source")
        tgt = _open_net(sh, sh.get(data, "target", "$"), "$.target")
        f, g, vm, am = (sh.function(sh.get(data, k, "$"), f"$.{k}")
                        for k in ("f", "g", "vertex_map", "arrow_map"))
        return kind, on.NetSquare(src, tgt, f, g, vm, am)
    if kind == "lump_result":
        gen = _generator(sh, sh.get(data, "generator", "$"), "$.generator")
        sec = sh.get(data, "section", "$")
        p = sh.function(sh.get(sec, "p", "$.section"), "$.section.p")
        s = RationalMatrix(sh.matrix(sh.get(sec, "matrix", "$.section"), "$.section.matrix"),
                           shape=(len(p.dom), len(p.cod)))
        return kind, (gen, p, s)
    sh.fail("$.type", f"{kind} documents are output only")


def load(path: str) -> tuple[str, Any, dict]:
    data = parse_json(read_text(path), path)
    kind, value = load_document(data, path)
    return kind, value, data


# -- emitters -----------------------------------------------------------------

def _doc(kind: str, body: dict) -> dict:
    return {"format_version": FORMAT_VERSION, "type": kind, **body}


def _fn(f: FinFunction) -> dict:
    return f.to_json()


def generator_doc(g: om.Generator) -> dict:
    return _doc("generator", {"states": g.states.to_json(), "H": g.H.to_json()})


def open_markov_doc(M: om.OpenMarkov) -> dict:
    return _doc("open_markov", M.to_json())


def open_net_doc(M: on.OpenNet) -> dict:
    return _doc("open_net", M.to_json())


def relation_doc(R: LinearRelation) -> dict:
    return _doc("linear_relation", R.to_json())


def markov_morphism_doc(m: om.MarkovMorphism) -> dict:
    return _doc("markov_morphism", {"source": m.source.to_json(), "target": m.target.to_json(),
                                    "f": _fn(m.f), "p": _fn(m.p), "g": _fn(m.g)})


def net_square_doc(sq: on.NetSquare) -> dict:
    return _doc("net_square", {"source": sq.source.to_json(), "target": sq.target.to_json(),
                               "f": _fn(sq.f), "g": _fn(sq.g),
                               "vertex_map": _fn(sq.vertex_map), "arrow_map": _fn(sq.arrow_map)})


def lump_doc(gen: om.Generator, p: FinFunction, s: RationalMatrix) -> dict:
    return _doc("lump_result", {"generator": {"states": gen.states.to_json(), "H": gen.H.to_json()},
                                "section": {"p": _fn(p), "matrix": s.to_json()}})


def report_doc(report) -> dict:
    return _doc("law_report", report.to_json())


def to_document(kind: str, value) -> dict:
    emit = {
        "generator": generator_doc,
        "open_markov": open_markov_doc,
        "open_net": open_net_doc,
        "linear_relation": relation_doc,
        "markov_morphism": markov_morphism_doc,
        "net_square": net_square_doc,
        "lump_result": lambda v: lump_doc(*v),
    }[kind]
    return emit(value)


__all__ = ["ParseError", "FORMAT_VERSION", "load", "load_document", "parse_json", "dumps",
           "to_document", "format_rational"]
