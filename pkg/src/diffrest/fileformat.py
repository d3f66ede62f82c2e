"""Plain-text files for algebras, quotients and morphisms.

Every file starts with ``format 1`` and a ``kind`` line, followed by
header lines ``key value`` and bracketed sections.  Blank lines and lines
starting with ``#`` are ignored.  ``emit_*`` writes the canonical form, and
parsing a canonical file and emitting it again reproduces it byte for byte.

    format 1
    kind table            (or: concrete, quotient, morphism, homomorphism, poset)
    size 3
    [minus]
    0 0 0
    ...
    [restrict]
    ...
    [sigma compose 2]     (optional operator tables, rows of the last axis)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AbstractAlgebra, CompatibilityPoset
from .errors import ClosureError, ParseError
from .operators import OperatorTable, QuotientRelation, SignedAlgebra, SignedQuotient
from .pfun import ConcreteAlgebra, PartialFunction
from .setq import QuotientMorphism, SetQuotient

FORMAT_VERSION = 1
KINDS = ("table", "concrete", "quotient", "morphism", "homomorphism", "poset")


@dataclass
class _Line:
    number: int
    text: str
    indent: int

    def tokens(self) -> list[tuple[int, str]]:
        out, col = [], 0
        for tok in self.text.split():
            col = self.text.index(tok, col)
            out.append((self.indent + col + 1, tok))
            col += len(tok)
        return out


@dataclass
class _Section:
    name: str
    args: list[str]
    line: _Line
    body: list[_Line] = field(default_factory=list)


@dataclass
class _Document:
    kind: str
    header: dict[str, tuple[str, _Line]]
    sections: list[_Section]
    last_line: int

    def section(self, name: str, required: bool = True) -> _Section | None:
        found = [s for s in self.sections if s.name == name]
        if len(found) > 1:
            raise ParseError(f"duplicate section [{name}]", found[1].line.number, 1)
        if not found:
            if required:
                raise ParseError(f"missing section [{name}]", self.last_line, 1)
            return None
        return found[0]

    def header_int(self, key: str, required: bool = True) -> int | None:
        if key not in self.header:
            if required:
                raise ParseError(f"missing header '{key}'", self.last_line, 1)
            return None
        value, line = self.header[key]
        return _int(value, line, line.text.index(value) + 1 + line.indent)


def _int(tok: str, line: _Line, col: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line.number, col) from None
    return v


def _read(text: str, expect: tuple[str, ...]) -> _Document:
    lines = []
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append(_Line(i, stripped, len(raw) - len(raw.lstrip())))
    if not lines:
        raise ParseError("empty file", 1, 1)
    first = lines[0]
    if first.text.split() != ["format", str(FORMAT_VERSION)]:
        raise ParseError(f"first line must be 'format {FORMAT_VERSION}'", first.number, first.indent + 1)
    if len(lines) < 2 or lines[1].text.split()[0] != "kind" or len(lines[1].text.split()) != 2:
        where = lines[1] if len(lines) > 1 else first
        raise ParseError("second line must be 'kind <name>'", where.number, where.indent + 1)
    kind = lines[1].text.split()[1]
    if kind not in expect:
        raise ParseError(f"kind {kind!r} not accepted here (expected {', '.join(expect)})",
                         lines[1].number, lines[1].indent + 6)
    header: dict[str, tuple[str, _Line]] = {}
    sections: list[_Section] = []
    for line in lines[2:]:
        # "[name ...]" opens a section; "[]" and "[(0,1)]" are element lines
        if line.text[:2].rstrip("]")[1:].isalpha() and line.text.startswith("["):
            if not line.text.endswith("]"):
                raise ParseError("unterminated section header", line.number, line.indent + len(line.text))
            parts = line.text[1:-1].split()
            sections.append(_Section(parts[0], parts[1:], line))
        elif sections:
            sections[-1].body.append(line)
        else:
            parts = line.text.split()
            if len(parts) != 2:
                raise ParseError("header lines are 'key value'", line.number, line.indent + 1)
            if parts[0] in header:
                raise ParseError(f"duplicate header '{parts[0]}'", line.number, line.indent + 1)
            header[parts[0]] = (parts[1], line)
    return _Document(kind, header, sections, lines[-1].number)


def _int_rows(sec: _Section, width: int | None = None, allow_dash: bool = False) -> list[list[int | None]]:
    rows = []
    for line in sec.body:
        row: list[int | None] = []
        for col, tok in line.tokens():
            if allow_dash and tok == "-":
                row.append(None)
            else:
                row.append(_int(tok, line, col))
        if width is not None and len(row) != width:
            raise ParseError(f"[{sec.name}] row has {len(row)} entries, expected {width}", line.number, line.indent + 1)
        rows.append(row)
    return rows


def _matrix(sec: _Section, n: int) -> np.ndarray:
    rows = _int_rows(sec, n)
    if len(rows) != n:
        raise ParseError(f"[{sec.name}] has {len(rows)} rows, expected {n}", sec.line.number, 1)
    for line, row in zip(sec.body, rows):
        for (col, _), v in zip(line.tokens(), row):
            if not 0 <= v < n:
                raise ParseError(f"entry {v} outside 0..{n - 1}", line.number, col)
    return np.array(rows, dtype=np.int64).reshape(n, n)


def _sigma_args(sec: _Section) -> tuple[str, int]:
    if len(sec.args) != 2:
        raise ParseError("sigma sections are [sigma NAME ARITY]", sec.line.number, sec.line.indent + 1)
    return sec.args[0], _int(sec.args[1], sec.line, sec.line.indent + 1)


def _operator(sec: _Section, n: int) -> OperatorTable:
    name, arity = _sigma_args(sec)
    if arity < 0:
        raise ParseError("negative arity", sec.line.number, sec.line.indent + 1)
    width = n if arity else 1
    rows = _int_rows(sec, width)
    expected = n ** (arity - 1) if arity else 1
    if len(rows) != expected:
        raise ParseError(f"[sigma {name}] has {len(rows)} rows, expected {expected}", sec.line.number, 1)
    for line, row in zip(sec.body, rows):
        for (col, _), v in zip(line.tokens(), row):
            if not 0 <= v < n:
                raise ParseError(f"entry {v} outside 0..{n - 1}", line.number, col)
    return OperatorTable(name, arity, np.array(rows, dtype=np.int64).reshape((n,) * arity))


def _check_known(doc: _Document, sections: set[str], headers: set[str]) -> None:
    for key, (_, line) in doc.header.items():
        if key not in headers:
            raise ParseError(f"unknown header '{key}'", line.number, line.indent + 1)
    for s in doc.sections:
        if s.name not in sections:
            raise ParseError(f"unknown section [{s.name}]", s.line.number, s.line.indent + 1)


# ---------------------------------------------------------------- algebras

@dataclass(frozen=True)
class AlgebraFile:
    signed: SignedAlgebra
    concrete: ConcreteAlgebra | None = None

    @property
    def algebra(self) -> AbstractAlgebra:
        return self.signed.algebra


def parse_algebra(text: str) -> AlgebraFile:
    doc = _read(text, ("table", "concrete"))
    if doc.kind == "table":
        _check_known(doc, {"minus", "restrict", "sigma"}, {"size"})
        n = doc.header_int("size")
        if n < 1:
            raise ParseError("size must be positive", doc.header["size"][1].number, 1)
        alg = AbstractAlgebra(_matrix(doc.section("minus"), n), _matrix(doc.section("restrict"), n))
        concrete = None
    else:
        _check_known(doc, {"elements", "sigma"}, {"base"})
        base = doc.header_int("base")
        elems = []
        for line in doc.section("elements").body:
            try:
                f = PartialFunction.parse(line.text, base)
            except ValueError as e:
                raise ParseError(str(e), line.number, line.indent + 1) from None
            if f in elems:
                raise ParseError(f"duplicate element {f}", line.number, line.indent + 1)
            elems.append(f)
        concrete = ConcreteAlgebra.from_elements(elems, base_size=base)
        alg = concrete.abstract
        n = alg.size
    ops = tuple(_operator(s, n) for s in doc.sections if s.name == "sigma")
    try:
        signed = SignedAlgebra(alg, ops)
    except ValueError as e:
        raise ParseError(str(e), doc.last_line, 1) from None
    return AlgebraFile(signed, concrete)


def _emit_matrix(t: np.ndarray) -> list[str]:
    return [" ".join(str(int(v)) for v in row) for row in np.asarray(t)]


def _emit_operators(ops) -> list[str]:
    out = []
    for op in sorted(ops, key=lambda o: o.name):
        out.append(f"[sigma {op.name} {op.arity}]")
        if op.arity == 0:
            out.append(str(int(op.table)))
        else:
            out.extend(_emit_matrix(op.table.reshape(-1, op.table.shape[-1])))
    return out


def emit_algebra(A: AbstractAlgebra | SignedAlgebra | ConcreteAlgebra,
                 operators=(), concrete: ConcreteAlgebra | None = None) -> str:
    """Canonical text; concrete algebras list their elements, others their tables."""
    if isinstance(A, SignedAlgebra):
        operators = A.operators
        A = A.algebra
    if isinstance(A, ConcreteAlgebra):
        concrete = A
    out = [f"format {FORMAT_VERSION}"]
    if concrete is not None:
        out += ["kind concrete", f"base {concrete.base_size}", "[elements]"]
        out += [str(f) for f in concrete.elements]
    else:
        out += ["kind table", f"size {A.size}", "[minus]"] + _emit_matrix(A.minus)
        out += ["[restrict]"] + _emit_matrix(A.restrict)
    out += _emit_operators(operators)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- quotients

def _projection(sec: _Section) -> SetQuotient:
    rows = _int_rows(sec)
    flat = [v for row in rows for v in row]
    try:
        return SetQuotient(tuple(flat))
    except ValueError as e:
        line = sec.body[0] if sec.body else sec.line
        raise ParseError(f"invalid projection: {e}", line.number, line.indent + 1) from None


def _relation(sec: _Section, carrier: int) -> QuotientRelation:
    name, arity = _sigma_args(sec)
    rows = _int_rows(sec, arity + 1)
    for line, row in zip(sec.body, rows):
        for (col, _), v in zip(line.tokens(), row):
            if not 0 <= v < carrier:
                raise ParseError(f"point {v} outside the carrier", line.number, col)
    return QuotientRelation.of(name, arity, rows)


@dataclass(frozen=True)
class QuotientFile:
    signed: SignedQuotient

    @property
    def quotient(self) -> SetQuotient:
        return self.signed.quotient


def parse_quotient(text: str) -> QuotientFile:
    doc = _read(text, ("quotient",))
    _check_known(doc, {"projection", "sigma"}, set())
    pi = _projection(doc.section("projection"))
    rels = tuple(_relation(s, pi.carrier_size) for s in doc.sections if s.name == "sigma")
    try:
        return QuotientFile(SignedQuotient(pi, rels))
    except ValueError as e:
        raise ParseError(str(e), doc.last_line, 1) from None


def _emit_relations(rels) -> list[str]:
    out = []
    for r in sorted(rels, key=lambda r: r.name):
        out.append(f"[sigma {r.name} {r.arity}]")
        out += [" ".join(map(str, t)) for t in r.sorted_tuples()]
    return out


def emit_quotient(pi: SetQuotient | SignedQuotient) -> str:
    rels = ()
    if isinstance(pi, SignedQuotient):
        pi, rels = pi.quotient, pi.relations
    out = [f"format {FORMAT_VERSION}", "kind quotient", "[projection]", " ".join(map(str, pi.projection))]
    return "\n".join(out + _emit_relations(rels)) + "\n"


# ---------------------------------------------------------------- morphisms

def parse_morphism(text: str) -> QuotientMorphism:
    """A quotient morphism with its source and target projections inline."""
    doc = _read(text, ("morphism",))
    _check_known(doc, {"source", "target", "map"}, set())
    src, tgt = _projection(doc.section("source")), _projection(doc.section("target"))
    sec = doc.section("map")
    mapping = tuple(v for row in _int_rows(sec, allow_dash=True) for v in row)
    if len(mapping) != src.carrier_size:
        raise ParseError(f"[map] has {len(mapping)} entries, source carrier has {src.carrier_size}",
                         sec.line.number, 1)
    for y in mapping:
        if y is not None and not 0 <= y < tgt.carrier_size:
            raise ParseError(f"image {y} outside the target carrier", sec.line.number, 1)
    return QuotientMorphism(src, tgt, mapping)


def emit_morphism(phi: QuotientMorphism) -> str:
    out = [f"format {FORMAT_VERSION}", "kind morphism",
           "[source]", " ".join(map(str, phi.source.projection)),
           "[target]", " ".join(map(str, phi.target.projection)),
           "[map]", " ".join("-" if y is None else str(y) for y in phi.mapping)]
    return "\n".join(out) + "\n"


def parse_homomorphism_map(text: str) -> tuple[int, ...]:
    """The element map of an algebra homomorphism; source and target live in their own files."""
    doc = _read(text, ("homomorphism",))
    _check_known(doc, {"map"}, set())
    rows = _int_rows(doc.section("map"))
    return tuple(v for row in rows for v in row)


def emit_homomorphism_map(mapping) -> str:
    return f"format {FORMAT_VERSION}\nkind homomorphism\n[map]\n{' '.join(map(str, mapping))}\n"


# ---------------------------------------------------------------- posets

def _bool_matrix(sec: _Section, n: int) -> tuple[tuple[bool, ...], ...]:
    rows = _int_rows(sec, n)
    if len(rows) != n:
        raise ParseError(f"[{sec.name}] has {len(rows)} rows, expected {n}", sec.line.number, 1)
    for line, row in zip(sec.body, rows):
        for (col, _), v in zip(line.tokens(), row):
            if v not in (0, 1):
                raise ParseError("entries must be 0 or 1", line.number, col)
    return tuple(tuple(bool(v) for v in row) for row in rows)


def parse_poset(text: str) -> CompatibilityPoset:
    """``[leq]`` and ``[compat]`` as 0/1 matrices; the axioms are checked."""
    doc = _read(text, ("poset",))
    _check_known(doc, {"leq", "compat"}, {"size"})
    n = doc.header_int("size")
    P = CompatibilityPoset(_bool_matrix(doc.section("leq"), n), _bool_matrix(doc.section("compat"), n))
    rep = P.check()
    if not rep:
        raise ParseError(f"not a poset with a compatibility relation: {rep}", doc.last_line, 1)
    return P


def emit_poset(P: CompatibilityPoset) -> str:
    out = [f"format {FORMAT_VERSION}", "kind poset", f"size {P.size}", "[leq]"]
    out += [" ".join(str(int(v)) for v in row) for row in P.leq]
    out += ["[compat]"] + [" ".join(str(int(v)) for v in row) for row in P.compat]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- files

def load(path: str | Path):
    """Parse any supported file, dispatching on its ``kind`` line."""
    text = Path(path).read_text(encoding="utf-8")
    kind = _sniff_kind(text)
    if kind in ("table", "concrete"):
        return parse_algebra(text)
    if kind == "quotient":
        return parse_quotient(text)
    if kind == "morphism":
        return parse_morphism(text)
    if kind == "homomorphism":
        return parse_homomorphism_map(text)
    if kind == "poset":
        return parse_poset(text)
    raise ParseError(f"unknown kind {kind!r}", 2, 1)


def _sniff_kind(text: str) -> str:
    for line in itertools.islice((l.strip() for l in text.splitlines() if l.strip() and not l.strip().startswith("#")), 2):
        parts = line.split()
        if parts[0] == "kind" and len(parts) == 2:
            return parts[1]
    raise ParseError("missing 'kind' line", 2, 1)


__all__ = [
    "AlgebraFile", "QuotientFile", "ClosureError", "ParseError",
    "parse_algebra", "emit_algebra", "parse_quotient", "emit_quotient",
    "parse_morphism", "emit_morphism", "parse_homomorphism_map", "emit_homomorphism_map",
    "parse_poset", "emit_poset", "load",
]
