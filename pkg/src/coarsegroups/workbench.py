"""Line-oriented workbench files.

A file is a list of named sections, each a block of ``key = value`` lines::

    # integer lattice with unit weights
    [group:Z2]
    kind = free_abelian
    rank = 2

    [weights:w1]
    group = Z2
    entries = (1,0):1, (0,1):1

Section kinds are group, weights, cover, series and hom.  Values are
';'-separated rows of ','-separated items; an item is an atom or a pair
``atom:atom``.  Atoms are integers, rationals ``p/q``, tuples ``(..)``,
free-group words ``[..]``, sets ``{..}``, double-quoted strings, ``inf``,
``true``/``false``, name references and calls ``name(..)``.  Everything
after an unquoted ``#`` is a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .covers import (
    CoverCertificate,
    ExplicitFamily,
    IntervalFamily,
    make_interval_cover,
    point_cover,
    product_cover,
)
from .groups import (
    DirectProduct,
    ElementError,
    Free,
    FreeAbelian,
    FiniteCyclic,
    Group,
    Heisenberg,
    Homomorphism,
    PresentedAbelian,
    RationalsTruncated,
)
from .metric import MetricContext, WeightFunction
from .solvable import INF, DeclaredRank, Presented, SeriesError, SeriesSpec, Witness

__all__ = [
    "ParseError",
    "Name",
    "Word",
    "SetLit",
    "Pair",
    "Call",
    "Section",
    "WorkbenchFile",
    "parse",
    "dump",
    "parse_value",
    "parse_element",
    "to_raw",
    "format_atom",
]

KINDS = ("group", "weights", "cover", "series", "hom")


class ParseError(ValueError):
    """Syntax error, unresolved reference or invariant violation in a workbench file."""

    def __init__(self, reason: str, line: int = 0, column: int = 0):
        self.reason = reason
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {reason}" if line else reason)


# --- value atoms -----------------------------------------------------------


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Word:
    letters: tuple


@dataclass(frozen=True)
class SetLit:
    items: tuple


@dataclass(frozen=True)
class Pair:
    left: Any
    right: Any


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_NUMBER = re.compile(r"-?\d+(?:/-?\d+)?")


class _Cursor:
    def __init__(self, text: str, line: int = 0, col0: int = 1):
        self.text = text
        self.pos = 0
        self.line = line
        self.col0 = col0

    def error(self, reason: str, pos: int | None = None) -> ParseError:
        p = self.pos if pos is None else pos
        return ParseError(reason, self.line, self.col0 + p)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        if self.pos >= len(self.text) or self.text[self.pos] == "#":
            return ""
        return self.text[self.pos]


    def atom(self):
        ch = self.peek()
        start = self.pos
        if not ch:
            raise self.error("expected a value")
        if ch == "-" or ch.isdigit():
            m = _NUMBER.match(self.text, self.pos)
            if not m:
                raise self.error("malformed number")
            self.pos = m.end()
            tok = m.group()
            if "/" in tok:
                p, q = tok.split("/")
                if int(q) == 0:
                    raise self.error("zero denominator", start)
                v = Fraction(int(p), int(q))
                return v.numerator if v.denominator == 1 else v
            return int(tok)
        if ch in "([{":
            close = {"(": ")", "[": "]", "{": "}"}[ch]
            self.pos += 1
            items = self.items(close)
            if ch == "(":
                return tuple(items)
            if ch == "[":
                for a in items:
                    if not isinstance(a, int) or isinstance(a, bool):
                        raise self.error("word letters are nonzero integers", start)
                return Word(tuple(items))
            return SetLit(tuple(items))
        if ch == '"':
            return self.string()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"unexpected character {ch!r}")
        self.pos = m.end()
        word = m.group()
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            self.pos += 1
            return Call(word, tuple(self.items(")")))
        if word == "true":
            return True
        if word == "false":
            return False
        if word == "inf":
            return INF
        return Name(word)

    def items(self, close: str) -> list:
        out: list = []
        if self.peek() == close:
            self.pos += 1
            return out
        while True:
            out.append(self.atom())
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == close:
                self.pos += 1
                return out
            raise self.error(f"expected ',' or {close!r}, found {ch or 'end of line'!r}")

    def string(self) -> str:
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] in '"\\':
                out.append(self.text[self.pos + 1])
                self.pos += 2
            elif ch == '"':
                self.pos += 1
                return "".join(out)
            else:
                out.append(ch)
                self.pos += 1
        raise self.error("unterminated string")

    def item(self):
        a = self.atom()
        if self.peek() == ":":
            self.pos += 1
            return Pair(a, self.atom())
        return a

    def value(self) -> tuple:
        if not self.peek():
            return ()
        rows, row = [], [self.item()]
        while True:
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                row.append(self.item())
            elif ch == ";":
                self.pos += 1
                rows.append(tuple(row))
                row = [self.item()]
            elif not ch:
                rows.append(tuple(row))
                return tuple(rows)
            else:
                raise self.error(f"expected ',' or ';', found {ch!r}")


def parse_value(text: str, line: int = 0, col0: int = 1) -> tuple:
    """Rows of items from a value string."""
    return _Cursor(text, line, col0).value()


def to_raw(atom):
    """Plain Python data for an element literal."""
    if isinstance(atom, Word):
        return list(atom.letters)
    if isinstance(atom, tuple):
        return tuple(to_raw(a) for a in atom)
    if isinstance(atom, (int, Fraction)) and not isinstance(atom, bool):
        return atom
    raise ElementError(f"{format_atom(atom)} is not an element literal")


def parse_element(text: str, group: Group):
    """Canonical element of ``group`` from a literal such as ``(3,4)`` or ``[1,-2]``."""
    cur = _Cursor(text, 0, 1)
    atom = cur.atom()
    if cur.peek():
        raise cur.error("trailing characters after the element")
    return group.coerce(to_raw(atom))


def format_atom(a) -> str:
    if isinstance(a, bool):
        return "true" if a else "false"
    if a is INF:
        return "inf"
    if isinstance(a, int):
        return str(a)
    if isinstance(a, Fraction):
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
    if isinstance(a, tuple):
        return "(" + ",".join(map(format_atom, a)) + ")"
    if isinstance(a, Word):
        return "[" + ",".join(map(format_atom, a.letters)) + "]"
    if isinstance(a, SetLit):
        return "{" + ",".join(map(format_atom, a.items)) + "}"
    if isinstance(a, Pair):
        return f"{format_atom(a.left)}:{format_atom(a.right)}"
    if isinstance(a, Call):
        return f"{a.name}(" + ", ".join(map(format_atom, a.args)) + ")"
    if isinstance(a, Name):
        return a.id
    if isinstance(a, str):
        return '"' + a.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot format {a!r}")


def _format_value(rows: tuple) -> str:
    return "; ".join(", ".join(format_atom(x) for x in row) for row in rows)


# --- sections --------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    kind: str
    name: str
    items: tuple
    line: int = field(default=0, compare=False)
    positions: dict = field(default_factory=dict, compare=False, hash=False)

    def get(self, key: str, default=None):
        for k, v in self.items:
            if k == key:
                return v
        return default

    def has(self, key: str) -> bool:
        return any(k == key for k, _ in self.items)

    def where(self, key: str | None = None) -> tuple[int, int]:
        return self.positions.get(key, (self.line, 1))


_HEADER = re.compile(r"\[\s*([A-Za-z_]+)\s*:\s*([A-Za-z_][A-Za-z0-9_.\-]*)\s*\]\s*(#.*)?$")
_KEYLINE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=")


def _split_sections(text: str) -> list[Section]:
    sections: list[Section] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise ParseError("malformed section header, expected [kind:name]", lineno, indent + 1)
            kind, name = m.group(1), m.group(2)
            if kind not in KINDS:
                raise ParseError(f"unknown section kind {kind!r}; expected one of {', '.join(KINDS)}", lineno, indent + 2)
            current = {"kind": kind, "name": name, "items": [], "line": lineno, "positions": {}}
            sections.append(current)
            continue
        m = _KEYLINE.match(stripped)
        if not m:
            raise ParseError("expected 'key = value'", lineno, indent + 1)
        if current is None:
            raise ParseError("key outside of any section", lineno, indent + 1)
        key = m.group(1)
        if key in current["positions"]:
            raise ParseError(f"duplicate key {key!r}", lineno, indent + 1)
        col0 = indent + m.end() + 1
        rest = stripped[m.end():]
        value = parse_value(rest, lineno, col0)
        current["items"].append((key, value))
        current["positions"][key] = (lineno, col0 + len(rest) - len(rest.lstrip()))
    out = []
    seen: dict[str, int] = {}
    for s in sections:
        if s["name"] in seen:
            raise ParseError(f"name {s['name']!r} already defined on line {seen[s['name']]}", s["line"], 1)
        seen[s["name"]] = s["line"]
        out.append(Section(s["kind"], s["name"], tuple(s["items"]), s["line"], s["positions"]))
    return out


# --- building --------------------------------------------------------------

_SCHEMA = {
    ("group", "free_abelian"): ({"rank"}, set()),
    ("group", "free"): ({"rank"}, set()),
    ("group", "cyclic"): ({"order"}, set()),
    ("group", "presented_abelian"): ({"generators"}, {"relations"}),
    ("group", "heisenberg"): (set(), set()),
    ("group", "product"): ({"factors"}, set()),
    ("group", "rationals"): ({"depth"}, set()),
    ("cover", "interval"): ({"d"}, set()),
    ("cover", "intervals"): ({"d", "R", "blocks"}, set()),
    ("cover", "point"): (set(), {"d"}),
    ("cover", "product"): ({"factors"}, set()),
    ("cover", "explicit"): ({"weights", "d", "R", "families"}, set()),
}
_PLAIN = {
    "weights": ({"group"}, {"entries", "weight", "symmetrize", "tail"}),
    "series": (set(), {"quotients", "polycyclic", "abelian", "witness"}),
    "hom": ({"source", "target"}, {"images"}),
}


class WorkbenchFile:
    """Parsed sections plus the objects they define, keyed by name."""

    def __init__(self, sections: list[Section]):
        self.sections = list(sections)
        self._by_name = {s.name: s for s in self.sections}
        self.groups: dict[str, Group] = {}
        self.weights: dict[str, WeightFunction] = {}
        self.covers: dict[str, CoverCertificate] = {}
        self.series: dict[str, SeriesSpec] = {}
        self.homs: dict[str, Homomorphism] = {}
        self._contexts: dict[str, MetricContext] = {}
        self._building: list[str] = []
        for s in self.sections:
            self._build(s.name)

    def __eq__(self, other):
        return isinstance(other, WorkbenchFile) and self.sections == other.sections

    def __repr__(self):
        return f"WorkbenchFile({[(s.kind, s.name) for s in self.sections]})"

    def context(self, weights_name: str) -> MetricContext:
        """Shared metric context for a weights section (caches grow across queries)."""
        if weights_name not in self.weights:
            raise KeyError(f"no weights section named {weights_name!r}")
        if weights_name not in self._contexts:
            self._contexts[weights_name] = MetricContext(self.weights[weights_name])
        return self._contexts[weights_name]

    def lookup(self, kind: str, name: str):
        table = {"group": self.groups, "weights": self.weights, "cover": self.covers, "series": self.series, "hom": self.homs}[kind]
        if name not in table:
            raise KeyError(f"no {kind} section named {name!r}")
        return table[name]

    # resolution

    def _build(self, name: str):
        s = self._by_name[name]
        table = {"group": self.groups, "weights": self.weights, "cover": self.covers, "series": self.series, "hom": self.homs}[s.kind]
        if name in table:
            return table[name]
        if name in self._building:
            cycle = " -> ".join(self._building[self._building.index(name):] + [name])
            raise ParseError(f"circular reference {cycle}", s.line, 1)
        self._building.append(name)
        try:
            obj = getattr(self, f"_build_{s.kind}")(s)
        finally:
            self._building.pop()
        table[name] = obj
        return obj

    def _ref(self, s: Section, key: str, kind: str, atom):
        line, col = s.where(key)
        if not isinstance(atom, Name):
            raise ParseError(f"{key}: expected a name, got {format_atom(atom)}", line, col)
        target = self._by_name.get(atom.id)
        if target is None:
            raise ParseError(f"unresolved reference {atom.id!r}", line, col)
        if target.kind != kind:
            raise ParseError(f"{atom.id!r} is a {target.kind} section, expected {kind}", line, col)
        return self._build(atom.id)

    def _check_keys(self, s: Section, required: set, optional: set, extra=("kind",)):
        allowed = required | optional | set(extra)
        for k, _ in s.items:
            if k not in allowed:
                raise ParseError(f"unknown key {k!r} in {s.kind} section", *s.where(k))
        missing = sorted(required - {k for k, _ in s.items})
        if missing:
            raise ParseError(f"{s.kind} section {s.name!r} is missing {', '.join(missing)}", s.line, 1)

    def _scalar(self, s: Section, key: str, types, default=None):
        if not s.has(key):
            return default
        v = s.get(key)
        if len(v) != 1 or len(v[0]) != 1:
            raise ParseError(f"{key}: expected a single value", *s.where(key))
        a = v[0][0]
        if not isinstance(a, types) or (isinstance(a, bool) and bool not in types):
            expected = "/".join(t.__name__ for t in types)
            raise ParseError(f"{key}: expected {expected}, got {format_atom(a)}", *s.where(key))
        return a

    def _row(self, s: Section, key: str) -> tuple:
        v = s.get(key, ())
        if len(v) > 1:
            raise ParseError(f"{key}: expected one ','-separated list, not ';'-separated rows", *s.where(key))
        return v[0] if v else ()

    def _kind(self, s: Section) -> str:
        k = self._scalar(s, "kind", (Name,))
        if k is None:
            raise ParseError(f"{s.kind} section {s.name!r} is missing kind", s.line, 1)
        if (s.kind, k.id) not in _SCHEMA:
            kinds = sorted(kk for sk, kk in _SCHEMA if sk == s.kind)
            raise ParseError(f"unknown {s.kind} kind {k.id!r}; expected one of {', '.join(kinds)}", *s.where("kind"))
        required, optional = _SCHEMA[(s.kind, k.id)]
        self._check_keys(s, required, optional)
        return k.id

    def _guard(self, s: Section, key: str | None, fn, *args):
        try:
            return fn(*args)
        except (ValueError, TypeError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(str(e), *s.where(key)) from None

    def _build_group(self, s: Section) -> Group:
        kind = self._kind(s)
        if kind in ("free_abelian", "free"):
            cls = FreeAbelian if kind == "free_abelian" else Free
            return self._guard(s, "rank", cls, self._scalar(s, "rank", (int,)))
        if kind == "cyclic":
            return self._guard(s, "order", FiniteCyclic, self._scalar(s, "order", (int,)))
        if kind == "rationals":
            return self._guard(s, "depth", RationalsTruncated, self._scalar(s, "depth", (int,)))
        if kind == "heisenberg":
            return Heisenberg()
        if kind == "product":
            factors = [self._ref(s, "factors", "group", a) for a in self._row(s, "factors")]
            return self._guard(s, "factors", DirectProduct, factors)
        n = self._scalar(s, "generators", (int,))
        rows = []
        for row in s.get("relations", ()):
            if not all(isinstance(a, int) and not isinstance(a, bool) for a in row):
                raise ParseError("relations: matrix entries must be integers", *s.where("relations"))
            rows.append(tuple(row))
        return self._guard(s, "relations", PresentedAbelian, n, tuple(rows))

    def _build_weights(self, s: Section) -> WeightFunction:
        self._check_keys(s, *_PLAIN["weights"], extra=())
        g = self._ref(s, "group", "group", self._scalar(s, "group", (Name,)))
        symmetrize = self._scalar(s, "symmetrize", (bool,), True)
        tail = self._scalar(s, "tail", (int, Fraction))
        if s.has("entries") and s.has("weight"):
            raise ParseError("give either entries or weight, not both", *s.where("weight"))
        if s.has("weight"):
            w = self._scalar(s, "weight", (int, Fraction))
            entries = [(x, w) for x, _ in g.default_generating_set()]
            return self._guard(s, "weight", WeightFunction, g, entries, symmetrize, tail)
        if s.has("entries"):
            entries = []
            for item in self._row(s, "entries"):
                if not isinstance(item, Pair) or not isinstance(item.right, (int, Fraction)) or isinstance(item.right, bool):
                    raise ParseError("entries: expected element:weight pairs", *s.where("entries"))
                entries.append((self._guard(s, "entries", lambda a: g.coerce(to_raw(a)), item.left), item.right))
            return self._guard(s, "entries", WeightFunction, g, entries, symmetrize, tail)
        wf = WeightFunction.default(g)
        if tail is not None:
            wf = self._guard(s, "tail", WeightFunction, g, wf.entries, True, tail)
        return wf

    def _build_cover(self, s: Section) -> CoverCertificate:
        kind = self._kind(s)
        if kind == "interval":
            return self._guard(s, "d", make_interval_cover, self._scalar(s, "d", (int,)))
        if kind == "point":
            return self._guard(s, "d", point_cover, self._scalar(s, "d", (int, Fraction), 1))
        if kind == "product":
            parts = [self._ref(s, "factors", "cover", a) for a in self._row(s, "factors")]
            if len(parts) < 2:
                raise ParseError("factors: a product needs at least two covers", *s.where("factors"))
            out = parts[0]
            for p in parts[1:]:
                out = self._guard(s, "factors", product_cover, out, p)
            return out
        d = self._scalar(s, "d", (int, Fraction))
        R = self._scalar(s, "R", (int, Fraction))
        if kind == "intervals":
            fams = []
            for b in self._row(s, "blocks"):
                if not (isinstance(b, tuple) and len(b) == 3 and all(isinstance(v, int) for v in b)):
                    raise ParseError("blocks: expected (length,period,offset) triples", *s.where("blocks"))
                fams.append(self._guard(s, "blocks", IntervalFamily, *b))
            return self._guard(s, "blocks", CoverCertificate, d, R, tuple(fams))
        wname = self._scalar(s, "weights", (Name,))
        self._ref(s, "weights", "weights", wname)
        ctx = self.context(wname.id)
        g = ctx.group
        fams = []
        for row in s.get("families", ()):
            sets = []
            for st in row:
                if not isinstance(st, SetLit):
                    raise ParseError("families: each family is a list of {..} sets", *s.where("families"))
                sets.append(frozenset(self._guard(s, "families", lambda a: g.coerce(to_raw(a)), x) for x in st.items))
            fams.append(self._guard(s, "families", ExplicitFamily, tuple(sets)))
        return self._guard(s, "families", CoverCertificate, d, R, tuple(fams), ctx)

    def _build_series(self, s: Section) -> SeriesSpec:
        self._check_keys(s, *_PLAIN["series"], extra=())
        qs = []
        for q in self._row(s, "quotients"):
            if isinstance(q, Name):
                g = self._ref(s, "quotients", "group", q)
                if not g.is_abelian:
                    raise ParseError(f"quotient {q.id!r} is not abelian", *s.where("quotients"))
                p = g if isinstance(g, PresentedAbelian) else self._guard(s, "quotients", g.abelian_presentation)
                qs.append(Presented(p, q.id))
            elif isinstance(q, Call) and q.name in ("declared", "torsion"):
                qs.append(self._guard(s, "quotients", _declared, q))
            else:
                raise ParseError(
                    "quotients: expected a group name, declared(rank, \"why\") or torsion(\"why\")", *s.where("quotients")
                )
        witness = None
        if s.has("witness"):
            row = self._row(s, "witness")
            if not row or not isinstance(row[0], int) or (len(row) > 1 and not isinstance(row[1], str)) or len(row) > 2:
                raise ParseError('witness: expected rank or rank, "justification"', *s.where("witness"))
            witness = self._guard(s, "witness", Witness, row[0], row[1] if len(row) > 1 else "")
        return self._guard(
            s,
            None,
            SeriesSpec,
            s.name,
            tuple(qs),
            self._scalar(s, "polycyclic", (bool,), False),
            self._scalar(s, "abelian", (bool,), False),
            witness,
        )

    def _build_hom(self, s: Section) -> Homomorphism:
        self._check_keys(s, *_PLAIN["hom"], extra=())
        src = self._ref(s, "source", "group", self._scalar(s, "source", (Name,)))
        dst = self._ref(s, "target", "group", self._scalar(s, "target", (Name,)))
        images = [self._guard(s, "images", lambda a: dst.coerce(to_raw(a)), a) for a in self._row(s, "images")]
        return self._guard(s, "images", Homomorphism, src, dst, tuple(images))


def _declared(call: Call):
    args = call.args
    if call.name == "torsion":
        if len(args) > 1 or (args and not isinstance(args[0], str)):
            raise SeriesError('torsion quotients are written torsion("justification")')
        return DeclaredRank(0, True, args[0] if args else "")
    if not args or len(args) > 2 or (len(args) == 2 and not isinstance(args[1], str)):
        raise SeriesError('declared quotients are written declared(rank, "justification")')
    return DeclaredRank(args[0], False, args[1] if len(args) > 1 else "")


def parse(text: str) -> WorkbenchFile:
    return WorkbenchFile(_split_sections(text))


def dump(wb: WorkbenchFile) -> str:
    """Canonical text; ``parse(dump(parse(t))) == parse(t)``."""
    blocks = []
    for s in wb.sections:
        lines = [f"[{s.kind}:{s.name}]"]
        lines += [f"{k} = {_format_value(v)}".rstrip() for k, v in s.items]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
