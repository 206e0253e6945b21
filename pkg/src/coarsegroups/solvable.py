"""Hirsch length and asymptotic-dimension intervals for solvable groups.

A series is trusted input: a bottom-up list of abelian quotients, each
either an explicit finite presentation or a declared rank with a free-text
justification.  ``asdim_bounds`` derives an interval whose trace is a tree
of rule applications over axiom leaves; ``replay`` re-evaluates that tree
bottom-up and must reproduce every stored interval.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .abelian import rank_and_torsion
from .groups import PresentedAbelian

__all__ = [
    "INF",
    "Infinity",
    "SeriesError",
    "TraceError",
    "Presented",
    "DeclaredRank",
    "Witness",
    "SeriesSpec",
    "Axiom",
    "TraceNode",
    "BoundInterval",
    "RULES",
    "hirsch_length",
    "asdim_bounds",
    "hurewicz_bound",
    "action_bound",
    "countable_sup",
    "replay",
    "series_from_json",
    "series_to_json",
    "bound_from_json",
]


@functools.total_ordering
class Infinity:
    """The bound value larger than every integer; absorbing under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("coarsegroups.INF")

    def __add__(self, other):
        return _total((self, other))

    __radd__ = __add__

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

Bound = Union[int, Infinity]


class SeriesError(ValueError):
    """Invalid series data or inconsistent declared witness."""


class TraceError(AssertionError):
    """A trace does not reproduce the interval it claims."""


def _check_value(v) -> Bound:
    if v is INF:
        return v
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SeriesError(f"bound values are nonnegative integers or INF, got {v!r}")
    return v


def _total(values: Iterable[Bound]) -> Bound:
    out: Bound = 0
    for v in values:
        _check_value(v)
        out = INF if v is INF or out is INF else out + v
    return out


def _encode(v: Bound):
    return "inf" if v is INF else v


def _decode(v) -> Bound:
    if v == "inf":
        return INF
    return _check_value(v)


# --- series data -----------------------------------------------------------


@dataclass(frozen=True)
class Presented:
    group: PresentedAbelian
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.group, PresentedAbelian):
            raise SeriesError("Presented quotients wrap a PresentedAbelian group")

    @property
    def rank(self) -> int:
        return rank_and_torsion(self.group).rank


@dataclass(frozen=True)
class DeclaredRank:
    rank: Bound
    torsion_only: bool = False
    justification: str = ""

    def __post_init__(self):
        _check_value(self.rank)
        if self.torsion_only and self.rank != 0:
            raise SeriesError("a torsion quotient has rank 0")


Quotient = Union[Presented, DeclaredRank]


@dataclass(frozen=True)
class Witness:
    """A free abelian subgroup of the given rank, declared to exist."""

    rank: int
    justification: str = ""

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 0:
            raise SeriesError("witness rank must be a nonnegative integer")


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    quotients: tuple[Quotient, ...] = ()
    polycyclic: bool = False
    abelian: bool = False
    witness: Witness | None = None

    def __post_init__(self):
        object.__setattr__(self, "quotients", tuple(self.quotients))
        for q in self.quotients:
            if not isinstance(q, (Presented, DeclaredRank)):
                raise SeriesError(f"quotients are Presented or DeclaredRank, got {type(q).__name__}")
        if self.polycyclic and not all(isinstance(q, Presented) for q in self.quotients):
            raise SeriesError("a polycyclic series needs every quotient presented")

    def concat(self, upper: "SeriesSpec", name: str | None = None) -> "SeriesSpec":
        """Series of an extension with this series at the bottom."""
        return SeriesSpec(
            name or f"{self.name}.{upper.name}",
            self.quotients + upper.quotients,
            polycyclic=self.polycyclic and upper.polycyclic,
        )


# --- traces ----------------------------------------------------------------

RULES = (
    "SUBGROUP_MONO",
    "HUREWICZ",
    "ACTION",
    "COUNTABLE_SUP",
    "ABELIAN_EXACT",
    "TORSION_ZERO",
    "SES_ADD",
    "HIRSCH_UB",
    "POLYCYCLIC_EQ",
)

AXIOMS = ("computed_rank", "declared_rank", "declared_torsion", "declared_witness", "declared_bound")


@dataclass(frozen=True)
class Axiom:
    kind: str
    value: Bound
    detail: str = ""

    def __post_init__(self):
        if self.kind not in AXIOMS:
            raise TraceError(f"unknown axiom kind {self.kind!r}")
        _check_value(self.value)

    def to_json(self) -> dict:
        return {"axiom": self.kind, "value": _encode(self.value), "detail": self.detail}


@dataclass(frozen=True)
class TraceNode:
    rule: str
    lower: Bound
    upper: Bound
    children: tuple = ()
    detail: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise TraceError(f"unknown rule {self.rule!r}")
        object.__setattr__(self, "children", tuple(self.children))

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "lower": _encode(self.lower),
            "upper": _encode(self.upper),
            "detail": self.detail,
            "children": [c.to_json() for c in self.children],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TraceNode | Axiom":
        if "axiom" in data:
            return Axiom(data["axiom"], _decode(data["value"]), data.get("detail", ""))
        return cls(
            data["rule"],
            _decode(data["lower"]),
            _decode(data["upper"]),
            tuple(cls.from_json(c) for c in data.get("children", ())),
            data.get("detail", ""),
        )


@dataclass(frozen=True)
class BoundInterval:
    lower: Bound
    upper: Bound
    trace: TraceNode
    name: str = ""

    def __post_init__(self):
        _check_value(self.lower)
        _check_value(self.upper)
        if self.lower is INF or self.upper < self.lower:
            raise SeriesError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def pair(self) -> tuple[Bound, Bound]:
        return self.lower, self.upper

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lower": _encode(self.lower),
            "upper": _encode(self.upper),
            "trace": self.trace.to_json(),
        }


def _node(rule, children, detail="") -> TraceNode:
    lo, up = _evaluate(rule, children, detail)
    return TraceNode(rule, lo, up, tuple(children), detail)


def _interval(child) -> tuple[Bound, Bound]:
    if isinstance(child, Axiom):
        raise TraceError("expected a rule node, found an axiom")
    return child.lower, child.upper


def _evaluate(rule: str, children: Sequence, detail: str) -> tuple[Bound, Bound]:
    """Interval produced by one rule application from its children."""
    axioms = [c for c in children if isinstance(c, Axiom)]
    nodes = [c for c in children if not isinstance(c, Axiom)]
    if rule in ("ABELIAN_EXACT", "TORSION_ZERO"):
        if len(children) != 1 or not axioms:
            raise TraceError(f"{rule} takes exactly one axiom")
        v = axioms[0].value
        if rule == "TORSION_ZERO":
            if axioms[0].kind != "declared_torsion" or v != 0:
                raise TraceError("TORSION_ZERO needs a declared torsion quotient")
            return 0, 0
        if axioms[0].kind not in ("computed_rank", "declared_rank", "declared_witness"):
            raise TraceError("ABELIAN_EXACT needs a rank axiom")
        # lower bounds stay finite; infinite rank only raises the upper end
        return (0 if v is INF else v), v
    if axioms and rule != "ACTION":
        raise TraceError(f"{rule} takes rule nodes only")
    if rule == "SES_ADD":
        return _total(c.lower for c in nodes), _total(c.upper for c in nodes)
    if rule == "HIRSCH_UB":
        for c in nodes:
            if c.rule not in ("ABELIAN_EXACT", "TORSION_ZERO"):
                raise TraceError("HIRSCH_UB sums quotient ranks")
        return 0, _total(c.upper for c in nodes)
    if rule == "POLYCYCLIC_EQ":
        if len(nodes) != 1 or nodes[0].rule != "HIRSCH_UB":
            raise TraceError("POLYCYCLIC_EQ applies to a Hirsch bound")
        h = nodes[0].upper
        return h, h
    if rule == "SUBGROUP_MONO":
        if len(nodes) != 2:
            raise TraceError("SUBGROUP_MONO takes a subgroup bound and an ambient bound")
        sub, amb = nodes
        lo = max(sub.lower, amb.lower)
        if amb.upper < lo:
            raise SeriesError(f"subgroup lower bound {lo} exceeds the upper bound {amb.upper}")
        return lo, amb.upper
    if rule == "HUREWICZ":
        if len(nodes) != 2:
            raise TraceError("HUREWICZ takes a kernel bound and a quotient bound")
        return 0, _total(c.upper for c in nodes)
    if rule == "ACTION":
        if len(axioms) != 1 or len(nodes) != 1:
            raise TraceError("ACTION takes a stabilizer axiom and a space bound")
        return 0, _total((axioms[0].value, nodes[0].upper))
    if rule == "COUNTABLE_SUP":
        if not nodes:
            return 0, (INF if detail == "unbounded" else 0)
        lo = max(c.lower for c in nodes)
        up = INF if detail == "unbounded" else max(c.upper for c in nodes)
        return lo, up
    raise TraceError(f"unknown rule {rule!r}")  # pragma: no cover - RULES is closed


def replay(trace: TraceNode) -> tuple[Bound, Bound]:
    """Re-derive a trace bottom-up; raises TraceError on any mismatch."""
    if isinstance(trace, Axiom):
        raise TraceError("a trace is rooted at a rule node")
    for c in trace.children:
        if not isinstance(c, Axiom):
            replay(c)
    got = _evaluate(trace.rule, trace.children, trace.detail)
    if got != (trace.lower, trace.upper):
        raise TraceError(
            f"{trace.rule} claims [{trace.lower}, {trace.upper}] but its children give [{got[0]}, {got[1]}]"
        )
    return got


# --- operations ------------------------------------------------------------


def _quotient_node(q: Quotient, index: int) -> TraceNode:
    if isinstance(q, Presented):
        tag = q.label or f"quotient {index}"
        return _node("ABELIAN_EXACT", [Axiom("computed_rank", q.rank, tag)], tag)
    if q.torsion_only:
        return _node("TORSION_ZERO", [Axiom("declared_torsion", 0, q.justification)], q.justification)
    return _node("ABELIAN_EXACT", [Axiom("declared_rank", q.rank, q.justification)], q.justification)


def hirsch_length(s: SeriesSpec) -> Bound:
    return _total(q.rank for q in s.quotients)


def asdim_bounds(s: SeriesSpec) -> BoundInterval:
    """Interval for the asymptotic dimension of the group carrying the series.

    Upper bound from the Hirsch length; equality for polycyclic series and
    for abelian groups (exact rank additivity); lower bound otherwise only
    from a declared free abelian witness.
    """
    parts = [_quotient_node(q, i) for i, q in enumerate(s.quotients)]
    if len(parts) == 1:
        node = parts[0]
    elif s.abelian:
        node = _node("SES_ADD", parts, s.name)
    else:
        node = _node("HIRSCH_UB", parts, s.name)
        if s.polycyclic:
            node = _node("POLYCYCLIC_EQ", [node], s.name)
    if s.witness is not None:
        w = s.witness
        if node.upper < w.rank:
            raise SeriesError(
                f"witness of rank {w.rank} is inconsistent with the upper bound {node.upper} for {s.name!r}"
            )
        sub = _node("ABELIAN_EXACT", [Axiom("declared_witness", w.rank, w.justification)], w.justification)
        node = _node("SUBGROUP_MONO", [sub, node], s.name)
    return BoundInterval(node.lower, node.upper, node, s.name)


def hurewicz_bound(ub_H: Bound, ub_K: Bound) -> Bound:
    """Upper bound for a group from bounds on a normal subgroup and its quotient."""
    return _total((ub_H, ub_K))


def action_bound(n: Bound, ub_X: Bound) -> Bound:
    """Upper bound from an R-stabilizer bound and a bound for the space acted on."""
    return _total((n, ub_X))


def countable_sup(bounds: Sequence[BoundInterval], unbounded: bool = False, name: str = "") -> BoundInterval:
    """Supremum over finitely generated subgroups.

    ``unbounded`` marks an infinite family whose upper bounds are not
    bounded; its supremum is INF whatever finite sample is passed.
    """
    node = _node("COUNTABLE_SUP", [b.trace for b in bounds], "unbounded" if unbounded else "")
    return BoundInterval(node.lower, node.upper, node, name)


# --- serialization ---------------------------------------------------------


def series_to_json(s: SeriesSpec) -> dict:
    qs = []
    for q in s.quotients:
        if isinstance(q, Presented):
            qs.append(
                {
                    "presented": {
                        "generators": q.group.generators,
                        "relations": [list(r) for r in q.group.relations],
                        "label": q.label,
                    }
                }
            )
        else:
            qs.append(
                {
                    "declared": {
                        "rank": _encode(q.rank),
                        "torsion_only": q.torsion_only,
                        "justification": q.justification,
                    }
                }
            )
    out = {"name": s.name, "quotients": qs, "polycyclic": s.polycyclic, "abelian": s.abelian}
    if s.witness is not None:
        out["witness"] = {"rank": s.witness.rank, "justification": s.witness.justification}
    return out


def series_from_json(data: dict | str) -> SeriesSpec:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise SeriesError("a series file is a JSON object")
    qs = []
    for q in data.get("quotients", []):
        if "presented" in q:
            p = q["presented"]
            group = PresentedAbelian(p["generators"], tuple(tuple(r) for r in p.get("relations", [])))
            qs.append(Presented(group, p.get("label", "")))
        elif "declared" in q:
            dd = q["declared"]
            qs.append(DeclaredRank(_decode(dd["rank"]), bool(dd.get("torsion_only", False)), dd.get("justification", "")))
        else:
            raise SeriesError(f"quotient entries are 'presented' or 'declared', got {sorted(q)}")
    w = data.get("witness")
    return SeriesSpec(
        data.get("name", ""),
        tuple(qs),
        polycyclic=bool(data.get("polycyclic", False)),
        abelian=bool(data.get("abelian", False)),
        witness=Witness(w["rank"], w.get("justification", "")) if w else None,
    )


def bound_from_json(data: dict | str) -> BoundInterval:
    if isinstance(data, str):
        data = json.loads(data)
    trace = TraceNode.from_json(data["trace"])
    return BoundInterval(_decode(data["lower"]), _decode(data["upper"]), trace, data.get("name", ""))
