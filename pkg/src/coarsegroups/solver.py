"""Exact minimal-diameter cover search on finite metric tables.

Given points with exact pairwise distances, a family count k and a scale
d, find a k-coloring minimizing the largest diameter of a d-component.
The d-components of one color are d-disjoint sets, so a coloring of value
R is a set of k d-disjoint R-bounded families covering the points.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from . import _kernels
from .covers import CoverCertificate, ExplicitFamily
from .metric import ExceedsCap, MetricContext, to_fraction

__all__ = [
    "MetricTable",
    "SolveResult",
    "solve_min_diameter",
    "exhaustive_cover_oracle",
    "coloring_value",
    "witness_certificate",
    "load_instance",
    "dump_instance",
    "ORACLE_MAX_POINTS",
]

ORACLE_MAX_POINTS = 16


@dataclass(frozen=True)
class MetricTable:
    ids: tuple
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.ids)
        if len(self.dist) != n or any(len(r) != n for r in self.dist):
            raise ValueError("distance table must be n x n")
        for i in range(n):
            if self.dist[i][i] != 0:
                raise ValueError("distance of a point to itself must be 0")
            for j in range(i):
                if self.dist[i][j] != self.dist[j][i] or self.dist[i][j] <= 0:
                    raise ValueError("distances must be symmetric and positive off the diagonal")

    @property
    def n(self) -> int:
        return len(self.ids)

    @classmethod
    def from_upper(cls, ids: Sequence, upper: Sequence) -> "MetricTable":
        n = len(ids)
        if len(upper) != n * (n - 1) // 2:
            raise ValueError(f"expected {n * (n - 1) // 2} upper-triangular distances, got {len(upper)}")
        m = [[Fraction(0)] * n for _ in range(n)]
        it = iter(upper)
        for i in range(n):
            for j in range(i + 1, n):
                m[i][j] = m[j][i] = to_fraction(next(it))
        return cls(tuple(ids), tuple(map(tuple, m)))

    def upper(self) -> list[Fraction]:
        return [self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)]

    @classmethod
    def from_ball(cls, ctx: MetricContext, radius) -> "MetricTable":
        """Points of the closed ball, in ball order, with their exact distances."""
        r = to_fraction(radius)
        pts = ctx.ball(r)
        g = ctx.group
        cap = max(2 * r, Fraction(1))
        n = len(pts)
        m = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            xi = g.inv(pts[i])
            for j in range(i + 1, n):
                v = ctx.norm(g.mul(xi, pts[j]), cap)
                if isinstance(v, ExceedsCap):  # pragma: no cover - triangle inequality
                    raise AssertionError("ball points farther apart than twice the radius")
                m[i][j] = m[j][i] = v
        return cls(tuple(pts), tuple(map(tuple, m)))


@dataclass(frozen=True)
class SolveResult:
    r_star: Fraction
    exact: bool
    lower_bound: Fraction
    coloring: tuple[int, ...]
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "r_star": str(self.r_star),
            "exact": self.exact,
            "lower_bound": str(self.lower_bound),
            "coloring": list(self.coloring),
        }


def _scaled(table: MetricTable, d: Fraction) -> tuple[list[int], int, int]:
    scale = math.lcm(d.denominator, *(v.denominator for v in table.upper()))
    flat = [int(v * scale) for row in table.dist for v in row]
    return flat, int(d * scale), scale


def _prefixes(n: int, k: int) -> list[tuple[int, ...]]:
    """Normalized color prefixes used to split the search; independent of jobs."""
    depth, out = 0, [()]
    while depth < min(n, 6) and len(out) < 8:
        out = [p + (c,) for p in out for c in range(min(k, max(p, default=-1) + 2))]
        depth += 1
    return out


def clique_lower_bound(flat: Sequence[int], n: int, k: int, d: int, limit: int = 200_000) -> int:
    """Among k+1 points pairwise within d two share a color and a component."""
    if k >= n:
        return 0
    best = 0
    count = 0
    for combo in combinations(range(n), k + 1):
        count += 1
        if count > limit:
            break
        ok = True
        lo = None
        for a, b in combinations(combo, 2):
            v = flat[a * n + b]
            if v > d:
                ok = False
                break
            lo = v if lo is None else min(lo, v)
        if ok and lo is not None and lo > best:
            best = lo
    return best


def solve_min_diameter(
    points: MetricTable,
    k: int,
    d,
    budget: int = 10_000_000,
    jobs: int = 1,
    backend: str | None = None,
) -> SolveResult:
    """Branch and bound over colorings in point order.

    The search tree is split into fixed color prefixes; each prefix is
    searched independently (in a thread pool when ``jobs > 1``) starting
    from the greedy incumbent with ``ceil(budget / prefixes)`` nodes, so the
    answer and the witness do not depend on ``jobs``.  With every subtree
    complete the witness is the lexicographically first optimal coloring.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    d = to_fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    n = points.n
    if n == 0:
        return SolveResult(Fraction(0), True, Fraction(0), ())
    flat, dd, scale = _scaled(points, d)
    kernel = _kernels.get(backend)
    if kernel is not _kernels._bnb_py and max(flat) > _kernels.INT64_MAX:
        kernel = _kernels._bnb_py
    g_val, g_col = _kernels.greedy(flat, n, k, dd)
    lower = clique_lower_bound(flat, n, k, dd)
    prefixes = _prefixes(n, k)
    per = -(-budget // len(prefixes))

    def run(prefix):
        return kernel.search(flat, n, k, dd, prefix, g_val, per)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, prefixes))
    else:
        results = [run(p) for p in prefixes]
    exact = all(r[3] for r in results)
    nodes = sum(r[2] for r in results)
    found = [(r[0], r[1]) for r in results if r[1] is not None]
    if found:
        best_val = min(v for v, _ in found)
        best_col = next(c for v, c in found if v == best_val)
    else:  # budget ran out everywhere before reaching a leaf
        best_val, best_col = g_val, g_col
    if exact:
        lower = best_val
    return SolveResult(
        Fraction(best_val, scale),
        exact,
        Fraction(min(lower, best_val), scale),
        tuple(best_col),
        nodes,
    )


def coloring_value(points: MetricTable, coloring: Sequence[int], d) -> Fraction:
    """Largest d-component diameter of a coloring, computed from scratch."""
    d = to_fraction(d)
    n = points.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if coloring[i] == coloring[j] and points.dist[i][j] <= d:
                parent[find(i)] = find(j)
    best = Fraction(0)
    for i in range(n):
        for j in range(i + 1, n):
            if find(i) == find(j) and points.dist[i][j] > best:
                best = points.dist[i][j]
    return best


def exhaustive_cover_oracle(points: MetricTable, k: int, d) -> Fraction:
    """Minimal value by enumerating all k^n colorings (n <= 16)."""
    n = points.n
    if n > ORACLE_MAX_POINTS:
        raise ValueError(f"exhaustive oracle is capped at {ORACLE_MAX_POINTS} points, got {n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    d = to_fraction(d)
    if n == 0:
        return Fraction(0)
    close = [(i, j) for i in range(n) for j in range(i + 1, n) if points.dist[i][j] <= d]
    by_dist = sorted(
        ((points.dist[i][j], i, j) for i in range(n) for j in range(i + 1, n)),
        reverse=True,
    )
    best = None
    for col in product(range(k), repeat=n):
        parent = list(range(n))
        for i, j in close:
            if col[i] == col[j]:
                a, b = i, j
                while parent[a] != a:
                    a = parent[a]
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    parent[a] = b
        roots = []
        for i in range(n):
            a = i
            while parent[a] != a:
                a = parent[a]
            roots.append(a)
        value = next((v for v, i, j in by_dist if roots[i] == roots[j]), Fraction(0))
        if best is None or value < best:
            best = value
    return best


def witness_certificate(ctx: MetricContext, points: MetricTable, result: SolveResult, k: int, d) -> CoverCertificate:
    """Families (one per color) of d-components of the witness coloring."""
    d = to_fraction(d)
    n = points.n
    families = []
    for c in range(k):
        idx = [i for i in range(n) if result.coloring[i] == c]
        comps: list[list[int]] = []
        seen: set = set()
        for i in idx:
            if i in seen:
                continue
            stack, comp = [i], []
            seen.add(i)
            while stack:
                a = stack.pop()
                comp.append(a)
                for b in idx:
                    if b not in seen and points.dist[a][b] <= d:
                        seen.add(b)
                        stack.append(b)
            comps.append(comp)
        families.append(ExplicitFamily(tuple(frozenset(points.ids[i] for i in comp) for comp in comps)))
    return CoverCertificate(d, result.r_star, tuple(families), ctx)


def load_instance(data: dict | str) -> tuple[MetricTable, int, Fraction]:
    if isinstance(data, str):
        data = json.loads(data)
    ids = list(data["points"])
    table = MetricTable.from_upper(ids, [Fraction(v) for v in data["dist"]])
    k = data["k"]
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    return table, k, Fraction(str(data["d"]))


def dump_instance(table: MetricTable, k: int, d, ids=None) -> dict:
    return {
        "points": list(ids if ids is not None else table.ids),
        "dist": [str(v) for v in table.upper()],
        "k": k,
        "d": str(to_fraction(d)),
    }
