"""Weighted word metrics on the supported groups.

A :class:`WeightFunction` assigns positive rational weights to a symmetric
generating set; the induced norm of x is the least total weight of a
factorization of x.  :class:`MetricContext` evaluates it by a best-first
search from the identity over the implicit Cayley graph.  The search is
resumable: everything settled so far is kept, so balls and norms share one
monotonically growing cache.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Any, Iterable, Sequence

from .groups import Group, Homomorphism, RationalsTruncated

__all__ = [
    "ExceedsCap",
    "MetricError",
    "TruncationError",
    "WeightFunction",
    "MetricContext",
    "norm",
    "distance",
    "ball",
    "RhoRow",
    "rho_profile",
    "SandwichReport",
    "check_coarse_sandwich",
    "r_stabilizer",
    "to_fraction",
]


class MetricError(ValueError):
    pass


class TruncationError(MetricError):
    """A truncated generating set is too shallow for the requested radius."""


@dataclass(frozen=True)
class ExceedsCap:
    """Returned by capped queries when the exact value is larger than ``cap``."""

    cap: Fraction

    def __bool__(self):
        return False


def to_fraction(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("floating point values are not accepted; use ints, Fractions or 'p/q' strings")
    if isinstance(v, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(v)


class WeightFunction:
    """Symmetric positive weights on a finite generating set of ``group``.

    ``tail`` is a lower bound on the weight of every generator left out of
    a truncated generating set (only meaningful for truncated rationals);
    balls of radius above it are refused.
    """

    def __init__(
        self,
        group: Group,
        entries: Iterable[tuple[Any, Any]],
        symmetrize: bool = True,
        tail=None,
    ):
        self.group = group
        table: dict[Any, Fraction] = {}
        for raw, w in entries:
            s = group.coerce(raw)
            w = to_fraction(w)
            if w <= 0:
                raise MetricError("weights must be positive")
            if s == group.identity():
                raise MetricError("the identity cannot be a generator")
            if s in table and table[s] != w:
                raise MetricError(f"generator {group.format(s)} listed with two weights")
            table[s] = w
        for s, w in list(table.items()):
            si = group.inv(s)
            if si in table:
                if table[si] != w:
                    raise MetricError(
                        f"w(s^-1) != w(s) for s = {group.format(s)}: {table[si]} vs {w}"
                    )
            elif symmetrize:
                table[si] = w
            else:
                raise MetricError(f"inverse of {group.format(s)} missing and symmetrize is off")
        self.symmetrized = symmetrize
        self.entries: tuple[tuple[Any, Fraction], ...] = tuple(
            sorted(table.items(), key=lambda kv: group.key(kv[0]))
        )
        self.tail = None if tail is None else to_fraction(tail)
        if isinstance(group, RationalsTruncated):
            self._check_truncation(group)

    def _check_truncation(self, group: RationalsTruncated) -> None:
        by_index: dict[int, Fraction] = {}
        for s, w in self.entries:
            n = _factorial_index(abs(s))
            if n is None or n > group.depth:
                raise MetricError(f"{s} is not of the form +-1/n! with n <= {group.depth}")
            by_index[n] = w
        idx = sorted(by_index)
        if idx != list(range(1, len(idx) + 1)):
            raise MetricError("truncated weights must cover 1/1!, ..., 1/m! without gaps")
        ws = [by_index[n] for n in idx]
        if any(a >= b for a, b in zip(ws, ws[1:])):
            raise MetricError("weights on 1/n! must be strictly increasing in n")
        if self.tail is None:
            self.tail = ws[-1] if ws else Fraction(0)

    @classmethod
    def default(cls, group: Group) -> "WeightFunction":
        tail = None
        if isinstance(group, RationalsTruncated):
            tail = group.depth + 1  # the default rule w(1/n!) = n continues past K
        return cls(group, group.default_generating_set(), tail=tail)

    @property
    def min_weight(self) -> Fraction | None:
        return min((w for _, w in self.entries), default=None)

    def __repr__(self):
        body = ", ".join(f"{self.group.format(s)}:{w}" for s, w in self.entries)
        return f"WeightFunction({self.group!r}, [{body}])"


def _factorial_index(q: Fraction) -> int | None:
    if q.numerator != 1:
        return None
    n, f = 1, 1
    while f < q.denominator:
        n += 1
        f *= n
    return n if f == q.denominator else None


class MetricContext:
    """Group + weights + a resumable shortest-path cache from the identity."""

    def __init__(self, weights: WeightFunction):
        self.weights = weights
        self.group = weights.group
        self.scale = math.lcm(*(w.denominator for _, w in weights.entries)) if weights.entries else 1
        self._gens = [(s, int(w * self.scale)) for s, w in weights.entries]
        e = self.group.identity()
        self._settled: dict[Any, int] = {}
        self._best: dict[Any, int] = {e: 0}
        self._heap: list = [(0, self.group.key(e), e)]
        self._balls: dict[Fraction, tuple] = {}
        self._lock = threading.RLock()

    @classmethod
    def default(cls, group: Group) -> "MetricContext":
        return cls(WeightFunction.default(group))

    # -- search core -------------------------------------------------------
    def _limit(self, cap) -> int:
        return math.floor(to_fraction(cap) * self.scale)

    def _pop(self) -> None:
        heap, settled, best, g = self._heap, self._settled, self._best, self.group
        while heap:
            c, _, x = heappop(heap)
            if x in settled:
                continue
            settled[x] = c
            for s, w in self._gens:
                y = g.mul(x, s)
                cy = c + w
                if y not in settled and cy < best.get(y, cy + 1):
                    best[y] = cy
                    heappush(heap, (cy, g.key(y), y))
            return

    def _frontier(self) -> int | None:
        heap, settled = self._heap, self._settled
        while heap and heap[0][2] in settled:
            heappop(heap)
        return heap[0][0] if heap else None

    def _advance(self, limit: int) -> None:
        while True:
            f = self._frontier()
            if f is None or f > limit:
                return
            self._pop()

    def _norm_int(self, x, limit: int) -> int | None:
        with self._lock:
            settled = self._settled
            while x not in settled:
                f = self._frontier()
                if f is None or f > limit:
                    return None
                self._pop()
            c = settled[x]
            return c if c <= limit else None

    # -- public queries ----------------------------------------------------
    def norm(self, x, cap) -> Fraction | ExceedsCap:
        cap = to_fraction(cap)
        if cap <= 0:
            raise MetricError("cap must be positive")
        self.group.check(x)
        c = self._norm_int(x, self._limit(cap))
        return ExceedsCap(cap) if c is None else Fraction(c, self.scale)

    def distance(self, x, y, cap) -> Fraction | ExceedsCap:
        self.group.check(x)
        self.group.check(y)
        return self.norm(self.group.mul(self.group.inv(x), y), cap)

    def norm_exact(self, x, start=1, max_doublings: int = 64) -> Fraction:
        """Norm by repeatedly doubling the cap; for elements known to be reachable."""
        cap = to_fraction(start)
        for _ in range(max_doublings):
            v = self.norm(x, cap)
            if not isinstance(v, ExceedsCap):
                return v
            cap *= 2
        raise MetricError(f"{self.group.format(x)} not reached; is it in the generated subgroup?")

    def check_radius(self, r: Fraction) -> None:
        tail = self.weights.tail
        if isinstance(self.group, RationalsTruncated) and tail is not None and r > tail:
            raise TruncationError(
                f"radius {r} exceeds {tail}: generators of weight < {r} may be missing "
                f"from the depth-{self.group.depth} truncation"
            )

    def ball_with_norms(self, r) -> tuple[tuple[Any, Fraction], ...]:
        """Closed ball at the identity as (element, norm) pairs, sorted by (norm, key)."""
        r = to_fraction(r)
        if r < 0:
            raise MetricError("radius must be nonnegative")
        self.check_radius(r)
        with self._lock:
            if r not in self._balls:
                limit = self._limit(r)
                self._advance(limit)
                g = self.group
                items = [(c, g.key(x), x) for x, c in self._settled.items() if c <= limit]
                items.sort(key=lambda t: (t[0], t[1]))
                self._balls[r] = tuple((x, Fraction(c, self.scale)) for c, _, x in items)
            return self._balls[r]

    def ball(self, r) -> list:
        return [x for x, _ in self.ball_with_norms(r)]


def norm(ctx: MetricContext, x, cap):
    return ctx.norm(x, cap)


def distance(ctx: MetricContext, x, y, cap):
    return ctx.distance(x, y, cap)


def ball(ctx: MetricContext, r):
    return ctx.ball(r)


# -- coarse equivalence profiles ------------------------------------------


@dataclass(frozen=True)
class RhoRow:
    t: Fraction
    rho1: Fraction | None  # None: no element lies outside the open t-ball
    rho2: Fraction
    certified: bool


def _check_pair(ctx_d: MetricContext, ctx_dp: MetricContext, hom: Homomorphism | None):
    if hom is None:
        if ctx_d.group != ctx_dp.group:
            raise MetricError("contexts are over different groups; pass an inclusion homomorphism")
    elif hom.source != ctx_d.group or hom.target != ctx_dp.group:
        raise MetricError("homomorphism does not match the two contexts")


def lipschitz_constant(ctx_d: MetricContext, ctx_dp: MetricContext, hom: Homomorphism | None = None) -> Fraction:
    """max over d-generators s of |phi(s)|' / w(s); bounds d' by L * d."""
    phi = hom if hom is not None else (lambda x: x)
    return max(
        (ctx_dp.norm_exact(phi(s)) / w for s, w in ctx_d.weights.entries),
        default=Fraction(0),
    )


def rho_profile(
    ctx_d: MetricContext,
    ctx_dp: MetricContext,
    t_values: Sequence,
    search_radius,
    hom: Homomorphism | None = None,
) -> list[RhoRow]:
    """Distortion functions of the identity map (or of ``hom``).

    rho2(t) is the largest d'-norm on the closed d-ball of radius t;
    rho1(t) is the smallest d'-norm off the open d-ball of radius t,
    taken over the d-ball of ``search_radius``.  rho1 is certified when
    every element of d'-norm below it lies in the open t-ball, which makes
    the search-ball minimum the global one.  Certification is only
    attempted for two metrics on the same group.
    """
    _check_pair(ctx_d, ctx_dp, hom)
    S = to_fraction(search_radius)
    ts = [to_fraction(t) for t in t_values]
    if any(t > S or t < 0 for t in ts):
        raise MetricError("every t must lie in [0, search_radius]")
    phi = hom if hom is not None else (lambda x: x)
    L = lipschitz_constant(ctx_d, ctx_dp, hom)
    pts = ctx_d.ball_with_norms(S)
    dp = []
    for z, nz in pts:
        v = ctx_dp.norm(phi(z), max(L * nz, Fraction(1)))
        if isinstance(v, ExceedsCap):  # pragma: no cover - contradicts the Lipschitz bound
            raise MetricError("d' norm exceeded its Lipschitz bound")
        dp.append(v)
    rows = []
    for t in ts:
        inside = [v for (z, nz), v in zip(pts, dp) if nz <= t]
        outside = [v for (z, nz), v in zip(pts, dp) if nz >= t]
        rho2 = max(inside)
        rho1 = min(outside) if outside else None
        certified = hom is None and rho1 is not None and _rho1_certified(ctx_d, ctx_dp, t, rho1)
        rows.append(RhoRow(t, rho1, rho2, certified))
    return rows


def _rho1_certified(ctx_d: MetricContext, ctx_dp: MetricContext, t: Fraction, rho1: Fraction) -> bool:
    for y, ny in ctx_dp.ball_with_norms(rho1):
        if ny >= rho1:
            break
        if t == 0:
            return False
        nd = ctx_d.norm(y, t)
        if isinstance(nd, ExceedsCap) or nd >= t:
            return False
    return True


@dataclass
class SandwichReport:
    pairs_checked: int
    violations: list
    rho_certified: bool
    profile: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_coarse_sandwich(
    ctx_d: MetricContext,
    ctx_dp: MetricContext,
    verify_radius,
    hom: Homomorphism | None = None,
) -> SandwichReport:
    """Check rho1(d(x,y)) <= d'(x,y) <= rho2(d(x,y)) on all pairs of a d-ball."""
    _check_pair(ctx_d, ctx_dp, hom)
    N = to_fraction(verify_radius)
    phi = hom if hom is not None else (lambda x: x)
    g, gp = ctx_d.group, ctx_dp.group
    pts = ctx_d.ball(N)
    L = lipschitz_constant(ctx_d, ctx_dp, hom)
    cap_d = max(2 * N, Fraction(1))
    cap_dp = max(L * cap_d, Fraction(1))
    images = [phi(x) for x in pts]
    dists = {}
    for i, x in enumerate(pts):
        xi = g.inv(x)
        for j, y in enumerate(pts):
            dxy = ctx_d.norm(g.mul(xi, y), cap_d)
            dpxy = ctx_dp.norm(gp.mul(gp.inv(images[i]), images[j]), cap_dp)
            dists[i, j] = (dxy, dpxy)
    ts = sorted({v[0] for v in dists.values()})
    profile = rho_profile(ctx_d, ctx_dp, ts, cap_d, hom)
    by_t = {row.t: row for row in profile}
    violations = []
    for (i, j), (dxy, dpxy) in dists.items():
        row = by_t[dxy]
        lo = row.rho1 if row.rho1 is not None else Fraction(0)
        if not (lo <= dpxy <= row.rho2):
            violations.append((pts[i], pts[j], dxy, dpxy, row.rho1, row.rho2))
    return SandwichReport(len(dists), violations, all(r.certified for r in profile), profile)


def r_stabilizer(
    action: Homomorphism,
    ctx_H: MetricContext,
    x0,
    R,
    ctx_G: MetricContext,
    search_radius,
) -> list:
    """Elements g of the search ball of G with d_H(phi(g) x0, x0) <= R, in ball order."""
    if action.source != ctx_G.group or action.target != ctx_H.group:
        raise MetricError("action homomorphism does not match the contexts")
    R = to_fraction(R)
    if R < 0:
        raise MetricError("R must be nonnegative")
    H = ctx_H.group
    H.check(x0)
    x0i = H.inv(x0)
    out = []
    for g in ctx_G.ball(search_radius):
        moved = H.mul(x0i, H.mul(action(g), x0))
        if moved == H.identity():
            out.append(g)
        elif R > 0 and not isinstance(ctx_H.norm(moved, R), ExceedsCap):
            out.append(g)
    return out
