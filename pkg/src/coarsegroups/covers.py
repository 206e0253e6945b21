"""d-disjoint, R-bounded families of subsets and their verification.

Symbolic families live on Z^n with the unit l1 word metric:

* :class:`IntervalFamily` -- blocks [kP+o, kP+o+L) of Z
* :class:`PointFamily` -- the single point of Z^0
* :class:`ProductFamily` -- products of factor sets

:class:`ExplicitFamily` is a finite list of disjoint finite sets in any
group.  :func:`verify_families` checks a certificate pointwise on a ball
and, for symbolic families, against the closed forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Callable, ClassVar, Hashable, Sequence

from .abelian import LatticeQuotient
from .groups import FreeAbelian
from .metric import ExceedsCap, MetricContext, to_fraction

__all__ = [
    "CoverError",
    "IntervalFamily",
    "PointFamily",
    "ProductFamily",
    "ExplicitFamily",
    "CoverCertificate",
    "make_interval_cover",
    "point_cover",
    "product_cover",
    "VerifyReport",
    "verify_families",
    "SubgroupCover",
    "cyclic_subgroup_cover",
    "trivial_subgroup_cover",
    "ExtensionReport",
    "extend_cover_by_cosets",
]


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class IntervalFamily:
    length: int
    period: int
    offset: int = 0
    dims: ClassVar[int] = 1

    def __post_init__(self):
        if self.length < 1 or self.period <= self.length:
            raise CoverError("interval family needs 1 <= L < P")

    def set_of(self, x) -> int | None:
        k, m = divmod(x[0] - self.offset, self.period)
        return k if m < self.length else None

    def members(self, k: int) -> range:
        start = k * self.period + self.offset
        return range(start, start + self.length)

    @property
    def separation(self) -> int:
        """Distance between the closest points of two different blocks."""
        return self.period - self.length + 1

    @property
    def diameter(self) -> int:
        return self.length - 1


@dataclass(frozen=True)
class PointFamily:
    dims: ClassVar[int] = 0

    def set_of(self, x) -> int | None:
        return 0 if len(x) == 0 else None

    separation = None  # only one set
    diameter = 0


@dataclass(frozen=True)
class ProductFamily:
    factors: tuple

    @property
    def dims(self) -> int:
        return sum(f.dims for f in self.factors)

    def set_of(self, x):
        out, pos = [], 0
        for f in self.factors:
            k = f.set_of(x[pos : pos + f.dims])
            if k is None:
                return None
            out.append(k)
            pos += f.dims
        return tuple(out)

    @property
    def separation(self) -> int | None:
        seps = [f.separation for f in self.factors if f.separation is not None]
        return min(seps) if seps else None

    @property
    def diameter(self) -> int:
        return sum(f.diameter for f in self.factors)


@dataclass(frozen=True)
class ExplicitFamily:
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        seen: set = set()
        for s in self.sets:
            if not s:
                raise CoverError("explicit families cannot contain empty sets")
            if seen & s:
                raise CoverError("sets of an explicit family must be pairwise disjoint")
            seen |= s

    @cached_property
    def _index(self) -> dict:
        return {x: i for i, s in enumerate(self.sets) for x in s}

    def set_of(self, x) -> int | None:
        return self._index.get(x)

    separation = None
    diameter = None


def _is_symbolic(f) -> bool:
    return f.diameter is not None


@lru_cache(maxsize=None)
def _unit_context(n: int) -> MetricContext:
    return MetricContext.default(FreeAbelian(n))


@dataclass(frozen=True)
class CoverCertificate:
    d: Fraction
    R: Fraction
    families: tuple
    context: MetricContext | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "d", to_fraction(self.d))
        object.__setattr__(self, "R", to_fraction(self.R))
        object.__setattr__(self, "families", tuple(self.families))
        if self.d <= 0 or self.R < 0:
            raise CoverError("need d > 0 and R >= 0")
        if self.context is None:
            dims = {f.dims for f in self.families if _is_symbolic(f)}
            if len(dims) != 1 or not all(map(_is_symbolic, self.families)):
                raise CoverError("explicit families need a metric context")
            object.__setattr__(self, "context", _unit_context(dims.pop()))

    @property
    def symbolic(self) -> bool:
        return all(map(_is_symbolic, self.families))

    @property
    def dims(self) -> int:
        return self.families[0].dims


def make_interval_cover(d: int) -> CoverCertificate:
    """Two interleaved block families covering Z, d-disjoint with R = d."""
    if not isinstance(d, int) or d < 1:
        raise CoverError("d must be a positive integer")
    L = d + 1
    return CoverCertificate(d, d, (IntervalFamily(L, 2 * L, 0), IntervalFamily(L, 2 * L, L)))


def point_cover(d=1) -> CoverCertificate:
    """The trivial group Z^0: one family with its single point."""
    return CoverCertificate(d, 0, (PointFamily(),))


def product_cover(a: CoverCertificate, b: CoverCertificate) -> CoverCertificate:
    if not (a.symbolic and b.symbolic):
        raise CoverError("product_cover works on symbolic covers of Z^p and Z^q")
    fams = tuple(ProductFamily((fa, fb)) for fa in a.families for fb in b.families)
    return CoverCertificate(min(a.d, b.d), a.R + b.R, fams)


@dataclass
class VerifyReport:
    radius: Fraction
    points: int
    d: Fraction
    R: Fraction
    disjointness_violations: list = field(default_factory=list)
    loose_violations: int = 0
    max_diameter: Fraction = Fraction(0)
    bound_violations: list = field(default_factory=list)
    coverage_gaps: list = field(default_factory=list)
    min_separation: list = field(default_factory=list)
    family_diameters: list = field(default_factory=list)
    symbolic: list | None = None

    @property
    def symbolic_ok(self) -> bool | None:
        if self.symbolic is None:
            return None
        return all((s["separation"] is None or s["separation"] > self.d) and s["diameter"] <= self.R for s in self.symbolic)

    @property
    def pointwise_ok(self) -> bool:
        return not self.disjointness_violations and not self.bound_violations

    @property
    def agree(self) -> bool | None:
        return None if self.symbolic is None else self.symbolic_ok == self.pointwise_ok

    @property
    def ok(self) -> bool:
        return self.pointwise_ok and not self.coverage_gaps and self.symbolic_ok is not False


def _verify(ctx: MetricContext, d: Fraction, R: Fraction, families, region: Sequence, radius) -> VerifyReport:
    g = ctx.group
    rep = VerifyReport(radius, len(region), d, R)
    order = {x: i for i, x in enumerate(region)}
    covered: set = set()
    for fi, fam in enumerate(families):
        labels = {x: fam.set_of(x) for x in region}
        labels = {x: lab for x, lab in labels.items() if lab is not None}
        covered.update(labels)
        probe = d if fam.separation is None else max(d, Fraction(fam.separation))
        shell = [(z, nz) for z, nz in ctx.ball_with_norms(probe) if nz > 0]
        min_sep = None
        for x, lx in labels.items():
            ix = order[x]
            for z, nz in shell:
                y = g.mul(x, z)
                ly = labels.get(y)
                if ly is None or ly == lx or order[y] < ix:
                    continue
                if min_sep is None or nz < min_sep:
                    min_sep = nz
                if nz <= d:
                    rep.disjointness_violations.append((fi, x, y, nz))
                if nz < d:
                    rep.loose_violations += 1
        rep.min_separation.append(min_sep)
        groups: dict[Hashable, list] = {}
        for x, lab in labels.items():
            groups.setdefault(lab, []).append(x)
        fam_diam = Fraction(0)
        for lab, pts in groups.items():
            diam = _set_diameter(ctx, pts, R)
            fam_diam = max(fam_diam, diam)
            if diam > R:
                rep.bound_violations.append((fi, lab, diam))
        rep.family_diameters.append(fam_diam)
        rep.max_diameter = max(rep.max_diameter, fam_diam)
    rep.coverage_gaps = [x for x in region if x not in covered]
    rep.disjointness_violations.sort(key=lambda v: (v[0], order[v[1]], order[v[2]]))
    if all(map(_is_symbolic, families)):
        rep.symbolic = [
            {"separation": None if f.separation is None else Fraction(f.separation), "diameter": Fraction(f.diameter)}
            for f in families
        ]
    return rep


def _set_diameter(ctx: MetricContext, pts: Sequence, R: Fraction) -> Fraction:
    g = ctx.group
    cap = max(R, Fraction(1))
    best = Fraction(0)
    for i, x in enumerate(pts):
        xi = g.inv(x)
        for y in pts[i + 1 :]:
            z = g.mul(xi, y)
            v = ctx.norm(z, cap)
            if isinstance(v, ExceedsCap):
                v = ctx.norm_exact(z, start=cap)
            best = max(best, v)
    return best


def verify_families(cert: CoverCertificate, radius) -> VerifyReport:
    """Exhaustive check of a certificate on the closed ball of ``radius``.

    Two points of one family in different sets violate d-disjointness when
    their distance is <= d (the strict convention); ``loose_violations``
    counts only distances < d.  Sets are clipped to the ball.
    """
    radius = to_fraction(radius)
    ctx = cert.context
    region = ctx.ball(radius)
    return _verify(ctx, cert.d, cert.R, cert.families, region, radius)


# -- coset extension --------------------------------------------------------


@dataclass(frozen=True)
class SubgroupCover:
    """Cover of a subgroup F given by labels u -> (family, set key)."""

    n_families: int
    label: Callable[[Any], tuple[int, Hashable] | None]
    R: Fraction
    description: str = ""


def cyclic_subgroup_cover(ctx: MetricContext, generator, base: CoverCertificate) -> SubgroupCover:
    """Transport a symbolic cover of Z to the cyclic subgroup generated by ``generator``.

    Only torsion-free abelian groups without relations are supported, so
    that u = m * generator has a unique integer solution m.  The bound R is
    the exact diameter of one transported block in the metric of ``ctx``.
    """
    g = ctx.group
    g.check(generator)
    if not g.is_abelian or g.relation_rows():
        raise CoverError("cyclic_subgroup_cover needs a torsion-free abelian group without relations")
    if not base.symbolic or base.dims != 1:
        raise CoverError("base cover must be a symbolic cover of Z")
    tv = g.coords(generator)
    piv = next((i for i, v in enumerate(tv) if v), None)
    if piv is None:
        raise CoverError("generator must be nontrivial")

    def index(u):
        uv = g.coords(u)
        m, r = divmod(uv[piv], tv[piv])
        if r or any(a != m * b for a, b in zip(uv, tv)):
            return None
        return m

    def label(u):
        m = index(u)
        if m is None:
            return None
        for i, fam in enumerate(base.families):
            k = fam.set_of((m,))
            if k is not None:
                return i, k
        return None

    span = max(f.diameter for f in base.families)
    R = max((ctx.norm_exact(g.from_coords(tuple(m * v for v in tv))) for m in range(1, span + 1)), default=Fraction(0))
    return SubgroupCover(len(base.families), label, R, f"cover of <{g.format(generator)}> from {len(base.families)} Z-families")


def trivial_subgroup_cover(ctx: MetricContext) -> SubgroupCover:
    """One family holding the single point of F = {e}."""
    e = ctx.group.identity()
    return SubgroupCover(1, lambda u: (0, 0) if u == e else None, Fraction(0), "cover of the trivial subgroup")


@dataclass
class ExtensionReport:
    small_generators: list
    cosets: int
    representatives: list
    single_coset: bool
    trivial_subgroup: bool
    input_report: VerifyReport
    output_report: VerifyReport

    @property
    def ok(self) -> bool:
        return self.input_report.ok and self.output_report.ok


def extend_cover_by_cosets(
    ctx: MetricContext,
    d,
    fcover: SubgroupCover,
    radius,
) -> tuple[CoverCertificate, ExtensionReport]:
    """Translate a cover of F = <generators of weight < d> over all cosets of F.

    Every element x of the ball is written x = z u with z the least
    (norm, key) element of its coset; x goes to family i, set (z, s) when
    u carries the label (i, s).  Points of different cosets are more than
    d apart because a short path between them would consist of generators
    in F.  Coset keys come from lattice arithmetic, so the group must be
    abelian.
    """
    d = to_fraction(d)
    N = to_fraction(radius)
    if d <= 0:
        raise CoverError("d must be positive")
    g = ctx.group
    if not g.is_abelian:
        raise CoverError("coset decomposition is implemented for abelian groups only")
    T = [s for s, w in ctx.weights.entries if w < d]
    dim = g.abelian_dim()
    lattice = LatticeQuotient([g.coords(s) for s in T] + list(g.relation_rows()), dim)
    e_key = lattice.key(g.coords(g.identity()))

    def coset(x):
        return lattice.key(g.coords(x))

    region_F = [u for u in ctx.ball(N) if coset(u) == e_key]
    in_labels = [fcover.label(u) for u in region_F]
    in_fams = [_LabelFamily({u: lab[1] for u, lab in zip(region_F, in_labels) if lab and lab[0] == i}) for i in range(fcover.n_families)]
    input_report = _verify(ctx, d, fcover.R, in_fams, region_F, N)
    if not input_report.ok:
        raise CoverError(
            f"input cover of F fails at scale {d}: {len(input_report.disjointness_violations)} disjointness, "
            f"{len(input_report.bound_violations)} bound violations, {len(input_report.coverage_gaps)} gaps"
        )

    ball = ctx.ball(N)
    reps: dict = {}
    sets: list[dict] = [dict() for _ in range(fcover.n_families)]
    for x in ball:
        z = reps.setdefault(coset(x), x)
        lab = fcover.label(g.mul(g.inv(z), x))
        if lab is None:
            raise CoverError(f"subgroup cover does not label {g.format(g.mul(g.inv(z), x))}")
        i, s = lab
        sets[i].setdefault((g.key(z), s), []).append(x)
    families = tuple(ExplicitFamily(tuple(frozenset(v) for v in fam.values())) for fam in sets)
    cert = CoverCertificate(d, fcover.R, families, ctx)
    output_report = verify_families(cert, N)
    report = ExtensionReport(
        small_generators=T,
        cosets=len(reps),
        representatives=list(reps.values()),
        single_coset=lattice.rank == 0 and not lattice.torsion,
        trivial_subgroup=not T,
        input_report=input_report,
        output_report=output_report,
    )
    return cert, report


class _LabelFamily:
    """Family over a finite region given directly by a point -> set-label map."""

    separation = None
    diameter = None

    def __init__(self, labels: dict):
        self.labels = labels

    def set_of(self, x):
        return self.labels.get(x)
