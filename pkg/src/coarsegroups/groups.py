"""Group kinds, canonical element forms and homomorphisms.

Every element is stored in a canonical hashable form, so equality of
group elements is plain ``==``:

* free abelian, presented abelian: tuple of ints
* free: reduced tuple of signed 1-based generator indices
* finite cyclic: residue int
* Heisenberg: triple (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')
* direct product: tuple of factor elements
* truncated rationals: ``Fraction`` whose denominator divides K!
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, ClassVar, Sequence

from .abelian import IntegerMatrix, LatticeQuotient

__all__ = [
    "ElementError",
    "Group",
    "FreeAbelian",
    "Free",
    "FiniteCyclic",
    "PresentedAbelian",
    "Heisenberg",
    "DirectProduct",
    "RationalsTruncated",
    "Homomorphism",
    "multiply",
    "invert",
    "identity",
    "power",
    "apply_hom",
]


class ElementError(ValueError):
    """An element does not belong to the group it is used with."""


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


class Group:
    kind: ClassVar[str]

    # fast, unchecked group law used by the search code
    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def coerce(self, raw) -> Any:
        """Validate raw data and return the canonical element."""
        raise NotImplementedError

    def key(self, x):
        """Total-order sort key, used for deterministic tie-breaking."""
        return x

    def gens(self) -> list:
        """Generators of the standard presentation (images of a hom are given on these)."""
        raise NotImplementedError

    def default_generating_set(self) -> list[tuple[Any, Fraction]]:
        """Symmetric default weighted generating set."""
        out, seen = [], set()
        for g in self.gens():
            for s in (g, self.inv(g)):
                if s != self.identity() and s not in seen:
                    seen.add(s)
                    out.append((s, Fraction(1)))
        return out

    def evaluate(self, x, images: Sequence, target: "Group"):
        """Image of x under the hom sending generators() to images."""
        raise NotImplementedError

    def relation_problems(self, images: Sequence, target: "Group") -> list[str]:
        return []

    def format(self, x) -> str:
        return _format_raw(x)

    # abelian coordinates: x <-> integer vector modulo relation_rows()
    is_abelian: ClassVar[bool] = False

    def abelian_dim(self) -> int:
        raise TypeError(f"{self.kind} has no abelian coordinates")

    def coords(self, x) -> tuple[int, ...]:
        raise TypeError(f"{self.kind} has no abelian coordinates")

    def from_coords(self, v: Sequence[int]):
        raise TypeError(f"{self.kind} has no abelian coordinates")

    def relation_rows(self) -> list[tuple[int, ...]]:
        return []

    def abelian_presentation(self) -> "PresentedAbelian":
        if self.abelian_dim() == 0:
            return PresentedAbelian(1, ((1,),))
        return PresentedAbelian(self.abelian_dim(), tuple(self.relation_rows()))

    def check(self, x) -> None:
        try:
            ok = self.coerce(x) == x and type(self.coerce(x)) is type(x)
        except (ElementError, TypeError, ValueError):
            ok = False
        if not ok:
            raise ElementError(f"{x!r} is not a canonical element of {self}")

    def contains(self, x) -> bool:
        try:
            self.check(x)
        except ElementError:
            return False
        return True


def _commute_problems(images, target) -> list[str]:
    out = []
    for (i, a), (j, b) in combinations(enumerate(images), 2):
        if target.mul(a, b) != target.mul(b, a):
            out.append(f"images of generators {i + 1} and {j + 1} do not commute")
    return out


@dataclass(frozen=True)
class FreeAbelian(Group):
    rank: int
    kind: ClassVar[str] = "free_abelian"
    is_abelian: ClassVar[bool] = True

    def __post_init__(self):
        if not _is_int(self.rank) or self.rank < 0:
            raise ValueError("rank must be a nonnegative integer")

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def identity(self):
        return (0,) * self.rank

    def coerce(self, raw):
        if _is_int(raw) and self.rank == 1:
            raw = (raw,)
        if not isinstance(raw, (tuple, list)) or len(raw) != self.rank or not all(map(_is_int, raw)):
            raise ElementError(f"{raw!r} is not an integer vector of length {self.rank}")
        return tuple(raw)

    def gens(self):
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def evaluate(self, x, images, target):
        out = target.identity()
        for n, img in zip(x, images):
            out = target.mul(out, power(target, img, n))
        return out

    def relation_problems(self, images, target):
        return _commute_problems(images, target)

    def abelian_dim(self):
        return self.rank

    def coords(self, x):
        return x

    def from_coords(self, v):
        return tuple(v)


@dataclass(frozen=True)
class Free(Group):
    rank: int
    kind: ClassVar[str] = "free"

    def __post_init__(self):
        if not _is_int(self.rank) or self.rank < 0:
            raise ValueError("rank must be a nonnegative integer")

    def mul(self, x, y):
        k = 0
        n = min(len(x), len(y))
        while k < n and x[-1 - k] == -y[k]:
            k += 1
        return x[: len(x) - k] + y[k:]

    def inv(self, x):
        return tuple(-a for a in reversed(x))

    def identity(self):
        return ()

    def coerce(self, raw):
        if not isinstance(raw, (tuple, list)):
            raise ElementError(f"{raw!r} is not a word")
        out: list[int] = []
        for a in raw:
            if not _is_int(a) or a == 0 or abs(a) > self.rank:
                raise ElementError(f"bad letter {a!r} for a free group of rank {self.rank}")
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
        return tuple(out)

    def key(self, x):
        return (len(x), x)

    def gens(self):
        return [(i,) for i in range(1, self.rank + 1)]

    def evaluate(self, x, images, target):
        out = target.identity()
        for a in x:
            img = images[abs(a) - 1]
            out = target.mul(out, img if a > 0 else target.inv(img))
        return out

    def format(self, x):
        return "[" + ",".join(map(str, x)) + "]"


@dataclass(frozen=True)
class FiniteCyclic(Group):
    order: int
    kind: ClassVar[str] = "cyclic"
    is_abelian: ClassVar[bool] = True

    def __post_init__(self):
        if not _is_int(self.order) or self.order < 1:
            raise ValueError("order must be a positive integer")

    def mul(self, x, y):
        return (x + y) % self.order

    def inv(self, x):
        return -x % self.order

    def identity(self):
        return 0

    def coerce(self, raw):
        if isinstance(raw, (tuple, list)) and len(raw) == 1:
            raw = raw[0]
        if not _is_int(raw):
            raise ElementError(f"{raw!r} is not a residue")
        return raw % self.order

    def gens(self):
        return [1 % self.order]

    def evaluate(self, x, images, target):
        return power(target, images[0], x)

    def relation_problems(self, images, target):
        if power(target, images[0], self.order) != target.identity():
            return [f"image of the generator does not have order dividing {self.order}"]
        return []

    def abelian_dim(self):
        return 1

    def coords(self, x):
        return (x,)

    def from_coords(self, v):
        return v[0] % self.order

    def relation_rows(self):
        return [(self.order,)]


@dataclass(frozen=True)
class PresentedAbelian(Group):
    """Z^generators modulo the row lattice of ``relations``."""

    generators: int
    relations: tuple[tuple[int, ...], ...] = ()
    kind: ClassVar[str] = "presented_abelian"
    is_abelian: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        if not _is_int(self.generators) or self.generators < 1:
            raise ValueError("generator count must be a positive integer")
        for r in self.relations:
            if len(r) != self.generators:
                raise ValueError(f"relation {r} does not have {self.generators} columns")
            if not all(map(_is_int, r)):
                raise ValueError(f"relation {r} has non-integer entries")

    @cached_property
    def quotient(self) -> LatticeQuotient:
        return LatticeQuotient(self.relations, self.generators)

    def mul(self, x, y):
        return self.quotient.canonical([a + b for a, b in zip(x, y)])

    def inv(self, x):
        return self.quotient.canonical([-a for a in x])

    def identity(self):
        return self.quotient.canonical([0] * self.generators)

    def coerce(self, raw):
        if _is_int(raw) and self.generators == 1:
            raw = (raw,)
        if not isinstance(raw, (tuple, list)) or len(raw) != self.generators or not all(map(_is_int, raw)):
            raise ElementError(f"{raw!r} is not an integer vector of length {self.generators}")
        return self.quotient.canonical(raw)

    def gens(self):
        n = self.generators
        return [self.coerce(tuple(int(i == j) for j in range(n))) for i in range(n)]

    def evaluate(self, x, images, target):
        out = target.identity()
        for n, img in zip(x, images):
            out = target.mul(out, power(target, img, n))
        return out

    def relation_problems(self, images, target):
        out = _commute_problems(images, target)
        for r in self.relations:
            if self.evaluate(r, images, target) != target.identity():
                out.append(f"relation {r} does not map to the identity")
        return out

    def abelian_dim(self):
        return self.generators

    def coords(self, x):
        return x

    def from_coords(self, v):
        return self.coerce(tuple(v))

    def relation_rows(self):
        return list(self.relations)

    def abelian_presentation(self):
        return self



@dataclass(frozen=True)
class Heisenberg(Group):
    kind: ClassVar[str] = "heisenberg"

    def mul(self, x, y):
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1])

    def inv(self, x):
        return (-x[0], -x[1], -x[2] + x[0] * x[1])

    def identity(self):
        return (0, 0, 0)

    def coerce(self, raw):
        if not isinstance(raw, (tuple, list)) or len(raw) != 3 or not all(map(_is_int, raw)):
            raise ElementError(f"{raw!r} is not an integer triple")
        return tuple(raw)

    def gens(self):
        return [(1, 0, 0), (0, 1, 0)]

    def evaluate(self, x, images, target):
        # (a, b, c) = z^(c - ab) a^a b^b with z = [a, b] central
        A, B = images
        z = _commutator(target, A, B)
        a, b, c = x
        out = power(target, z, c - a * b)
        out = target.mul(out, power(target, A, a))
        return target.mul(out, power(target, B, b))

    def relation_problems(self, images, target):
        A, B = images
        z = _commutator(target, A, B)
        out = []
        for name, g in (("a", A), ("b", B)):
            if target.mul(z, g) != target.mul(g, z):
                out.append(f"commutator of images does not commute with image of {name}")
        return out


def _commutator(g: Group, x, y):
    return g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y)))


@dataclass(frozen=True)
class DirectProduct(Group):
    factors: tuple[Group, ...]
    kind: ClassVar[str] = "product"

    def __init__(self, factors: Sequence[Group]):
        object.__setattr__(self, "factors", tuple(factors))
        if not self.factors:
            raise ValueError("a direct product needs at least one factor")

    @property
    def is_abelian(self):  # type: ignore[override]
        return all(f.is_abelian for f in self.factors)

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def inv(self, x):
        return tuple(f.inv(a) for f, a in zip(self.factors, x))

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def coerce(self, raw):
        if not isinstance(raw, (tuple, list)) or len(raw) != len(self.factors):
            raise ElementError(f"{raw!r} is not a tuple of {len(self.factors)} factor elements")
        return tuple(f.coerce(a) for f, a in zip(self.factors, raw))

    def key(self, x):
        return tuple(f.key(a) for f, a in zip(self.factors, x))

    def _embed(self, i, g):
        e = list(self.identity())
        e[i] = g
        return tuple(e)

    def gens(self):
        return [self._embed(i, g) for i, f in enumerate(self.factors) for g in f.gens()]

    def default_generating_set(self):
        return [(self._embed(i, s), w) for i, f in enumerate(self.factors) for s, w in f.default_generating_set()]

    def _split(self, images):
        out, pos = [], 0
        for f in self.factors:
            n = len(f.gens())
            out.append(images[pos : pos + n])
            pos += n
        return out

    def evaluate(self, x, images, target):
        out = target.identity()
        for f, a, imgs in zip(self.factors, x, self._split(images)):
            out = target.mul(out, f.evaluate(a, imgs, target))
        return out

    def relation_problems(self, images, target):
        parts = self._split(images)
        out = []
        for f, imgs in zip(self.factors, parts):
            out.extend(f.relation_problems(imgs, target))
        for (i, p), (j, q) in combinations(enumerate(parts), 2):
            for a in p:
                for b in q:
                    if target.mul(a, b) != target.mul(b, a):
                        out.append(f"images from factors {i + 1} and {j + 1} do not commute")
        return out

    def format(self, x):
        return "(" + ", ".join(f.format(a) for f, a in zip(self.factors, x)) + ")"

    def abelian_dim(self):
        return sum(f.abelian_dim() for f in self.factors)

    def coords(self, x):
        return tuple(c for f, a in zip(self.factors, x) for c in f.coords(a))

    def from_coords(self, v):
        out, pos = [], 0
        for f in self.factors:
            n = f.abelian_dim()
            out.append(f.from_coords(v[pos : pos + n]))
            pos += n
        return tuple(out)

    def relation_rows(self):
        rows, pos, total = [], 0, self.abelian_dim()
        for f in self.factors:
            n = f.abelian_dim()
            for r in f.relation_rows():
                rows.append((0,) * pos + tuple(r) + (0,) * (total - pos - n))
            pos += n
        return rows


@dataclass(frozen=True)
class RationalsTruncated(Group):
    """The subgroup of Q generated by 1/1!, 1/2!, ..., 1/K!."""

    depth: int
    kind: ClassVar[str] = "rationals"
    is_abelian: ClassVar[bool] = True

    def __post_init__(self):
        if not _is_int(self.depth) or self.depth < 1:
            raise ValueError("depth must be a positive integer")

    @cached_property
    def modulus(self) -> int:
        return math.factorial(self.depth)

    def mul(self, x, y):
        return x + y

    def inv(self, x):
        return -x

    def identity(self):
        return Fraction(0)

    def coerce(self, raw):
        if _is_int(raw):
            raw = Fraction(raw)
        if not isinstance(raw, Fraction):
            raise ElementError(f"{raw!r} is not a rational")
        if self.modulus % raw.denominator:
            raise ElementError(f"denominator of {raw} does not divide {self.depth}!")
        return raw

    def gens(self):
        return [Fraction(1, math.factorial(n)) for n in range(1, self.depth + 1)]

    def default_generating_set(self):
        out = []
        for n in range(1, self.depth + 1):
            g = Fraction(1, math.factorial(n))
            out += [(g, Fraction(n)), (-g, Fraction(n))]
        return out

    def evaluate(self, x, images, target):
        return power(target, images[-1], int(x * self.modulus))

    def relation_problems(self, images, target):
        out = _commute_problems(images, target)
        for n in range(1, self.depth):
            if images[n - 1] != power(target, images[n], n + 1):
                out.append(f"image of 1/{n}! is not {n + 1} times the image of 1/{n + 1}!")
        return out

    def format(self, x):
        return str(x)

    def abelian_dim(self):
        return 1

    def coords(self, x):
        return (int(x * self.modulus),)

    def from_coords(self, v):
        return Fraction(v[0], self.modulus)

    def cyclic_generator(self, elements: Sequence[Fraction]) -> tuple[Fraction, list[int]]:
        """Generator g of the subgroup spanned by ``elements`` with Bezout coefficients.

        Returns (g, coeffs) where g = sum(c_i * x_i) and every x_i is an
        integer multiple of g.  g is 0 for the trivial subgroup.
        """
        nums = [int(x * self.modulus) for x in elements]
        g, coeffs = 0, [0] * len(nums)
        for i, a in enumerate(nums):
            h, s, t = _ext_gcd(g, a)
            coeffs = [c * s for c in coeffs]
            coeffs[i] += t
            g = h
        return Fraction(g, self.modulus), coeffs


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def power(g: Group, x, n: int):
    if n < 0:
        x, n = g.inv(x), -n
    out, base = g.identity(), x
    while n:
        if n & 1:
            out = g.mul(out, base)
        base = g.mul(base, base)
        n >>= 1
    return out


def multiply(g: Group, x, y):
    g.check(x)
    g.check(y)
    return g.mul(x, y)


def invert(g: Group, x):
    g.check(x)
    return g.inv(x)


def identity(g: Group):
    return g.identity()


@dataclass(frozen=True)
class Homomorphism:
    source: Group
    target: Group
    images: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        gens = self.source.gens()
        if len(self.images) != len(gens):
            raise ValueError(f"expected {len(gens)} generator images, got {len(self.images)}")
        for img in self.images:
            self.target.check(img)
        problems = self.source.relation_problems(self.images, self.target)
        if problems:
            raise ValueError("not a homomorphism: " + "; ".join(problems))

    def __call__(self, x):
        return self.source.evaluate(x, self.images, self.target)

    def matrix(self) -> IntegerMatrix:
        """Integer matrix M with coords(f(x)) == coords(x) @ M modulo target relations."""
        n, m = self.source.abelian_dim(), self.target.abelian_dim()
        rows = []
        for i in range(n):
            x = self.source.from_coords(tuple(int(i == j) for j in range(n)))
            rows.append(self.target.coords(self(x)))
        return IntegerMatrix(n, m, tuple(rows))

    @classmethod
    def identity_map(cls, g: Group) -> "Homomorphism":
        return cls(g, g, tuple(g.gens()))


def apply_hom(h: Homomorphism, x):
    h.source.check(x)
    return h(x)


def _format_raw(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_format_raw(a) for a in x) + ")"
    return str(x)
