"""Exact integer linear algebra for finitely presented abelian groups.

Smith normal form with unimodular transforms, ranks over Q, integer
kernels, and lattice coset keys.  All arithmetic is on Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "IntegerMatrix",
    "SNFResult",
    "SNFCheckError",
    "smith_normal_form",
    "set_check_mode",
    "snf_call_count",
    "snf_verified_count",
    "check_mode",
    "rank_over_q",
    "left_kernel",
    "LatticeQuotient",
    "RankTorsion",
    "rank_and_torsion",
    "asdim_abelian",
    "SESReport",
    "ses_additivity_check",
]


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError(f"row {r} does not have {self.cols} columns")
            for v in r:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise TypeError(f"matrix entries must be integers, got {v!r}")

    @classmethod
    def of(cls, data: Sequence[Sequence[int]] | "IntegerMatrix", cols: int | None = None) -> "IntegerMatrix":
        if isinstance(data, IntegerMatrix):
            return data
        rows = tuple(tuple(int(v) if isinstance(v, str) else v for v in row) for row in data)
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_o = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols_o)
            for row in self.entries
        )
        return IntegerMatrix(self.rows, other.cols, out)

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def vecmul(self, v: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix."""
        if len(v) != self.rows:
            raise ValueError("vector length does not match row count")
        return tuple(sum(v[i] * self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == D`` with D diagonal and d1 | d2 | ... ."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix
    V_inv: IntegerMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D.entries[i][i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for v in self.diagonal if v != 0)

    def verify(self, A: IntegerMatrix) -> None:
        problems = []
        if self.U @ A @ self.V != self.D:
            problems.append("U*A*V != D")
        if abs(self.U.det()) != 1:
            problems.append("U is not unimodular")
        if abs(self.V.det()) != 1:
            problems.append("V is not unimodular")
        if self.V @ self.V_inv != IntegerMatrix.identity(self.V.rows):
            problems.append("V_inv is not the inverse of V")
        for i, row in enumerate(self.D.entries):
            for j, v in enumerate(row):
                if i != j and v != 0:
                    problems.append(f"off-diagonal entry at ({i},{j})")
        diag = self.diagonal
        if any(v < 0 for v in diag):
            problems.append("negative diagonal entry")
        for a, b in zip(diag, diag[1:]):
            if (a == 0 and b != 0) or (a != 0 and b % a != 0):
                problems.append(f"divisibility chain broken at {a} | {b}")
        if problems:
            raise SNFCheckError("; ".join(problems))


class SNFCheckError(AssertionError):
    pass


_check_mode = False
_calls = 0
_verified = 0


def set_check_mode(enabled: bool) -> None:
    """Verify every SNF postcondition exactly on each call (used by the test suite)."""
    global _check_mode
    _check_mode = enabled


def check_mode() -> bool:
    return _check_mode


def snf_call_count() -> int:
    return _calls


def snf_verified_count() -> int:
    """Calls whose postconditions were verified (check mode on)."""
    return _verified


def smith_normal_form(A: IntegerMatrix | Sequence[Sequence[int]]) -> SNFResult:
    global _calls, _verified
    A = IntegerMatrix.of(A)
    m, n = A.rows, A.cols
    D = [list(r) for r in A.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst += q * col src
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    t = 0
    while t < min(m, n):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i][j]
                    if v and (pivot is None or abs(v) < abs(D[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot[0] != t:
                swap_rows(t, pivot[0])
            if pivot[1] != t:
                swap_cols(t, pivot[1])
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            if any(D[i][t] for i in range(t + 1, m)) or any(D[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(D[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if pivot is None:
            break
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
        t += 1

    res = SNFResult(
        IntegerMatrix(m, m, tuple(map(tuple, U))),
        IntegerMatrix(m, n, tuple(map(tuple, D))),
        IntegerMatrix(n, n, tuple(map(tuple, V))),
        IntegerMatrix(n, n, tuple(map(tuple, Vi))),
    )
    _calls += 1
    if _check_mode:
        res.verify(A)
        _verified += 1
    return res


def rank_over_q(A: IntegerMatrix | Sequence[Sequence[int]], cols: int | None = None) -> int:
    A = IntegerMatrix.of(A, cols)
    if A.rows == 0 or A.cols == 0:
        return 0
    return smith_normal_form(A).rank


def left_kernel(A: IntegerMatrix) -> IntegerMatrix:
    """Basis (as rows) of the integer lattice {v : v @ A == 0}."""
    if A.rows == 0:
        return IntegerMatrix.zeros(0, 0)
    snf = smith_normal_form(A)
    r = snf.rank
    return IntegerMatrix(A.rows - r, A.rows, snf.U.entries[r:])


class LatticeQuotient:
    """Z^n modulo the row lattice of ``relations``, with canonical coset keys.

    In the coordinates y = x V the lattice becomes diag(d_1, ..., d_r) Z^r,
    so reducing y_i mod d_i gives a canonical key.
    """

    def __init__(self, relations: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self.relations = IntegerMatrix.of(relations, dim)
        if self.relations.rows and dim:
            self.snf = smith_normal_form(self.relations)
            self.V = self.snf.V
            self.V_inv = self.snf.V_inv
            self.diag = self.snf.diagonal[: self.snf.rank]
        else:
            self.snf = None
            self.V = self.V_inv = IntegerMatrix.identity(dim)
            self.diag = ()

    @property
    def rank(self) -> int:
        """Rank over Q of the quotient."""
        return self.dim - len(self.diag)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(v for v in self.diag if v > 1)

    def key(self, x: Sequence[int]) -> tuple[int, ...]:
        y = list(self.V.vecmul(x)) if self.snf else list(x)
        for i, dv in enumerate(self.diag):
            y[i] %= dv
        return tuple(y)

    def canonical(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative in the original coordinates."""
        if not self.diag:
            return tuple(x)
        return self.V_inv.vecmul(self.key(x))

    def contains(self, x: Sequence[int]) -> bool:
        return not any(self.key(x))


@dataclass(frozen=True)
class RankTorsion:
    rank: int
    torsion: tuple[int, ...]


def _presentation(p) -> tuple[int, IntegerMatrix]:
    # duck-typed on groups.PresentedAbelian to avoid a circular import
    n = p.generators
    return n, IntegerMatrix.of(p.relations, n)


def rank_and_torsion(p) -> RankTorsion:
    """Free rank (= dim_Q of A tensor Q) and invariant factors > 1."""
    n, R = _presentation(p)
    if R.rows == 0 or n == 0:
        return RankTorsion(n, ())
    diag = smith_normal_form(R).diagonal
    r = sum(1 for v in diag if v)
    return RankTorsion(n - r, tuple(v for v in diag if v > 1))


def asdim_abelian(p) -> int:
    """Asymptotic dimension of an abelian group is its rational rank."""
    return rank_and_torsion(p).rank


@dataclass(frozen=True)
class SESReport:
    rank_A: int
    rank_B: int
    rank_C: int
    additive: bool
    kernel: IntegerMatrix
    image_matrix: IntegerMatrix


def _stack(*mats: IntegerMatrix, cols: int) -> IntegerMatrix:
    rows = tuple(r for m in mats for r in m.entries)
    return IntegerMatrix(len(rows), cols, rows)


def ses_additivity_check(hom) -> SESReport:
    """Check rank additivity for 0 -> ker f -> A -> f(A) -> 0.

    ``hom`` maps a presented abelian group A = Z^n / R_A into a presented
    abelian group Z^m / R_T.  The kernel lattice is computed through the
    integer left kernel of [M; -R_T]; the image rank is computed
    separately as rank[M; R_T] - rank R_T, so additivity is a real check.
    """
    src, tgt = hom.source, hom.target
    if not (getattr(src, "kind", None) == "presented_abelian" and getattr(tgt, "kind", None) == "presented_abelian"):
        raise TypeError("ses_additivity_check needs a map between presented abelian groups")
    n, R_A = _presentation(src)
    m, R_T = _presentation(tgt)
    M = hom.matrix()
    neg_RT = IntegerMatrix(R_T.rows, m, tuple(tuple(-v for v in r) for r in R_T.entries))
    S = _stack(M, neg_RT, cols=m)
    if S.rows == 0:
        K = IntegerMatrix.zeros(0, n)
    elif m == 0:
        K = IntegerMatrix.identity(n)
    else:
        L = left_kernel(S)
        K = IntegerMatrix(L.rows, n, tuple(r[:n] for r in L.entries))
    rank_A = n - rank_over_q(R_A, n)
    rank_B = rank_over_q(K, n) - rank_over_q(R_A, n)
    rank_C = rank_over_q(_stack(M, R_T, cols=m), m) - rank_over_q(R_T, m)
    return SESReport(rank_A, rank_B, rank_C, rank_A == rank_B + rank_C, K, M)


def parse_matrix_rows(rows: Iterable[Sequence[int | str]], cols: int | None = None) -> IntegerMatrix:
    return IntegerMatrix.of([[int(v) for v in r] for r in rows], cols)
