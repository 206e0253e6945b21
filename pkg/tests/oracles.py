"""Independent reference implementations used only by the tests.

None of these import the search or elimination code under test.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from fractions import Fraction
from itertools import combinations


def bfs_norms(steps, radius):
    """Unit-weight word lengths on Z by plain breadth-first search."""
    dist = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for s in steps:
            y = x + s
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def two_generator_norm(n, a, wa, b, wb, span=200):
    """min |i| wa + |j| wb over i a + j b = n, by direct enumeration of j."""
    best = None
    for j in range(-span, span + 1):
        r = n - j * b
        if r % a:
            continue
        v = abs(r // a) * wa + abs(j) * wb
        best = v if best is None or v < best else best
    return best


def heisenberg_matrix(a, b, c):
    return ((1, a, c), (0, 1, b), (0, 0, 1))


def matmul3(x, y):
    return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def heisenberg_bfs(radius):
    """Word lengths in the unitriangular model with generators a^{+-1}, b^{+-1}."""
    gens = [heisenberg_matrix(1, 0, 0), heisenberg_matrix(-1, 0, 0), heisenberg_matrix(0, 1, 0), heisenberg_matrix(0, -1, 0)]
    e = heisenberg_matrix(0, 0, 0)
    dist = {e: 0}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for s in gens:
            y = matmul3(x, s)
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return {(m[0][1], m[1][2], m[0][2]): v for m, v in dist.items()}


def dijkstra_norms(gens, radius, mul, identity):
    """Rational-weight norms up to ``radius`` with a textbook Dijkstra."""
    best = {identity: Fraction(0)}
    heap = [(Fraction(0), 0, identity)]
    counter = 1
    done = {}
    while heap:
        c, _, x = heapq.heappop(heap)
        if x in done:
            continue
        done[x] = c
        for s, w in gens:
            y = mul(x, s)
            nc = c + w
            if nc <= radius and (y not in best or nc < best[y]):
                best[y] = nc
                heapq.heappush(heap, (nc, counter, y))
                counter += 1
    return done


def rank_by_elimination(rows, ncols):
    """Rank over Q by Gaussian elimination on Fractions."""
    m = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _det(mat):
    n = len(mat)
    if n == 0:
        return 1
    m = [[Fraction(v) for v in r] for r in mat]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return int(det)


def invariant_factors(rows, ncols):
    """Diagonal of the Smith form from gcds of k x k minors (determinantal divisors)."""
    nrows = len(rows)
    out, prev = [], 1
    for k in range(1, min(nrows, ncols) + 1):
        g = 0
        for ri in combinations(range(nrows), k):
            for ci in combinations(range(ncols), k):
                g = math.gcd(g, _det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            out.extend([0] * (min(nrows, ncols) - k + 1))
            break
        out.append(g // prev)
        prev = g
    return out


def rational_gcd(values):
    """gcd of rationals, computed on integers after clearing denominators."""
    values = [Fraction(v) for v in values if v != 0]
    if not values:
        return Fraction(0)
    den = math.lcm(*(v.denominator for v in values))
    num = 0
    for v in values:
        num = math.gcd(num, int(v * den))
    return Fraction(num, den)
