"""Pure-Python branch-and-bound kernel for minimal-diameter colorings.

Distances are nonnegative ints (rationals pre-scaled by a common
denominator), stored row-major in a flat list of length n*n.

Points are colored in index order; point i may take colors
0..min(k-1, max_used+1) so each coloring is visited once up to renaming.
For each color the "sets" are d-components: classes of the transitive
closure of (same color, distance <= d).  Component diameters only grow
as points are added, so the running maximum is a valid lower bound.
"""
from __future__ import annotations

import sys


def _assign(dist, n, d, color, comp, cdiam, i, c):
    """Color point i with c; merge components.  Returns (new diameter, undo list)."""
    row = i * n
    merged = set()
    newd = 0
    for j in range(i):
        if color[j] == c and dist[row + j] <= d:
            lab = comp[j]
            if lab not in merged:
                merged.add(lab)
                if cdiam[lab] > newd:
                    newd = cdiam[lab]
    members = [j for j in range(i) if color[j] == c and comp[j] in merged]
    for a in members:
        if dist[row + a] > newd:
            newd = dist[row + a]
    for x in range(len(members)):
        a = members[x]
        ca, ra = comp[a], a * n
        for y in range(x + 1, len(members)):
            b = members[y]
            if comp[b] != ca and dist[ra + b] > newd:
                newd = dist[ra + b]
    undo = [(a, comp[a]) for a in members]
    for a in members:
        comp[a] = i
    comp[i] = i
    cdiam[i] = newd
    color[i] = c
    return newd, undo


def _unassign(color, comp, i, undo):
    for a, old in undo:
        comp[a] = old
    color[i] = -1


def greedy(dist, n, k, d):
    """First-fit coloring: each point takes the color with the least resulting
    objective, lowest color on ties."""
    color, comp, cdiam = [-1] * n, list(range(n)), [0] * n
    cur, maxc = 0, -1
    for i in range(n):
        best = None
        for c in range(min(k, maxc + 2)):
            v, undo = _assign(dist, n, d, color, comp, cdiam, i, c)
            v = max(cur, v)
            _unassign(color, comp, i, undo)
            if best is None or v < best[0]:
                best = (v, c)
        _assign(dist, n, d, color, comp, cdiam, i, best[1])
        cur = best[0]
        maxc = max(maxc, best[1])
    return cur, color


def search(dist, n, k, d, prefix, bound, budget):
    """Lexicographically first optimal coloring extending ``prefix``.

    Only colorings with objective <= ``bound`` are considered.  Returns
    (value, coloring, nodes, complete); value is -1 and coloring None when
    no such coloring exists below the prefix.
    """
    color, comp, cdiam = [-1] * n, list(range(n)), [0] * n
    cur, maxc = 0, -1
    for i, c in enumerate(prefix):
        if c > min(k - 1, maxc + 1):
            raise ValueError("prefix is not a normalized coloring")
        v, _ = _assign(dist, n, d, color, comp, cdiam, i, c)
        cur = max(cur, v)
        maxc = max(maxc, c)
    st = {"best": bound, "col": None, "nodes": 0, "aborted": False}
    if cur <= bound:
        old = sys.getrecursionlimit()
        if old < n + 100:
            sys.setrecursionlimit(n + 100)
        _dfs(dist, n, k, d, color, comp, cdiam, len(prefix), cur, maxc, st, budget)
    found = st["col"] is not None
    return (st["best"] if found else -1), st["col"], st["nodes"], not st["aborted"]


def _dfs(dist, n, k, d, color, comp, cdiam, i, cur, maxc, st, budget):
    if i == n:
        if st["col"] is None or cur < st["best"]:
            st["best"] = cur
            st["col"] = color[:]
        return
    st["nodes"] += 1
    if st["nodes"] > budget:
        st["aborted"] = True
        return
    for c in range(min(k, maxc + 2)):
        v, undo = _assign(dist, n, d, color, comp, cdiam, i, c)
        v = max(cur, v)
        if v < st["best"] or (v == st["best"] and st["col"] is None):
            _dfs(dist, n, k, d, color, comp, cdiam, i + 1, v, max(maxc, c), st, budget)
        _unassign(color, comp, i, undo)
        if st["aborted"]:
            return
