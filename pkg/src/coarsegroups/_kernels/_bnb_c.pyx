# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled branch-and-bound kernel; same contract as ``_bnb_py.search``.

The depth-first search runs without the GIL so independent subtrees can
be searched from a thread pool.
"""
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef struct State:
    int n
    int k
    i64 d
    i64* dist
    int* color
    int* comp
    i64* cdiam
    int* mark
    int stamp
    int* members   # n*n: members merged at depth i
    int* oldcomp   # n*n: their previous labels
    int* nmem      # n
    i64 best
    int found
    int* best_col
    i64 nodes
    i64 budget
    int aborted


cdef i64 assign(State* s, int i, int c) noexcept nogil:
    cdef int n = s.n
    cdef int j, a, b, x, y, lab, m = 0
    cdef i64 newd = 0, v
    cdef i64* row = s.dist + <i64>i * n
    cdef int* mem = s.members + <i64>i * n
    cdef int* old = s.oldcomp + <i64>i * n
    s.stamp += 1
    for j in range(i):
        if s.color[j] == c and row[j] <= s.d:
            lab = s.comp[j]
            if s.mark[lab] != s.stamp:
                s.mark[lab] = s.stamp
                if s.cdiam[lab] > newd:
                    newd = s.cdiam[lab]
    for j in range(i):
        if s.color[j] == c and s.mark[s.comp[j]] == s.stamp:
            mem[m] = j
            m += 1
    for x in range(m):
        a = mem[x]
        if row[a] > newd:
            newd = row[a]
    for x in range(m):
        a = mem[x]
        for y in range(x + 1, m):
            b = mem[y]
            if s.comp[a] != s.comp[b]:
                v = s.dist[<i64>a * n + b]
                if v > newd:
                    newd = v
    for x in range(m):
        a = mem[x]
        old[x] = s.comp[a]
        s.comp[a] = i
    s.nmem[i] = m
    s.comp[i] = i
    s.cdiam[i] = newd
    s.color[i] = c
    return newd


cdef void unassign(State* s, int i) noexcept nogil:
    cdef int x
    cdef int n = s.n
    cdef int* mem = s.members + <i64>i * n
    cdef int* old = s.oldcomp + <i64>i * n
    for x in range(s.nmem[i]):
        s.comp[mem[x]] = old[x]
    s.color[i] = -1


cdef void dfs(State* s, int i, i64 cur, int maxc) noexcept nogil:
    cdef int c, j, top
    cdef i64 v
    if i == s.n:
        if not s.found or cur < s.best:
            s.best = cur
            s.found = 1
            for j in range(s.n):
                s.best_col[j] = s.color[j]
        return
    s.nodes += 1
    if s.nodes > s.budget:
        s.aborted = 1
        return
    top = maxc + 2
    if top > s.k:
        top = s.k
    for c in range(top):
        v = assign(s, i, c)
        if v < cur:
            v = cur
        if v < s.best or (v == s.best and not s.found):
            dfs(s, i + 1, v, c if c > maxc else maxc)
        unassign(s, i)
        if s.aborted:
            return


def search(dist, int n, int k, i64 d, prefix, i64 bound, i64 budget):
    cdef State s
    cdef int i, c, maxc = -1
    cdef i64 cur = 0, v
    cdef Py_ssize_t nn = <Py_ssize_t>n * n
    s.n = n
    s.k = k
    s.d = d
    s.dist = <i64*>malloc(max(nn, 1) * sizeof(i64))
    s.color = <int*>malloc(max(n, 1) * sizeof(int))
    s.comp = <int*>malloc(max(n, 1) * sizeof(int))
    s.cdiam = <i64*>malloc(max(n, 1) * sizeof(i64))
    s.mark = <int*>malloc(max(n, 1) * sizeof(int))
    s.members = <int*>malloc(max(nn, 1) * sizeof(int))
    s.oldcomp = <int*>malloc(max(nn, 1) * sizeof(int))
    s.nmem = <int*>malloc(max(n, 1) * sizeof(int))
    s.best_col = <int*>malloc(max(n, 1) * sizeof(int))
    if not (s.dist and s.color and s.comp and s.cdiam and s.mark and s.members
            and s.oldcomp and s.nmem and s.best_col):
        raise MemoryError()
    try:
        for i in range(nn):
            s.dist[i] = dist[i]
        for i in range(n):
            s.color[i] = -1
            s.comp[i] = i
            s.cdiam[i] = 0
            s.mark[i] = 0
            s.nmem[i] = 0
        s.stamp = 0
        s.best = bound
        s.found = 0
        s.nodes = 0
        s.budget = budget
        s.aborted = 0
        for i, c in enumerate(prefix):
            if c > min(k - 1, maxc + 1):
                raise ValueError("prefix is not a normalized coloring")
            v = assign(&s, i, c)
            if v > cur:
                cur = v
            if c > maxc:
                maxc = c
        if cur <= bound:
            i = len(prefix)
            with nogil:
                dfs(&s, i, cur, maxc)
        if s.found:
            col = [s.best_col[i] for i in range(n)]
            return s.best, col, s.nodes, not s.aborted
        return -1, None, s.nodes, not s.aborted
    finally:
        free(s.dist)
        free(s.color)
        free(s.comp)
        free(s.cdiam)
        free(s.mark)
        free(s.members)
        free(s.oldcomp)
        free(s.nmem)
        free(s.best_col)
