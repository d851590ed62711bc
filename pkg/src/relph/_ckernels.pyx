# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot kernels; mirrors ``relph._pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libc.math cimport INFINITY

cnp.import_array()


def rips_triangles(double[:, ::1] d, adj_in):
    cdef cnp.uint8_t[:, ::1] adj = np.ascontiguousarray(adj_in | adj_in.T, dtype=np.uint8)
    cdef Py_ssize_t n = d.shape[0], i, j, k
    cdef vector[long] tri
    cdef vector[double] val
    cdef double v
    for i in range(n):
        for j in range(i + 1, n):
            if not adj[i, j]:
                continue
            for k in range(j + 1, n):
                if adj[i, k] and adj[j, k]:
                    v = d[i, j]
                    if d[i, k] > v:
                        v = d[i, k]
                    if d[j, k] > v:
                        v = d[j, k]
                    tri.push_back(i)
                    tri.push_back(j)
                    tri.push_back(k)
                    val.push_back(v)
    cdef Py_ssize_t t = val.size()
    out_t = np.empty((t, 3), dtype=np.int64)
    out_v = np.empty(t, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] ot = out_t
    cdef double[::1] ov = out_v
    for i in range(t):
        ot[i, 0] = tri[3 * i]
        ot[i, 1] = tri[3 * i + 1]
        ot[i, 2] = tri[3 * i + 2]
        ov[i] = val[i]
    return out_t, out_v


def dowker_simplex_values(double[:, ::1] c):
    cdef Py_ssize_t n = c.shape[0], m = c.shape[1], i, j, k, v, e = 0, t = 0
    ev_arr = np.empty(n * (n - 1) // 2)
    tv_arr = np.empty(n * (n - 1) * (n - 2) // 6)
    cdef double[::1] ev = ev_arr
    cdef double[::1] tv = tv_arr
    cdef double[::1] pair = np.empty(m)
    cdef double best, x
    for i in range(n):
        for j in range(i + 1, n):
            best = INFINITY
            for v in range(m):
                x = c[i, v] if c[i, v] > c[j, v] else c[j, v]
                pair[v] = x
                if x < best:
                    best = x
            ev[e] = best
            e += 1
            for k in range(j + 1, n):
                best = INFINITY
                for v in range(m):
                    x = pair[v] if pair[v] > c[k, v] else c[k, v]
                    if x < best:
                        best = x
                tv[t] = best
                t += 1
    # triangles above were emitted in (i, j, k) lexicographic order, which is
    # combinations order; edges in (i, j) order, which is triu order
    return ev_arr, tv_arr


cdef void _xor_into(vector[long]& a, const vector[long]& b):
    """a <- a xor b for ascending sorted index vectors."""
    cdef vector[long] out
    cdef size_t i = 0, j = 0
    out.reserve(a.size() + b.size())
    while i < a.size() and j < b.size():
        if a[i] < b[j]:
            out.push_back(a[i]); i += 1
        elif b[j] < a[i]:
            out.push_back(b[j]); j += 1
        else:
            i += 1; j += 1
    while i < a.size():
        out.push_back(a[i]); i += 1
    while j < b.size():
        out.push_back(b[j]); j += 1
    a.swap(out)


def reduce_boundary(columns, dims, int max_dim):
    cdef Py_ssize_t n = len(columns), j, d
    cdef vector[vector[long]] cols
    cols.resize(n)
    cdef long r
    for j in range(n):
        for r in sorted(columns[j]):
            cols[j].push_back(r)
    cdef cnp.int64_t[::1] dim = np.asarray(dims, dtype=np.int64)
    low_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] low = low_arr
    cdef vector[long] pivot_of
    pivot_of.assign(n, -1)
    cdef vector[char] cleared
    cleared.assign(n, 0)
    cdef long piv, k
    for d in range(max_dim, 0, -1):
        for j in range(n):
            if dim[j] != d:
                continue
            if cleared[j]:
                cols[j].clear()
                continue
            while cols[j].size() > 0:
                piv = cols[j].back()
                k = pivot_of[piv]
                if k < 0:
                    break
                _xor_into(cols[j], cols[k])
            if cols[j].size() > 0:
                piv = cols[j].back()
                pivot_of[piv] = j
                low[j] = piv
                cleared[piv] = 1
    return low_arr


def linear_assignment(cost_in):
    cdef double[:, ::1] cost = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef Py_ssize_t n = cost.shape[0], i, j, j0, j1, i0
    cdef vector[double] u, v, minv
    cdef vector[long] p, way
    cdef vector[char] used
    u.assign(n + 1, 0.0)
    v.assign(n + 1, 0.0)
    p.assign(n + 1, 0)
    way.assign(n + 1, 0)
    cdef double delta, cur
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv.assign(n + 1, INFINITY)
        used.assign(n + 1, 0)
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INFINITY
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        assign[p[j] - 1] = j - 1
    return assign


def max_matching(adj_in):
    """Hopcroft-Karp maximum bipartite matching size."""
    cdef cnp.uint8_t[:, ::1] adj = np.ascontiguousarray(adj_in, dtype=np.uint8)
    cdef Py_ssize_t nl = adj.shape[0], nr = adj.shape[1], u, w, x, i, head, size = 0
    cdef vector[long] match_l, match_r, dist, queue, stack, it
    match_l.assign(nl, -1)
    match_r.assign(nr, -1)
    dist.assign(nl, 0)
    it.assign(nl, 0)
    cdef bint found
    cdef long INF = nl + nr + 5
    cdef long top, ww
    while True:
        # BFS layering from free left vertices
        queue.clear()
        for u in range(nl):
            if match_l[u] < 0:
                dist[u] = 0
                queue.push_back(u)
            else:
                dist[u] = INF
        found = False
        head = 0
        while head < <Py_ssize_t>queue.size():
            u = queue[head]
            head += 1
            for w in range(nr):
                if adj[u, w]:
                    x = match_r[w]
                    if x < 0:
                        found = True
                    elif dist[x] == INF:
                        dist[x] = dist[u] + 1
                        queue.push_back(x)
        if not found:
            break
        # iterative DFS along layers
        for u in range(nl):
            it[u] = 0
        for u in range(nl):
            if match_l[u] >= 0:
                continue
            stack.clear()
            stack.push_back(u)
            while stack.size() > 0:
                top = stack.back()
                ww = -1
                while it[top] < nr:
                    w = it[top]
                    it[top] += 1
                    if not adj[top, w]:
                        continue
                    x = match_r[w]
                    if x < 0 or dist[x] == dist[top] + 1:
                        ww = w
                        break
                if ww < 0:
                    dist[top] = INF
                    stack.pop_back()
                    continue
                x = match_r[ww]
                if x < 0:
                    # augment along the stack: stack[i] takes the column it last tried
                    for i in range(<Py_ssize_t>stack.size() - 1, -1, -1):
                        top = stack[i]
                        w = it[top] - 1
                        match_l[top] = w
                        match_r[w] = top
                    size += 1
                    stack.clear()
                    break
                stack.push_back(x)
    return size
