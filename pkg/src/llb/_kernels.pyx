# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _inv_mod(int64_t a, int64_t p):
    cdef int64_t t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rank_mod_p(cnp.ndarray A_in, int64_t p):
    """Rank of an integer matrix over GF(p); p < 2**31."""
    cdef cnp.ndarray[int64_t, ndim=2] A = np.mod(np.asarray(A_in, dtype=np.int64), p)
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int64_t inv, f, tmp
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                tmp = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = tmp
        inv = _inv_mod(A[r, c], p)
        for j in range(c, n):
            A[r, j] = (A[r, j] * inv) % p
        for i in range(r + 1, m):
            f = A[i, c]
            if f == 0:
                continue
            for j in range(c, n):
                if A[r, j] != 0:
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
                    if A[i, j] < 0:
                        A[i, j] += p
        r += 1
    return r


def shortest_cycles(cnp.ndarray indptr_in, cnp.ndarray indices_in, Py_ssize_t n):
    """Length of the shortest cycle through each vertex of a simple graph (-1 if none)."""
    cdef cnp.ndarray[int64_t, ndim=1] indptr = np.asarray(indptr_in, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] indices = np.asarray(indices_in, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] out = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] dist = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] branch = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] queue = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] seen = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t v, head, tail, k, a, b, nseen, s
    cdef int64_t best, cand
    for v in range(n):
        dist[v] = 0
        branch[v] = -2
        head = 0
        tail = 0
        nseen = 1
        seen[0] = v
        for k in range(indptr[v], indptr[v + 1]):
            b = indices[k]
            dist[b] = 1
            branch[b] = b
            queue[tail] = b
            tail += 1
            seen[nseen] = b
            nseen += 1
        best = -1
        while head < tail:
            a = queue[head]
            head += 1
            if best >= 0 and 2 * dist[a] + 1 >= best:
                break
            for k in range(indptr[a], indptr[a + 1]):
                b = indices[k]
                if b == v:
                    continue
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    branch[b] = branch[a]
                    queue[tail] = b
                    tail += 1
                    seen[nseen] = b
                    nseen += 1
                elif branch[b] != branch[a]:
                    cand = dist[a] + dist[b] + 1
                    if best < 0 or cand < best:
                        best = cand
        out[v] = best
        for s in range(nseen):
            dist[seen[s]] = -1
            branch[seen[s]] = -1
    return out
