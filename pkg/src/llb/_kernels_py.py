"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""

from collections import deque

import numpy as np


def rank_mod_p(A_in, p):
    """Rank of an integer matrix over GF(p); p < 2**31."""
    A = np.mod(np.asarray(A_in, dtype=np.int64), p)
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv], c:] = A[[piv, r], c:]
        inv = pow(int(A[r, c]), -1, p)
        A[r, c:] = (A[r, c:] * inv) % p
        below = r + 1 + np.nonzero(A[r + 1:, c])[0]
        if below.size:
            f = A[below, c][:, None]
            A[below, c:] = (A[below, c:] - f * A[r, c:]) % p
        r += 1
    return r


def shortest_cycles(indptr, indices, n):
    """Length of the shortest cycle through each vertex of a simple graph (-1 if none)."""
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    out = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        dist = {v: 0}
        branch = {v: -2}
        queue = deque()
        for b in indices[indptr[v]:indptr[v + 1]]:
            b = int(b)
            dist[b] = 1
            branch[b] = b
            queue.append(b)
        best = -1
        while queue:
            a = queue.popleft()
            if best >= 0 and 2 * dist[a] + 1 >= best:
                break
            for b in indices[indptr[a]:indptr[a + 1]]:
                b = int(b)
                if b == v:
                    continue
                if b not in dist:
                    dist[b] = dist[a] + 1
                    branch[b] = branch[a]
                    queue.append(b)
                elif branch[b] != branch[a]:
                    cand = dist[a] + dist[b] + 1
                    if best < 0 or cand < best:
                        best = cand
        out[v] = best
    return out
