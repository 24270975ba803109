"""Dense linear algebra over GF(p) and Q for the small matrices of group presentations."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np


def rref_mod_p(A, p):
    """Reduced row echelon form over GF(p); returns (R, pivot_columns)."""
    R = np.array(A, dtype=np.int64)
    if R.ndim == 1:
        R = R[None, :]
    R = np.mod(R, p)
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        R[[r, piv]] = R[[piv, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        for i in range(m):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank_mod_p(A, p):
    return len(rref_mod_p(A, p)[1])


def nullspace_mod_p(A, p, n=None):
    """Basis (as rows) of {x : A x = 0} over GF(p)."""
    A = np.asarray(A, dtype=np.int64)
    if n is None:
        n = A.shape[1]
    if A.size == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref_mod_p(A, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, pc in enumerate(pivots):
            basis[k, pc] = (-R[row, f]) % p
    return basis


def cokernel_projection(relators, n, p, return_free=False):
    """Matrix ``P`` (r x n) with ``GF(p)^n / rowspace(relators) ~= GF(p)^r`` via ``x -> P x``."""
    relators = np.asarray(relators, dtype=np.int64).reshape(-1, n)
    if relators.shape[0] == 0:
        eye = np.eye(n, dtype=np.int64)
        return (eye, list(range(n))) if return_free else eye
    R, pivots = rref_mod_p(relators, p)
    free = [c for c in range(n) if c not in pivots]
    P = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        P[k, f] = 1
    # a pivot generator equals minus the free part of its row in the quotient
    for row, pc in enumerate(pivots):
        for k, f in enumerate(free):
            P[k, pc] = (-R[row, f]) % p
    return (P, free) if return_free else P


def span_basis(vectors, p, n):
    vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, n)
    if vectors.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    R, _ = rref_mod_p(vectors, p)
    return R


def extend_basis(sub, sup, p, n):
    """Vectors of ``sup`` (a basis) that extend the span of ``sub`` to the span of ``sup``."""
    current = span_basis(sub, p, n)
    extra = []
    for v in np.asarray(sup, dtype=np.int64).reshape(-1, n):
        trial = np.vstack([current, v[None, :]]) if current.size else v[None, :]
        if rank_mod_p(trial, p) > current.shape[0]:
            current = span_basis(trial, p, n)
            extra.append(v)
    return extra


def integer_kernel_vector(A, n):
    """A nonzero primitive integer vector ``x`` with ``A x = 0``, or None."""
    rows = [[Fraction(int(v)) for v in row] for row in np.asarray(A, dtype=np.int64).reshape(-1, n)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    f = free[0]
    x = [Fraction(0)] * n
    x[f] = Fraction(1)
    for row, pc in enumerate(pivots):
        x[pc] = -rows[row][f]
    den = lcm(*(v.denominator for v in x))
    ints = [int(v * den) for v in x]
    g = gcd(*ints)
    return [v // g for v in ints]
