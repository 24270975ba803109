"""Finite simplicial complexes, integer boundary maps and exact Betti numbers.

Cells are sorted vertex tuples; the orientation of a cell is the one induced
by that order, so ``d(v0, ..., vk) = sum_i (-1)^i (v0, ..., ^vi, ..., vk)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DegreeOutOfRange, DuplicateCell, MissingFace, NonSimplicial, ValidationError

# word-size primes below 2**31 for the modular rank prepass
PRIMES = (2147483647, 2147483629, 2147483587)
# dense modular prepass is skipped above this many matrix entries
PREPASS_MAX_ENTRIES = 4_000_000


@dataclass(frozen=True)
class IntegerSparseMatrix:
    rows: int
    cols: int
    entries: tuple  # sorted (row, col, value) triples, values nonzero

    @classmethod
    def from_coo(cls, rows, cols, triples):
        acc = {}
        for r, c, v in triples:
            acc[(r, c)] = acc.get((r, c), 0) + int(v)
        entries = tuple(sorted((r, c, v) for (r, c), v in acc.items() if v != 0))
        return cls(rows, cols, entries)

    @classmethod
    def from_scipy(cls, M):
        M = sp.coo_matrix(M)
        return cls.from_coo(M.shape[0], M.shape[1], zip(M.row.tolist(), M.col.tolist(), M.data.tolist()))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, ())

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.entries)

    def to_scipy(self):
        if not self.entries:
            return sp.csr_matrix((self.rows, self.cols), dtype=np.int64)
        r, c, v = zip(*self.entries)
        return sp.csr_matrix((np.array(v, dtype=np.int64), (r, c)), shape=self.shape)

    def to_dense(self):
        A = np.zeros(self.shape, dtype=np.int64)
        for r, c, v in self.entries:
            A[r, c] = v
        return A

    def transpose(self):
        return IntegerSparseMatrix.from_coo(self.cols, self.rows, ((c, r, v) for r, c, v in self.entries))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntegerSparseMatrix.from_scipy(self.to_scipy() @ other.to_scipy())

    def is_zero(self):
        return not self.entries

    def is_symmetric(self):
        return self.rows == self.cols and set(self.entries) == {(c, r, v) for r, c, v in self.entries}


@dataclass(frozen=True)
class SimplicialComplex:
    """Validated complex; build with :func:`validate_complex` or :func:`from_facets`.

    ``projection`` is set on covering complexes and maps each vertex to the
    base vertex it lies over.
    """

    cells_by_dim: tuple
    projection: tuple | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def dim(self):
        return len(self.cells_by_dim) - 1

    def cells(self, k):
        if 0 <= k < len(self.cells_by_dim):
            return self.cells_by_dim[k]
        return ()

    def n_cells(self, k):
        return len(self.cells(k))

    def counts(self):
        return [len(c) for c in self.cells_by_dim]

    def index(self, k):
        key = ("index", k)
        if key not in self._cache:
            self._cache[key] = {c: i for i, c in enumerate(self.cells(k))}
        return self._cache[key]

    @property
    def vertices(self):
        return [c[0] for c in self.cells(0)]

    def edges(self):
        return self.cells(1)

    def euler_characteristic(self):
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def graph(self):
        """1-skeleton as an adjacency dict over vertex ids."""
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges():
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def raw_cells(self):
        return [list(cells) for cells in self.cells_by_dim]


@dataclass(frozen=True)
class BettiVector:
    values: tuple

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def euler_characteristic(self):
        return sum((-1) ** k * b for k, b in enumerate(self.values))


def validate_complex(raw_cells: Sequence[Iterable[Sequence[int]]]) -> SimplicialComplex:
    """Check and canonicalize cells given per dimension (``raw_cells[k]`` = k-cells)."""
    tables = []
    seen = set()
    for k, cells in enumerate(raw_cells):
        table = []
        for cell in cells:
            cell = tuple(int(v) for v in cell)
            if len(cell) != k + 1:
                raise ValidationError(f"cell {cell} listed in dimension {k} has {len(cell)} vertices")
            if any(v < 0 for v in cell):
                raise ValidationError(f"cell {cell} has a negative vertex id")
            if len(set(cell)) != len(cell):
                raise NonSimplicial(f"cell {cell} repeats a vertex")
            key = tuple(sorted(cell))
            if key in seen:
                raise DuplicateCell(f"cell {key} appears more than once")
            seen.add(key)
            table.append(key)
        tables.append(table)
    while tables and not tables[-1]:
        tables.pop()
    for k in range(1, len(tables)):
        for cell in tables[k]:
            for face in combinations(cell, k):
                if face not in seen:
                    raise MissingFace(f"face {face} of cell {cell} is missing")
    return SimplicialComplex(tuple(tuple(sorted(t)) for t in tables))


def from_facets(facets: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Downward closure of a list of top cells."""
    layers = {}
    for f in facets:
        f = tuple(sorted(int(v) for v in f))
        if len(set(f)) != len(f):
            raise NonSimplicial(f"cell {f} repeats a vertex")
        for k in range(len(f)):
            layers.setdefault(k, set()).update(combinations(f, k + 1))
    top = max(layers) if layers else -1
    return validate_complex([sorted(layers.get(k, ())) for k in range(top + 1)])


def _boundary(K: SimplicialComplex, k: int) -> IntegerSparseMatrix:
    rows, cols = K.n_cells(k - 1), K.n_cells(k)
    if k <= 0 or cols == 0 or rows == 0:
        return IntegerSparseMatrix.zeros(max(rows, 0), cols)
    key = ("boundary", k)
    if key not in K._cache:
        index = K.index(k - 1)
        triples = []
        for j, cell in enumerate(K.cells(k)):
            for i in range(k + 1):
                face = cell[:i] + cell[i + 1:]
                triples.append((index[face], j, -1 if i % 2 else 1))
        K._cache[key] = IntegerSparseMatrix.from_coo(rows, cols, triples)
    return K._cache[key]


def boundary_matrix(K: SimplicialComplex, k: int) -> IntegerSparseMatrix:
    if not 1 <= k <= K.dim:
        raise DegreeOutOfRange(f"boundary degree {k} outside 1..{K.dim}")
    return _boundary(K, k)


def _rank_mod_primes(M: IntegerSparseMatrix) -> int:
    A = M.to_dense()
    return max(kernels.rank_mod_p(A, p) for p in PRIMES)


def _rank_fraction_free(M: IntegerSparseMatrix) -> int:
    """Exact rank over Q by sparse fraction-free elimination with content removal."""
    rows = {}
    for r, c, v in M.entries:
        rows.setdefault(r, {})[c] = v
    col_rows = {}
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    rank = 0
    while rows:
        # Markowitz-style pivot: shortest row, then a unit entry in the sparsest column
        r = min(rows, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(r)
        for c in prow:
            col_rows[c].discard(r)
        c = min(prow, key=lambda j: (abs(prow[j]) != 1, len(col_rows[j]), j))
        a = prow[c]
        rank += 1
        for i in list(col_rows[c]):
            row = rows[i]
            b = row[c]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            new = {}
            for j in set(row) | set(prow):
                val = fa * row.get(j, 0) - fb * prow.get(j, 0)
                if val:
                    new[j] = val
            for j in row:
                if j not in new:
                    col_rows[j].discard(i)
            for j in new:
                if j not in row:
                    col_rows.setdefault(j, set()).add(i)
            if new:
                content = math.gcd(*new.values())
                if content > 1:
                    new = {j: v // content for j, v in new.items()}
                rows[i] = new
            else:
                del rows[i]
    return rank


def exact_rank(M: IntegerSparseMatrix) -> int:
    """Rank over the rationals.

    The modular ranks are lower bounds for the rational rank; when they already
    reach ``min(rows, cols)`` the rank is certified, otherwise elimination
    over the integers decides.
    """
    if M.is_zero():
        return 0
    full = min(M.shape)
    if M.rows * M.cols <= PREPASS_MAX_ENTRIES:
        lower = _rank_mod_primes(M)
        if lower == full:
            return full
    else:
        lower = 0
    rank = _rank_fraction_free(M)
    assert rank >= lower, "rational rank below a modular rank"
    return rank


def boundary_rank(K: SimplicialComplex, k: int) -> int:
    key = ("rank", k)
    if key not in K._cache:
        K._cache[key] = exact_rank(_boundary(K, k)) if 1 <= k <= K.dim else 0
    return K._cache[key]


def betti_number(K: SimplicialComplex, k: int) -> int:
    if not 0 <= k <= K.dim:
        raise DegreeOutOfRange(f"degree {k} outside 0..{K.dim}")
    return K.n_cells(k) - boundary_rank(K, k) - boundary_rank(K, k + 1)


def betti_numbers(K: SimplicialComplex) -> BettiVector:
    return BettiVector(tuple(betti_number(K, k) for k in range(K.dim + 1)))


def hodge_laplacian(K: SimplicialComplex, k: int) -> IntegerSparseMatrix:
    """Combinatorial Laplacian ``d_k^T d_k + d_{k+1} d_{k+1}^T`` on k-chains."""
    if not 0 <= k <= K.dim:
        raise DegreeOutOfRange(f"degree {k} outside 0..{K.dim}")
    n = K.n_cells(k)
    L = sp.csr_matrix((n, n), dtype=np.int64)
    if k >= 1:
        D = _boundary(K, k).to_scipy()
        L = L + D.T @ D
    if k + 1 <= K.dim:
        D = _boundary(K, k + 1).to_scipy()
        L = L + D @ D.T
    return IntegerSparseMatrix.from_scipy(L)
