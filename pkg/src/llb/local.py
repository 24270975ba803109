"""Rooted-ball census, total-variation comparison, injectivity-radius profiles and thin-part fractions of graphs."""

from __future__ import annotations

import math
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import RadiusMismatch, ValidationError

INF = math.inf


def as_graph(G):
    """Accept an adjacency dict, an edge list or a SimplicialComplex (its 1-skeleton)."""
    if hasattr(G, "graph") and callable(G.graph):
        G = G.graph()
    if isinstance(G, dict):
        adj = {v: set(nb) for v, nb in G.items()}
    else:
        adj = {}
        for u, v in G:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
    for v, nb in adj.items():
        if v in nb:
            raise ValidationError(f"self-loop at vertex {v}")
        for u in nb:
            if v not in adj.get(u, ()):
                raise ValidationError(f"edge {v}-{u} is not symmetric")
    return adj


# ---------------------------------------------------------------- canonical codes


def rooted_ball(adj, root, r):
    """Vertices within distance r of root (BFS order), their distances, and the induced edges."""
    dist = {root: 0}
    order = [root]
    q = deque([root])
    while q:
        v = q.popleft()
        if dist[v] == r:
            continue
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                order.append(u)
                q.append(u)
    index = {v: i for i, v in enumerate(order)}
    nbrs = [sorted(index[u] for u in adj[v] if u in index) for v in order]
    return [dist[v] for v in order], nbrs


def _refine(colors, nbrs):
    """Colour refinement; new colours are ranks of (colour, sorted neighbour colours), so relabelling-invariant."""
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in nbrs[v]))) for v in range(len(nbrs))]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(rank) == len(set(colors)):
            return new
        colors = new


def _encode(colors, nbrs):
    n = len(nbrs)
    perm = sorted(range(n), key=lambda v: colors[v])
    pos = {v: i for i, v in enumerate(perm)}
    edges = sorted(
        (min(pos[v], pos[u]), max(pos[v], pos[u])) for v in range(n) for u in nbrs[v] if v < u
    )
    return (n, tuple(edges))


def _canonical(colors, nbrs):
    colors = _refine(colors, nbrs)
    counts = Counter(colors)
    ties = [c for c in sorted(counts) if counts[c] > 1]
    if not ties:
        return _encode(colors, nbrs)
    cell = ties[0]
    best = None
    tried = set()
    for v in range(len(nbrs)):
        if colors[v] != cell:
            continue
        # swapping twins (equal open or closed neighbourhoods) is an automorphism fixing the colouring
        open_nb = tuple(nbrs[v])
        closed_nb = tuple(sorted(nbrs[v] + [v]))
        if ("o", open_nb) in tried or ("c", closed_nb) in tried:
            continue
        tried.add(("o", open_nb))
        tried.add(("c", closed_nb))
        # individualize v ahead of the rest of its cell
        split = [2 * c + (0 if u == v else 1) if c == cell else 2 * c for u, c in enumerate(colors)]
        code = _canonical(split, nbrs)
        if best is None or code < best:
            best = code
    return best


def _to_bytes(code):
    n, edges = code
    flat = [n] + [x for e in edges for x in e]
    return np.asarray(flat, dtype=">u4").tobytes()


def ball_code(adj, root, r) -> bytes:
    """Canonical byte code of the rooted r-ball; equal codes iff the rooted balls are isomorphic."""
    dist, nbrs = rooted_ball(adj, root, r)
    # distance from the root is an isomorphism invariant and pins the root (the only vertex at 0)
    return _to_bytes(_canonical(list(dist), nbrs))


# ---------------------------------------------------------------- census


@dataclass(frozen=True)
class BallStatistics:
    r: int
    histogram: dict  # code bytes -> Fraction
    sample_size: int

    def __post_init__(self):
        if sum(self.histogram.values(), Fraction(0)) != 1:
            raise ValidationError("ball frequencies must sum to 1")

    @property
    def n_types(self):
        return len(self.histogram)

    def items(self):
        return sorted(self.histogram.items())

    def to_dict(self):
        return {
            "r": self.r,
            "sample_size": self.sample_size,
            "histogram": {code.hex(): str(freq) for code, freq in self.items()},
        }

    @classmethod
    def from_dict(cls, d):
        hist = {bytes.fromhex(k): Fraction(v) for k, v in d["histogram"].items()}
        return cls(int(d["r"]), hist, int(d["sample_size"]))


def ball_census(G, r, threads=1) -> BallStatistics:
    """Exact distribution of rooted r-ball types over all vertices."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    adj = as_graph(G)
    if not adj:
        raise ValidationError("empty graph")
    roots = sorted(adj)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            codes = list(ex.map(lambda v: ball_code(adj, v, r), roots))
    else:
        codes = [ball_code(adj, v, r) for v in roots]
    n = len(roots)
    hist = {code: Fraction(c, n) for code, c in sorted(Counter(codes).items())}
    return BallStatistics(r, hist, n)


def tv_distance(s1: BallStatistics, s2: BallStatistics) -> Fraction:
    if s1.r != s2.r:
        raise RadiusMismatch(f"radii differ: {s1.r} vs {s2.r}")
    codes = set(s1.histogram) | set(s2.histogram)
    zero = Fraction(0)
    return sum((abs(s1.histogram.get(c, zero) - s2.histogram.get(c, zero)) for c in codes), zero) / 2


# ---------------------------------------------------------------- injectivity radius


def to_csr(adj):
    verts = sorted(adj)
    index = {v: i for i, v in enumerate(verts)}
    indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    indices = []
    for i, v in enumerate(verts):
        nb = sorted(index[u] for u in adj[v])
        indices += nb
        indptr[i + 1] = indptr[i] + len(nb)
    return verts, indptr, np.asarray(indices, dtype=np.int64)


def injectivity_radius_profile(G):
    """Half the length of the shortest cycle through each vertex (Fraction), inf if none."""
    adj = as_graph(G)
    verts, indptr, indices = to_csr(adj)
    lengths = kernels.shortest_cycles(indptr, indices, len(verts))
    return {v: (Fraction(int(c), 2) if c >= 0 else INF) for v, c in zip(verts, lengths)}


@dataclass(frozen=True)
class ThinPartProfile:
    r_grid: tuple
    fractions: tuple
    errors: tuple | None = None  # standard errors, surfaces only

    def fraction(self, r):
        return self.fractions[self.r_grid.index(r)]


def thin_part_fraction(G, r, samples=400, seed=0):
    """Fraction of vertices (graphs, exact) or of area (surfaces, Monte Carlo) with injectivity radius < r.

    Surfaces return (fraction, standard error).
    """
    if r <= 0:
        raise ValueError("r must be positive")
    from .hyperbolic import HyperbolicSurface, thin_part_fraction_surface

    if isinstance(G, HyperbolicSurface):
        return thin_part_fraction_surface(G, r, samples, seed)
    prof = injectivity_radius_profile(G)
    return Fraction(sum(1 for v in prof.values() if v < r), len(prof))


def thin_part_profile(G, r_grid, samples=400, seed=0) -> ThinPartProfile:
    from .hyperbolic import HyperbolicSurface, dirichlet_samples, injectivity_radius

    r_grid = tuple(float(r) if not isinstance(r, Fraction) else r for r in r_grid)
    if isinstance(G, HyperbolicSurface):
        # one sample set for every r keeps the profile monotone
        pts = dirichlet_samples(G, samples, seed=seed)
        inj = np.array([injectivity_radius(G, z) for z in pts])
        fr = tuple(float((inj < r).mean()) for r in r_grid)
        err = tuple(math.sqrt(f * (1 - f) / samples) for f in fr)
        return ThinPartProfile(r_grid, fr, err)
    prof = list(injectivity_radius_profile(G).values())
    n = len(prof)
    return ThinPartProfile(r_grid, tuple(Fraction(sum(1 for v in prof if v < r), n) for r in r_grid))
