"""Finite covers from permutation representations of the edge-path group, and towers of them.

A degree-n cover is described by a permutation of the sheets {0..n-1} for
every oriented edge ``(u, v)``, ``u < v``: walking from ``u`` to ``v`` moves
sheet ``s`` to ``perm[s]``.  Relative to a spanning tree rooted at the
smallest vertex, tree edges carry the identity and the remaining edges are
the free generators of the fundamental group of the 2-skeleton; each
triangle contributes one relator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import modp
from .complex import SimplicialComplex, betti_number, validate_complex
from .errors import (
    DegreeMismatch,
    Disconnected,
    NoFreeQuotient,
    RelatorViolated,
    UnsupportedFamily,
    ValidationError,
)

FAMILIES = ("mod-p", "cyclic", "free-chain")


@dataclass(frozen=True)
class Presentation:
    root: int
    parent: dict  # vertex -> parent vertex in the spanning tree (root -> None)
    tree_edges: frozenset
    generators: tuple  # non-tree edges (u, v), u < v; generator j is generators[j]
    relators: tuple  # words: tuples of (generator index, +1 | -1)

    @property
    def rank(self):
        return len(self.generators)

    def generator_index(self):
        return {e: j for j, e in enumerate(self.generators)}

    def exponent_matrix(self):
        """Relators abelianized: one row of exponent sums per relator."""
        M = np.zeros((len(self.relators), self.rank), dtype=np.int64)
        for i, word in enumerate(self.relators):
            for j, s in word:
                M[i, j] += s
        return M


@dataclass(frozen=True)
class PermutationRep:
    degree: int
    generators: tuple  # tuple of permutation tuples, one per presentation generator
    relator_words: tuple = ()

    def __post_init__(self):
        n = self.degree
        for g in self.generators:
            if len(g) != n:
                raise DegreeMismatch(f"permutation of length {len(g)} in a degree-{n} representation")
            if sorted(g) != list(range(n)):
                raise ValidationError(f"generator {g} is not a bijection of 0..{n - 1}")
        for word in self.relator_words:
            if evaluate_word(word, self.generators, n) != tuple(range(n)):
                raise RelatorViolated(f"relator {word} does not map to the identity")

    def arrays(self):
        return [np.asarray(g, dtype=np.int64) for g in self.generators]


@dataclass
class CoverLevel:
    rep: PermutationRep
    complex: SimplicialComplex
    degree: int
    is_normal: bool
    is_connected: bool


@dataclass
class CoverTower:
    base: SimplicialComplex
    levels: list = field(default_factory=list)
    family: str = ""
    presentation: Presentation | None = None
    # families whose chains have trivial intersection by construction
    trivial_intersection: bool = False
    nested: bool = True

    @property
    def degrees(self):
        return [lv.degree for lv in self.levels]


def evaluate_word(word, perms, n):
    """Sheet permutation obtained by following ``word`` left to right."""
    state = np.arange(n)
    inverses = {}
    for j, s in word:
        g = np.asarray(perms[j])
        if s > 0:
            step = g
        else:
            if j not in inverses:
                inv = np.empty(n, dtype=np.int64)
                inv[g] = np.arange(n)
                inverses[j] = inv
            step = inverses[j]
        for _ in range(abs(s)):
            state = step[state]
    return tuple(int(x) for x in state)


def spanning_tree_generators(K: SimplicialComplex) -> Presentation:
    """Presentation of the fundamental group of the 2-skeleton from a BFS spanning tree."""
    verts = K.vertices
    if not verts:
        raise Disconnected("empty complex")
    adj = K.graph()
    root = min(verts)
    parent = {root: None}
    queue = deque([root])
    tree = set()
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in parent:
                parent[v] = u
                tree.add((min(u, v), max(u, v)))
                queue.append(v)
    if len(parent) != len(verts):
        raise Disconnected(f"1-skeleton has {len(verts) - len(parent)} vertices unreachable from {root}")
    gens = tuple(e for e in K.edges() if e not in tree)
    index = {e: j for j, e in enumerate(gens)}
    relators = []
    for a, b, c in K.cells(2):
        word = []
        for e, s in (((a, b), 1), ((b, c), 1), ((a, c), -1)):
            if e in index:
                word.append((index[e], s))
        relators.append(tuple(word))
    return Presentation(root, parent, frozenset(tree), gens, tuple(relators))


def edge_perms_from_rep(K: SimplicialComplex, pres: Presentation, rep: PermutationRep):
    ident = np.arange(rep.degree)
    gens = pres.generator_index()
    return {e: (np.asarray(rep.generators[gens[e]]) if e in gens else ident) for e in K.edges()}


def _check_triangles(K, edge_perms):
    for a, b, c in K.cells(2):
        if not np.array_equal(edge_perms[(b, c)][edge_perms[(a, b)]], edge_perms[(a, c)]):
            raise RelatorViolated(f"monodromy around triangle {(a, b, c)} is not trivial")


def gauge_fix(K: SimplicialComplex, pres: Presentation, edge_perms, n) -> PermutationRep:
    """Relabel sheets vertex by vertex so that tree edges carry the identity.

    The monodromy at the root is unchanged, so the result describes the same
    subgroup (the stabilizer of sheet 0 at the root).
    """
    ident = np.arange(n)
    h = {pres.root: ident}
    order = deque([pres.root])
    children = {}
    for v, u in pres.parent.items():
        if u is not None:
            children.setdefault(u, []).append(v)
    while order:
        u = order.popleft()
        for v in children.get(u, ()):
            if u < v:
                h[v] = edge_perms[(u, v)][h[u]]
            else:
                inv = np.empty(n, dtype=np.int64)
                inv[edge_perms[(v, u)]] = ident
                h[v] = inv[h[u]]
            order.append(v)
    gens = []
    for u, v in pres.generators:
        hv_inv = np.empty(n, dtype=np.int64)
        hv_inv[h[v]] = ident
        gens.append(tuple(int(x) for x in hv_inv[edge_perms[(u, v)][h[u]]]))
    return PermutationRep(n, tuple(gens), pres.relators)


def _lift(K: SimplicialComplex, edge_perms, n):
    verts = K.vertices
    pos = {v: i for i, v in enumerate(verts)}
    nv = len(verts)
    tables = []
    for k in range(K.dim + 1):
        cells = []
        for cell in K.cells(k):
            v0 = cell[0]
            sheets = [np.arange(n)] + [edge_perms[(v0, w)] for w in cell[1:]]
            for s in range(n):
                cells.append(tuple(int(sh[s]) * nv + pos[w] for sh, w in zip(sheets, cell)))
        tables.append(cells)
    cover = validate_complex(tables)
    projection = tuple(verts[i % nv] for i in range(nv * n))
    return SimplicialComplex(cover.cells_by_dim, projection=projection)


def cover_from_permutations(K: SimplicialComplex, rep: PermutationRep, pres: Presentation | None = None):
    """The n-sheeted cover; vertex ``s * |V| + i`` lies on sheet ``s`` over the i-th base vertex."""
    pres = pres or spanning_tree_generators(K)
    if len(rep.generators) != pres.rank:
        raise DegreeMismatch(f"{len(rep.generators)} permutations for {pres.rank} generators")
    perms = edge_perms_from_rep(K, pres, rep)
    _check_triangles(K, perms)
    return _lift(K, perms, rep.degree)


def _inverse_perms(perms, n):
    out = []
    for g in perms:
        inv = np.empty(n, dtype=np.int64)
        inv[g] = np.arange(n)
        out.append(inv)
    return out


def is_transitive(rep: PermutationRep) -> bool:
    n = rep.degree
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    perms = rep.arrays() + _inverse_perms(rep.arrays(), n)
    while stack:
        s = stack.pop()
        for g in perms:
            t = int(g[s])
            if not seen[t]:
                seen[t] = True
                stack.append(t)
    return bool(seen.all())


def equivariant_map(src: PermutationRep, dst: PermutationRep, target=0):
    """The map f with f(0) = target and f(g s) = g f(s) for all generators, or None.

    With src transitive, such f exists iff the stabilizer of 0 in src lies in
    the stabilizer of ``target`` in dst.
    """
    n = src.degree
    sg = src.arrays()
    dg = dst.arrays()
    sg = sg + _inverse_perms(sg, n)
    dg = dg + _inverse_perms(dg, dst.degree)
    f = -np.ones(n, dtype=np.int64)
    f[0] = target
    stack = [0]
    while stack:
        s = stack.pop()
        for a, b in zip(sg, dg):
            t, ft = int(a[s]), int(b[f[s]])
            if f[t] < 0:
                f[t] = ft
                stack.append(t)
            elif f[t] != ft:
                return None
    if (f < 0).any():
        return None
    return f


def deck_transformations(rep: PermutationRep):
    """All sheet permutations commuting with the monodromy (deck group acting on the root fibre)."""
    out = []
    for j in range(rep.degree):
        f = equivariant_map(rep, rep, target=j)
        if f is not None and len(set(f.tolist())) == rep.degree:
            out.append(f)
    return out


def is_normal(rep: PermutationRep) -> bool:
    """A connected cover is normal iff its deck group acts transitively on the fibre."""
    return is_transitive(rep) and len(deck_transformations(rep)) == rep.degree


def factors_through(fine: PermutationRep, coarse: PermutationRep) -> bool:
    """Whether the subgroup of ``fine`` is contained in that of ``coarse``."""
    return fine.degree % coarse.degree == 0 and equivariant_map(fine, coarse) is not None


def make_level(K, pres, rep):
    return CoverLevel(
        rep=rep,
        complex=cover_from_permutations(K, rep, pres),
        degree=rep.degree,
        is_normal=is_normal(rep),
        is_connected=is_transitive(rep),
    )


# ---------------------------------------------------------------- cyclic family


def _cyclic_rep(pres, character, n):
    gens = tuple(tuple((np.arange(n) + a) % n) for a in character)
    return PermutationRep(n, tuple(tuple(int(x) for x in g) for g in gens), pres.relators)


def abelian_character(pres: Presentation):
    """A primitive homomorphism to Z, as one integer per generator (None if H_1 is finite)."""
    if pres.rank == 0:
        return None
    return modp.integer_kernel_vector(pres.exponent_matrix(), pres.rank)


# ---------------------------------------------------------------- mod-p family


def _fundamental_cycle(pres: Presentation, edge):
    """Signed edges of the tree loop through ``edge`` = (u, v): root -> u -> v -> root."""
    u, v = edge

    def to_root(x):
        path = []
        while pres.parent[x] is not None:
            y = pres.parent[x]
            path.append(((min(x, y), max(x, y)), 1 if x < y else -1))
            x = y
        return path

    up = [(e, -s) for e, s in reversed(to_root(u))]
    return up + [(edge, 1)] + to_root(v)


def _homology_data(C: SimplicialComplex, p: int):
    """Presentation of C and the projection of generator space onto H_1(C; GF(p))."""
    pres = spanning_tree_generators(C)
    P, free = modp.cokernel_projection(pres.exponent_matrix() % p, pres.rank, p, return_free=True)
    return pres, P, free


def _deck_action_on_h1(pres, P, basis_gens, deck_vertex_maps, p):
    """Matrices of the deck transformations on H_1(C; GF(p)) in the cokernel basis.

    Basis vector k is the class of the tree loop through generator ``basis_gens[k]``.
    """
    gindex = pres.generator_index()
    r = P.shape[0]
    mats = []
    for phi in deck_vertex_maps:
        M = np.zeros((r, r), dtype=np.int64)
        for k, j in enumerate(basis_gens):
            cycle = _fundamental_cycle(pres, pres.generators[j])
            vec = np.zeros(pres.rank, dtype=np.int64)
            for (a, b), s in cycle:
                x, y = phi[a], phi[b]
                e = (min(x, y), max(x, y))
                sign = s if x < y else -s
                if e in gindex:
                    vec[gindex[e]] += sign
            M[:, k] = (P @ (vec % p)) % p
        mats.append(M)
    return mats


def _augmentation_chain(mats, r, p):
    """Invariant subspaces V = U_0 > U_1 > ... > U_r = 0, each of codimension one in the previous."""
    layers = [np.eye(r, dtype=np.int64)]
    while layers[-1].shape[0]:
        W = layers[-1]
        images = [((M - np.eye(r, dtype=np.int64)) @ w) % p for M in mats for w in W]
        nxt = modp.span_basis(images, p, r) if images else np.zeros((0, r), np.int64)
        nxt = nxt[np.any(nxt != 0, axis=1)] if nxt.size else np.zeros((0, r), np.int64)
        if nxt.shape[0] == W.shape[0]:
            raise ValidationError("deck action on homology is not unipotent; not a p-group")
        layers.append(nxt)
    chain = [layers[0]]
    for big, small in zip(layers, layers[1:]):
        extra = modp.extend_basis(small, big, p, r)
        # drop complement vectors one at a time
        for i in range(len(extra) - 1, -1, -1):
            chain.append(np.vstack([small] + [v[None, :] for v in extra[:i]]))
    return chain


def _annihilator(U, r, p):
    """Rows spanning the linear forms vanishing on the row span of U (kernel of result = U)."""
    if U.shape[0] == 0:
        return np.eye(r, dtype=np.int64)
    return modp.nullspace_mod_p(U, p, r)


def _compose_rep(K, pres_K, rep_K, C, pres_C, P, Q, p):
    """Rep of pi_1(K) for the cover of C given by pi_1(C) -> H_1(C; GF(p)) -Q-> GF(p)^m."""
    n = rep_K.degree
    m = Q.shape[0]
    size = p ** m
    gindex = pres_C.generator_index()
    gen_vecs = (Q @ P) % p  # m x rank(C)
    weights = p ** np.arange(m)
    edge_K = edge_perms_from_rep(K, pres_K, rep_K)
    nv = len(K.vertices)
    pos = {v: i for i, v in enumerate(K.vertices)}
    codes = np.arange(size)
    digits = (codes[:, None] // weights[None, :]) % p  # size x m
    composite = {}
    for (u, v), sig in edge_K.items():
        perm = np.empty(n * size, dtype=np.int64)
        for s in range(n):
            x = s * nv + pos[u]
            y = int(sig[s]) * nv + pos[v]
            e = (min(x, y), max(x, y))
            if e in gindex:
                t = gen_vecs[:, gindex[e]] * (1 if x < y else -1)
            else:
                t = np.zeros(m, dtype=np.int64)
            moved = ((digits + t[None, :]) % p) @ weights
            perm[s * size + codes] = int(sig[s]) * size + moved
        composite[(u, v)] = perm
    return gauge_fix(K, pres_K, composite, n * size)


def _mod_p_levels(K, pres, depth, p, refine):
    reps = []
    current = PermutationRep(1, tuple((0,) for _ in pres.generators), pres.relators)
    nv = len(K.vertices)
    while len(reps) < depth:
        C = cover_from_permutations(K, current, pres)
        pres_C, P, free = _homology_data(C, p)
        r = P.shape[0]
        if r == 0:
            break
        if refine:
            maps = [
                {x: int(f[x // nv]) * nv + x % nv for x in C.vertices}
                for f in (deck_transformations(current) if current.degree > 1 else [])
            ]
            mats = _deck_action_on_h1(pres_C, P, free, maps, p)
            chain = _augmentation_chain(mats, r, p)[1:]
        else:
            chain = [np.zeros((0, r), np.int64)]
        for U in chain:
            Q = _annihilator(U, r, p)
            reps.append(_compose_rep(K, pres, current, C, pres_C, P, Q, p))
            if len(reps) == depth:
                break
        # the last element of the chain is the full mod-p homology cover of C
        current = reps[-1]
    return reps


def normal_chain_tower(K: SimplicialComplex, family: str, depth: int, *, p=2, refine=False,
                       character=None, modulus_base=2) -> CoverTower:
    """Tower of normal covers.

    ``family="mod-p"``: iterated kernels of pi_1 -> H_1(-; GF(p)); with
    ``refine`` every step has index p (through deck-invariant subspaces).
    ``family="cyclic"``: kernels of pi_1 -> Z -> Z/modulus_base**i for a
    homomorphism ``character`` to Z (one integer per generator).
    """
    if family not in ("mod-p", "cyclic"):
        raise UnsupportedFamily(f"normal chains support 'mod-p' and 'cyclic', not {family!r}")
    if depth < 1:
        raise ValueError("depth must be positive")
    pres = spanning_tree_generators(K)
    if family == "cyclic":
        character = list(character) if character is not None else abelian_character(pres)
        if character is None or not any(character):
            raise UnsupportedFamily("no homomorphism onto Z to build a cyclic tower from")
        if len(character) != pres.rank:
            raise DegreeMismatch(f"character has {len(character)} entries for {pres.rank} generators")
        if (pres.exponent_matrix() @ np.asarray(character)).any():
            raise RelatorViolated("character does not vanish on the relators")
        reps = [_cyclic_rep(pres, character, modulus_base ** i) for i in range(1, depth + 1)]
    else:
        reps = _mod_p_levels(K, pres, depth, p, refine)
    tower = CoverTower(K, family=family, presentation=pres, trivial_intersection=(family == "mod-p"))
    for rep in reps:
        tower.levels.append(make_level(K, pres, rep))
    return tower


# ---------------------------------------------------------------- free-chain family


def free_reduce(word):
    out = []
    for letter, e in word:
        if e == 0:
            continue
        if out and out[-1][0] == letter:
            s = out[-1][1] + e
            out.pop()
            if s:
                out.append((letter, s))
        else:
            out.append((letter, e))
    return out


def _invert_word(word):
    return [(a, -e) for a, e in reversed(word)]


def check_free_surjection(K: SimplicialComplex, edge_words):
    """Each triangle must map to the trivial word; returns the words on all edges."""
    words = {e: list(edge_words.get(e, ())) for e in K.edges()}
    for a, b, c in K.cells(2):
        loop = words[(a, b)] + words[(b, c)] + _invert_word(words[(a, c)])
        if free_reduce(loop):
            raise RelatorViolated(f"triangle {(a, b, c)} maps to {free_reduce(loop)} in the free group")
    return words


def default_free_surjection(K: SimplicialComplex, pres: Presentation):
    """Generators 0, 1 -> x, y, others -> 1; only for complexes without 2-cells."""
    if K.n_cells(2) or pres.rank < 2:
        raise NoFreeQuotient("supply a surjection onto F_2 (fundamental group not visibly free of rank >= 2)")
    return {pres.generators[0]: [(0, 1)], pres.generators[1]: [(1, 1)]}


def free_group_rep(n):
    """Transitive degree-n action of F_2: x -> n-cycle, y -> transposition (0 1)."""
    x = np.roll(np.arange(n), -1)
    y = np.arange(n)
    if n >= 2:
        y[[0, 1]] = [1, 0]
    return x, y


def free_subgroup_chain_tower(K: SimplicialComplex, depth: int, surjection=None) -> CoverTower:
    """Covers pulled back along pi_1(K) -> F_2 from index-n subgroups, n = 1..depth."""
    if depth < 1:
        raise ValueError("depth must be positive")
    pres = spanning_tree_generators(K)
    if surjection is None:
        surjection = default_free_surjection(K, pres)
    words = check_free_surjection(K, surjection)
    tower = CoverTower(K, family="free-chain", presentation=pres, nested=False)
    for n in range(1, depth + 1):
        letters = free_group_rep(n)
        edge_perms = {}
        for e, word in words.items():
            perm = np.arange(n)
            for letter, exp in word:
                g = letters[letter]
                if exp < 0:
                    inv = np.empty(n, dtype=np.int64)
                    inv[g] = np.arange(n)
                    g = inv
                for _ in range(abs(exp)):
                    perm = g[perm]
            edge_perms[e] = perm
        _check_triangles(K, edge_perms)
        tower.levels.append(make_level(K, pres, gauge_fix(K, pres, edge_perms, n)))
    return tower


def torus_part_cocycle(torus: SimplicialComplex, face):
    """Integer 1-cocycle of a torus triangulation, nonzero in cohomology, vanishing on ``face``'s edges."""
    pres = spanning_tree_generators(torus)
    a = abelian_character(pres)
    alpha = {e: 0 for e in torus.edges()}
    for j, e in enumerate(pres.generators):
        alpha[e] = int(a[j])
    x, y, z = face
    A, B = alpha[(x, y)], alpha[(y, z)]
    f = {x: 0, y: A, z: A + B}
    return {(u, v): val - (f.get(v, 0) - f.get(u, 0)) for (u, v), val in alpha.items()}


def genus2_free_surjection():
    """Map of the genus-2 surface from :func:`library.genus2_surface` onto F_2.

    Pinching the gluing circle and projecting each torus summand onto one
    circle factor sends the first summand to powers of x and the second to
    powers of y.
    """
    from .library import GENUS2_GLUE, _SECOND, torus7

    alpha = torus_part_cocycle(torus7(), GENUS2_GLUE)
    words = {}
    for (u, v), val in alpha.items():
        if val:
            words[(u, v)] = [(0, val)]
        if {u, v} <= set(GENUS2_GLUE):
            continue
        e = tuple(sorted((_SECOND[u], _SECOND[v])))
        w = val if _SECOND[u] < _SECOND[v] else -val
        if w:
            words[e] = [(1, w)]
    return words


# ---------------------------------------------------------------- checks


def euler_multiplicative(base: SimplicialComplex, level: CoverLevel) -> bool:
    return level.complex.euler_characteristic() == level.degree * base.euler_characteristic()


def check_tower(tower: CoverTower):
    """Structural invariants; raises AssertionError with a message on failure."""
    prev = None
    for i, lv in enumerate(tower.levels):
        assert lv.complex.counts() == [lv.degree * c for c in tower.base.counts()], f"level {i}: cell counts"
        assert euler_multiplicative(tower.base, lv), f"level {i}: Euler characteristic"
        if prev is not None:
            assert lv.degree >= prev.degree, f"level {i}: degrees decrease"
            if tower.nested:
                assert factors_through(lv.rep, prev.rep), f"level {i}: not contained in level {i - 1}"
        prev = lv
    return True


def normalized_betti(level: CoverLevel, k: int) -> Fraction:
    return Fraction(betti_number(level.complex, k), level.degree)
