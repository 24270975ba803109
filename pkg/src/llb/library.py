"""Small named complexes and graphs used as bases and test corpus."""

from __future__ import annotations

import numpy as np

from .complex import SimplicialComplex, from_facets, validate_complex


def single_edge():
    return from_facets([(0, 1)])


def triangle_boundary():
    """Combinatorial circle."""
    return from_facets([(0, 1), (1, 2), (0, 2)])


def filled_triangle():
    return from_facets([(0, 1, 2)])


def cycle_complex(n):
    if n < 3:
        raise ValueError("a simplicial cycle needs at least 3 vertices")
    return from_facets([(i, (i + 1) % n) for i in range(n)])


def rose(r=2):
    """Wedge of ``r`` triangle boundaries at vertex 0."""
    edges = []
    for j in range(r):
        a, b = 2 * j + 1, 2 * j + 2
        edges += [(0, a), (a, b), (0, b)]
    return from_facets(edges)


def disjoint_union(*complexes):
    facets = []
    offset = 0
    for K in complexes:
        shift = {v: i + offset for i, v in enumerate(K.vertices)}
        for k in range(K.dim + 1):
            facets += [tuple(shift[v] for v in c) for c in K.cells(k)]
        offset += len(shift)
    return from_facets(facets)


TORUS7_FACES = [tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))) for i in range(7)] + [
    tuple(sorted((i % 7, (i + 2) % 7, (i + 3) % 7))) for i in range(7)
]


def torus7():
    """Seven-vertex (Moebius) triangulation of the torus."""
    return from_facets(TORUS7_FACES)


# genus 2 = two 7-vertex tori glued along the face (0, 1, 3);
# the second torus's vertices 2, 4, 5, 6 are renamed 7..10
GENUS2_GLUE = (0, 1, 3)
_SECOND = {0: 0, 1: 1, 3: 3, 2: 7, 4: 8, 5: 9, 6: 10}


def genus2_surface():
    faces_a = [f for f in TORUS7_FACES if f != GENUS2_GLUE]
    faces_b = [tuple(sorted(_SECOND[v] for v in f)) for f in TORUS7_FACES if f != GENUS2_GLUE]
    return from_facets(faces_a + faces_b)


def tetrahedron_boundary():
    return from_facets([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def random_complex(n_vertices, p_edge, p_triangle, seed):
    """Random 2-complex: Erdos-Renyi 1-skeleton plus a random subset of its triangles."""
    rng = np.random.default_rng(seed)
    edges = [
        (u, v)
        for u in range(n_vertices)
        for v in range(u + 1, n_vertices)
        if rng.random() < p_edge
    ]
    eset = set(edges)
    adj = {v: set() for v in range(n_vertices)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    tris = []
    for u, v in edges:
        for w in sorted(adj[u] & adj[v]):
            if w > v and (u, w) in eset and rng.random() < p_triangle:
                tris.append((u, v, w))
    return validate_complex([[(v,) for v in range(n_vertices)], edges, tris])


def corpus():
    """Named complexes exercised by the property and acceptance suites."""
    return {
        "single_edge": single_edge(),
        "triangle_boundary": triangle_boundary(),
        "filled_triangle": filled_triangle(),
        "two_circles": disjoint_union(triangle_boundary(), triangle_boundary()),
        "rose2": rose(2),
        "tetrahedron_boundary": tetrahedron_boundary(),
        "torus7": torus7(),
        "genus2": genus2_surface(),
        "random_a": random_complex(14, 0.35, 0.5, seed=1),
        "random_b": random_complex(20, 0.25, 0.7, seed=2),
    }


# graphs are adjacency dicts {vertex: set(neighbours)}


def graph_from_edges(edges, vertices=()):
    adj = {v: set() for v in vertices}
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def cycle_graph(n):
    return graph_from_edges([(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return graph_from_edges([(i, i + 1) for i in range(n - 1)], vertices=range(n))


def star_graph(leaves):
    return graph_from_edges([(0, i) for i in range(1, leaves + 1)])


def petersen_graph():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return graph_from_edges(outer + spokes + inner)


def skeleton_graph(K: SimplicialComplex):
    return K.graph()
