import math
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llb import library
from llb.errors import RadiusMismatch
from llb.local import (
    ball_census,
    ball_code,
    injectivity_radius_profile,
    thin_part_fraction,
    thin_part_profile,
    tv_distance,
)


def nx_ball(adj, root, r):
    G = nx.Graph()
    G.add_nodes_from(adj)
    G.add_edges_from((u, v) for u in adj for v in adj[u])
    B = nx.ego_graph(G, root, radius=r)
    nx.set_node_attributes(B, {v: v == root for v in B}, "root")
    return B


def rooted_isomorphic(B1, B2):
    return nx.is_isomorphic(B1, B2, node_match=lambda a, b: a["root"] == b["root"])


def check_codes_against_brute_force(adj, r, max_vertices=12):
    balls = []
    for v in sorted(adj):
        B = nx_ball(adj, v, r)
        if B.number_of_nodes() <= max_vertices:
            balls.append((ball_code(adj, v, r), B))
    mismatches = 0
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            same_code = balls[i][0] == balls[j][0]
            if same_code != rooted_isomorphic(balls[i][1], balls[j][1]):
                mismatches += 1
    return mismatches, len(balls)


def two_triangles_joined_by_path():
    return library.graph_from_edges(
        [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 7)]
    )


def test_cycle_single_type():
    s = ball_census(library.cycle_graph(10), 2)
    assert list(s.histogram.values()) == [1]
    path4 = library.path_graph(5)
    assert next(iter(s.histogram)) == ball_code(path4, 2, 2)


def test_star_two_types():
    s = ball_census(library.star_graph(3), 1)
    assert sorted(s.histogram.values()) == [Fraction(1, 4), Fraction(3, 4)]


def test_petersen_single_type():
    assert ball_census(library.petersen_graph(), 1).n_types == 1


def test_tv_identical_disjoint_and_cycles():
    a = ball_census(library.cycle_graph(8), 1)
    assert tv_distance(a, a) == 0
    b = ball_census(library.star_graph(3), 1)
    assert tv_distance(a, b) == 1
    for n in (5, 6, 8, 9):
        for r in range(n):
            if 2 * r + 1 < n:
                assert tv_distance(ball_census(library.cycle_graph(n), r),
                                   ball_census(library.cycle_graph(2 * n), r)) == 0


def test_odd_cycle_ball_closes_up_at_half_length():
    # r = (n-1)/2 < n/2 but the ball is all of C_n, including the closing edge
    n, r = 5, 2
    assert tv_distance(ball_census(library.cycle_graph(n), r), ball_census(library.cycle_graph(2 * n), r)) == 1


def test_tv_radius_mismatch():
    with pytest.raises(RadiusMismatch):
        tv_distance(ball_census(library.cycle_graph(5), 1), ball_census(library.cycle_graph(5), 2))


def test_profile_cycle_and_tree():
    assert set(injectivity_radius_profile(library.cycle_graph(11)).values()) == {Fraction(11, 2)}
    assert set(injectivity_radius_profile(library.path_graph(6)).values()) == {math.inf}


def test_profile_two_triangles_joined_by_path():
    prof = injectivity_radius_profile(two_triangles_joined_by_path())
    assert all(prof[v] == Fraction(3, 2) for v in (0, 1, 2, 5, 6, 7))
    # the path vertices are cut vertices of no cycle
    assert prof[3] == prof[4] == math.inf


def test_thin_part_examples():
    c10 = library.cycle_graph(10)
    assert thin_part_fraction(c10, 3) == 0
    assert thin_part_fraction(c10, 6) == 1
    assert thin_part_fraction(library.path_graph(7), 4) == 0
    assert thin_part_fraction(library.rose(2).graph(), 2) == 1


@pytest.mark.parametrize("name", sorted(library.corpus()))
def test_codes_sound_on_corpus(name):
    adj = library.corpus()[name].graph()
    for r in (1, 2, 3):
        mismatches, _ = check_codes_against_brute_force(adj, r)
        assert mismatches == 0


def nx_to_adj(G):
    return {v: set(G[v]) for v in G}


graphs = st.builds(
    lambda n, p, seed: nx_to_adj(nx.gnp_random_graph(n, p, seed=seed)),
    st.integers(2, 14),
    st.floats(0.1, 0.6),
    st.integers(0, 10_000),
)


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 3))
def test_codes_sound_on_random_graphs(adj, r):
    assert check_codes_against_brute_force(adj, r)[0] == 0


@settings(max_examples=30, deadline=None)
@given(graphs, st.integers(0, 3))
def test_census_sums_to_one_and_is_deterministic(adj, r):
    s = ball_census(adj, r)
    assert sum(s.histogram.values()) == 1
    assert s == ball_census(adj, r)
    assert ball_census(adj, r, threads=3) == s


@settings(max_examples=30, deadline=None)
@given(graphs)
def test_code_invariant_under_relabelling(adj):
    perm = {v: 100 - v for v in adj}
    relabelled = {perm[v]: {perm[u] for u in nb} for v, nb in adj.items()}
    for v in adj:
        assert ball_code(adj, v, 2) == ball_code(relabelled, perm[v], 2)


@settings(max_examples=30, deadline=None)
@given(graphs)
def test_thin_part_endpoints_and_monotone(adj):
    prof = injectivity_radius_profile(adj)
    finite = [v for v in prof.values() if v != math.inf]
    lo = min(prof.values())
    if lo != math.inf:
        assert thin_part_fraction(adj, lo) == 0
    if finite:
        assert thin_part_fraction(adj, max(finite) + Fraction(1, 2)) == Fraction(len(finite), len(prof))
        if len(finite) == len(prof):
            assert thin_part_fraction(adj, max(finite) + Fraction(1, 2)) == 1
    p = thin_part_profile(adj, [Fraction(k, 2) for k in range(1, 12)])
    assert list(p.fractions) == sorted(p.fractions)
    assert all(0 <= f <= 1 for f in p.fractions)


def test_circle_tower_local_convergence():
    r = 3
    censuses = [ball_census(library.cycle_graph(n), r) for n in (8, 16, 32)]
    assert all(tv_distance(a, b) == 0 for a in censuses for b in censuses)
