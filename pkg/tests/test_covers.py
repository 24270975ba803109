from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llb import covers, library
from llb.complex import betti_number, betti_numbers
from llb.covers import (
    PermutationRep,
    check_tower,
    cover_from_permutations,
    deck_transformations,
    factors_through,
    free_subgroup_chain_tower,
    is_normal,
    is_transitive,
    normal_chain_tower,
    spanning_tree_generators,
)
from llb.errors import (
    DegreeMismatch,
    Disconnected,
    NoFreeQuotient,
    RelatorViolated,
    UnsupportedFamily,
    ValidationError,
)


def n_cycle(n):
    return tuple((i + 1) % n for i in range(n))


def test_presentations():
    assert (spanning_tree_generators(library.triangle_boundary()).rank,
            len(spanning_tree_generators(library.triangle_boundary()).relators)) == (1, 0)
    pres = spanning_tree_generators(library.rose(2))
    assert (pres.rank, len(pres.relators)) == (2, 0)
    pres = spanning_tree_generators(library.filled_triangle())
    assert pres.rank == 1 and len(pres.relators) == 1
    assert pres.exponent_matrix().tolist() in ([[1]], [[-1]])


def test_disconnected_presentation():
    with pytest.raises(Disconnected):
        spanning_tree_generators(library.disjoint_union(library.triangle_boundary(), library.triangle_boundary()))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_circle_cover_is_longer_circle(n):
    C = cover_from_permutations(library.triangle_boundary(), PermutationRep(n, (n_cycle(n),)))
    assert C.counts() == [3 * n, 3 * n]
    assert betti_numbers(C).values == (1, 1)


@pytest.mark.parametrize("name", ["rose2", "torus7", "filled_triangle", "genus2"])
def test_trivial_rep_gives_disjoint_copies(name):
    K = library.corpus()[name]
    pres = spanning_tree_generators(K)
    n = 3
    rep = PermutationRep(n, tuple(tuple(range(n)) for _ in range(pres.rank)), pres.relators)
    C = cover_from_permutations(K, rep, pres)
    assert betti_number(C, 0) == n * betti_number(K, 0)


def test_rose_transitive_degree_three():
    rep = PermutationRep(3, ((1, 2, 0), (1, 0, 2)))
    C = cover_from_permutations(library.rose(2), rep)
    assert is_transitive(rep)
    assert C.euler_characteristic() == -3
    assert betti_numbers(C).values == (1, 4)


def test_rep_validation_errors():
    with pytest.raises(ValidationError):
        PermutationRep(3, ((0, 0, 1),))
    with pytest.raises(DegreeMismatch):
        PermutationRep(3, ((0, 1),))
    with pytest.raises(DegreeMismatch):
        cover_from_permutations(library.rose(2), PermutationRep(2, ((1, 0),)))
    pres = spanning_tree_generators(library.filled_triangle())
    with pytest.raises(RelatorViolated):
        PermutationRep(2, ((1, 0),), pres.relators)
    with pytest.raises(RelatorViolated):
        cover_from_permutations(library.filled_triangle(), PermutationRep(2, ((1, 0),)), pres)


def test_circle_cyclic_tower():
    T = normal_chain_tower(library.triangle_boundary(), "cyclic", 3)
    assert T.degrees == [2, 4, 8]
    assert all(lv.is_normal and lv.is_connected for lv in T.levels)
    assert [lv.complex.n_cells(1) for lv in T.levels] == [6, 12, 24]
    check_tower(T)


def test_rose_mod2_first_level_degree_four():
    T = normal_chain_tower(library.rose(2), "mod-p", 1, p=2)
    assert T.degrees == [4]
    assert T.levels[0].is_normal


def test_genus2_mod2_homology_cover_degree_sixteen():
    T = normal_chain_tower(library.genus2_surface(), "mod-p", 1, p=2)
    assert T.degrees == [16]
    lv = T.levels[0]
    assert lv.is_normal and lv.is_connected
    assert betti_number(lv.complex, 1) == 34


def test_refined_mod_p_towers_nested_and_normal():
    T = normal_chain_tower(library.rose(2), "mod-p", 5, p=2, refine=True)
    assert T.degrees == [2, 4, 8, 16, 32]
    assert all(lv.is_normal for lv in T.levels)
    check_tower(T)
    T3 = normal_chain_tower(library.rose(2), "mod-p", 2, p=3, refine=True)
    assert T3.degrees == [3, 9]
    check_tower(T3)


def test_deck_group_acts_freely_and_transitively():
    T = normal_chain_tower(library.rose(2), "mod-p", 3, p=2, refine=True)
    for lv in T.levels:
        decks = deck_transformations(lv.rep)
        assert len(decks) == lv.degree
        fibre = list(range(lv.degree))
        # freely: only the identity fixes a sheet; transitively: sheet 0 reaches every sheet
        assert sorted(int(np.asarray(d)[0]) for d in decks) == fibre
        for d in decks:
            d = np.asarray(d)
            assert np.array_equal(d, np.arange(lv.degree)) or not (d == np.arange(lv.degree)).any()


def test_unsupported_family():
    with pytest.raises(UnsupportedFamily):
        normal_chain_tower(library.rose(2), "congruence", 2)
    with pytest.raises(UnsupportedFamily):
        normal_chain_tower(library.filled_triangle(), "cyclic", 2)


def test_free_chain_rose():
    T = free_subgroup_chain_tower(library.rose(2), 6)
    assert T.degrees == [1, 2, 3, 4, 5, 6]
    assert T.levels[0].complex == library.rose(2)
    for lv in T.levels:
        assert lv.is_connected
        assert betti_number(lv.complex, 1) == lv.degree + 1
    check_tower(T)


def test_free_chain_genus2_exceeds_limit_prediction():
    T = free_subgroup_chain_tower(library.genus2_surface(), 2, covers.genus2_free_surjection())
    lv = T.levels[1]
    assert lv.degree == 2 and lv.is_connected
    assert betti_number(lv.complex, 1) > 2 * lv.degree


def test_no_free_quotient():
    with pytest.raises(NoFreeQuotient):
        free_subgroup_chain_tower(library.torus7(), 2)


def test_free_surjection_is_onto():
    words = covers.check_free_surjection(library.genus2_surface(), covers.genus2_free_surjection())
    letters = {a for w in words.values() for a, _ in w}
    assert letters == {0, 1}


def test_factors_through():
    T = normal_chain_tower(library.triangle_boundary(), "cyclic", 3)
    assert factors_through(T.levels[2].rep, T.levels[0].rep)
    assert not factors_through(T.levels[0].rep, T.levels[2].rep)


perm_reps = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))).map(
        lambda gs: PermutationRep(n, (tuple(gs[0]), tuple(gs[1])))
    )
)


@settings(max_examples=60, deadline=None)
@given(perm_reps)
def test_rose_covers_euler_and_betti(rep):
    K = library.rose(2)
    C = cover_from_permutations(K, rep)
    assert C.counts() == [rep.degree * c for c in K.counts()]
    assert C.euler_characteristic() == rep.degree * K.euler_characteristic()
    b0 = betti_number(C, 0)
    assert (b0 == 1) == is_transitive(rep)
    if b0 == 1:
        assert betti_number(C, 1) == rep.degree + 1
    if is_normal(rep):
        assert len(deck_transformations(rep)) == rep.degree


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2))
def test_torus_cyclic_covers(depth, shift):
    T = normal_chain_tower(library.torus7(), "cyclic", depth, modulus_base=2 + shift)
    for lv in T.levels:
        assert lv.complex.euler_characteristic() == 0
        assert Fraction(betti_number(lv.complex, 1), lv.degree) == Fraction(2, lv.degree)
    check_tower(T)
