import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llb import hyperbolic as hyp
from llb.errors import TOutOfWindow, UnsupportedSpace, ValidationError, WindowEmpty


# ---------------------------------------------------------------- geometry


def test_distance_matches_disk_formula():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = (rng.random(2) * 0.9) * np.exp(2j * np.pi * rng.random(2))
        d_disk = math.acosh(1 + 2 * abs(a - b) ** 2 / ((1 - abs(a) ** 2) * (1 - abs(b) ** 2)))
        assert hyp.h2_distance(hyp.disk_to_uhp(a), hyp.disk_to_uhp(b)) == pytest.approx(d_disk, rel=1e-9, abs=1e-12)


def test_generators_are_isometries():
    S = hyp.genus2_octagon_surface()
    z, w = 0.3 + 1.2j, -0.5 + 0.7j
    for g in S.generators:
        assert hyp.h2_distance(hyp.mobius(g, z), hyp.mobius(g, w)) == pytest.approx(hyp.h2_distance(z, w), rel=1e-10)


def test_octagon_generators_translate_by_systole_length():
    S = hyp.genus2_octagon_surface()
    for g in S.generators:
        assert hyp.translation_length(g) == pytest.approx(hyp.genus2_systole(), rel=1e-9)
    assert 2 * hyp.injectivity_radius(S, 1j) >= hyp.genus2_systole() - 1e-9


def test_rejects_bad_determinant():
    g = np.array([[0.9, 0.0], [0.0, 1.0]])
    with pytest.raises(ValidationError):
        hyp.HyperbolicSurface([g])


def test_rejects_elliptic_generator():
    c, s = math.cos(0.3), math.sin(0.3)
    with pytest.raises(ValidationError):
        hyp.HyperbolicSurface([np.array([[c, -s], [s, c]])])


def test_rejects_broken_relator():
    S = hyp.genus2_octagon_surface()
    bad = list(S.relator)
    bad[0], bad[1] = bad[1], bad[0]
    with pytest.raises(ValidationError):
        hyp.HyperbolicSurface(S.generators, bad, 1j, S.area, S.domain_radius)


def test_noncyclic_needs_domain_radius():
    S = hyp.genus2_octagon_surface()
    with pytest.raises(ValidationError):
        hyp.HyperbolicSurface(S.generators, S.relator)


# ---------------------------------------------------------------- heat kernel


@pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
def test_kernel_mass_and_semigroup(t):
    assert abs(hyp.kernel_mass(t) - 1) < 1e-6
    assert abs(hyp.kernel_semigroup_diagonal(t) - hyp.h2_heat_kernel(0.0, 2 * t)) < 1e-6


def test_kernel_small_t_is_euclidean_like():
    t = 1e-3
    assert hyp.h2_heat_kernel(0.0, t) == pytest.approx(1 / (4 * math.pi * t), rel=2e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.0, 8.0), st.floats(0.01, 2.0))
def test_kernel_positive_and_decreasing_in_distance(t, d, h):
    a = hyp.h2_heat_kernel(d, t)
    b = hyp.h2_heat_kernel(d + h, t)
    assert a > 0 and b > 0
    assert b < a


def test_kernel_rejects_t_outside_window():
    with pytest.raises(TOutOfWindow):
        hyp.h2_heat_kernel(1.0, 11.0)
    with pytest.raises(TOutOfWindow):
        hyp.h2_heat_kernel(1.0, 0.0)
    assert hyp.h2_heat_kernel(1.0, 11.0, window=20) > 0


def test_gaussian_fit_validates_on_dense_grid():
    fit = hyp.fit_gaussian_constant(5.0)
    t_dense, d_dense = hyp.gaussian_grid(5.0, t_per_octave=12, d_step=1 / 6)
    assert hyp.gaussian_violations(fit.c1, t_dense, d_dense) == []
    assert fit.argmax in [(d, t) for d in fit.d_grid for t in fit.t_grid]


def test_gaussian_constant_grows_with_window():
    # the grid for window m is a subset of the grid for 2m, so the fitted constant cannot shrink
    c5 = hyp.fit_gaussian_constant(5.0).c1
    c10 = hyp.fit_gaussian_constant(10.0).c1
    assert c10 >= c5


def test_gaussian_empty_window():
    with pytest.raises(WindowEmpty):
        hyp.gaussian_grid(0.0)
    with pytest.raises(WindowEmpty):
        hyp.gaussian_grid(0.01)


# ---------------------------------------------------------------- orbits


@pytest.mark.parametrize("ell", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("R", [0.0, 0.7, 3.0, 6.1])
def test_cyclic_orbit_count_on_axis(ell, R):
    S = hyp.cyclic_surface(ell)
    n = len(hyp.orbit_enumerate(S, 1j, 1j, R))
    assert n == 2 * math.floor(R / ell + 1e-12) + 1


def test_zero_radius_gives_identity_only():
    S = hyp.genus2_octagon_surface()
    elems = hyp.orbit_enumerate(S, 1j, 1j, 0.0)
    assert len(elems) == 1 and elems[0].word == ()


def test_genus2_below_systole_identity_only():
    S = hyp.genus2_octagon_surface()
    elems = hyp.orbit_enumerate(S, 1j, 1j, 0.99 * hyp.genus2_systole())
    assert [e.word for e in elems] == [()]


@pytest.mark.parametrize("x", [1j, hyp.disk_to_uhp(0.3 + 0.2j)])
def test_orbit_matches_brute_force(x):
    S = hyp.genus2_octagon_surface()
    R = 5.0
    fast = sorted(round(e.distance, 9) for e in hyp.orbit_enumerate(S, x, x, R))
    slow = sorted(round(d, 9) for d in hyp.brute_force_orbit(S, x, x, R, 6))
    assert fast == slow


def test_orbit_distances_are_distances():
    S = hyp.genus2_octagon_surface()
    x, y = 1j, 0.2 + 1.1j
    for e in hyp.orbit_enumerate(S, x, y, 4.0):
        assert e.distance <= 4.0 + 1e-12
        assert e.distance == pytest.approx(hyp.h2_distance(x, hyp.mobius(e.matrix, y)), abs=1e-9)


def test_count_constant_bounds_every_case():
    S = hyp.cyclic_surface(0.5)
    cases = hyp.count_cases(S, [hyp.cylinder_point(d) for d in (0.0, 1.0)], [0.5, 2.0, 4.0])
    c2 = hyp.fit_count_constant(cases)
    for c in cases:
        assert c.count <= hyp.count_bound(c2, c.R, c.injrad) * (1 + 1e-9)


def test_cylinder_injectivity_radius():
    ell = 1.0
    S = hyp.cyclic_surface(ell)
    for delta in (0.0, 0.5, 1.5):
        # translation by ell moves a point at distance delta from the axis by 2 asinh(cosh(delta) sinh(ell/2))
        expected = math.asinh(math.cosh(delta) * math.sinh(ell / 2))
        assert hyp.injectivity_radius(S, hyp.cylinder_point(delta)) == pytest.approx(expected, rel=1e-9)


# ---------------------------------------------------------------- method of images


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.25, 1.0])
def test_cylinder_images_match_lattice_sum(ell, t):
    S = hyp.cyclic_surface(ell)
    kv = hyp.surface_heat_diagonal(S, 1j, t, 1e-8)
    assert abs(kv.value - hyp.cylinder_lattice_sum(ell, t)) <= kv.truncation_bound + 1e-12


def test_huge_eps_uses_identity_only():
    S = hyp.cyclic_surface(1.0)
    kv = hyp.surface_heat_diagonal(S, 1j, 0.5, 1e6)
    assert kv.images_used == 1 and kv.radius == 0.0
    assert kv.value == hyp.h2_heat_kernel(0.0, 0.5)


def test_far_from_thin_part_approaches_plane_kernel():
    S = hyp.cyclic_surface(1.0)
    t = 0.25
    kv = hyp.surface_heat_diagonal(S, hyp.cylinder_point(4.0), t, 1e-10)
    assert kv.value == pytest.approx(hyp.h2_heat_kernel(0.0, t), rel=1e-6)


def test_deviation_subset_constant_not_larger():
    S = hyp.cyclic_surface(0.5)
    pts = [hyp.cylinder_point(d) for d in (0.0, 0.5, 1.0, 2.0)]
    full = hyp.deviation_vs_injrad(S, pts, 0.5, eps=1e-9)
    thick = sorted(full.rows, key=lambda r: -r.injrad)[:2]
    assert max(r.ratio for r in thick) <= full.empirical_c


# ---------------------------------------------------------------- sampling


def test_dirichlet_samples_lie_in_domain():
    S = hyp.genus2_octagon_surface()
    pts = hyp.dirichlet_samples(S, 50, seed=3)
    assert len(pts) == 50
    assert S.in_domain(pts).all()
    assert (hyp.h2_distance(pts, 1j) <= S.domain_radius + 1e-12).all()


def test_dirichlet_samples_reproducible():
    S = hyp.genus2_octagon_surface()
    assert np.array_equal(hyp.dirichlet_samples(S, 10, seed=1), hyp.dirichlet_samples(S, 10, seed=1))


# ---------------------------------------------------------------- compact duals and genus limit


def test_compact_dual_catalog():
    assert hyp.compact_dual_l2_betti("H2", 1) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    for k in (0, 2):
        assert hyp.compact_dual_l2_betti("H2", k) == 0
    for k in range(4):
        assert hyp.compact_dual_l2_betti("H3", k) == 0


def test_unsupported_space():
    with pytest.raises(UnsupportedSpace):
        hyp.compact_dual_l2_betti("H5", 2)


@pytest.mark.parametrize("g", [2, 3, 10, 1000, 10**6])
def test_genus_limit_exact(g):
    (row,) = hyp.genus_limit_check([g])
    assert row.deviation_over_pi == Fraction(1, 2 * (g - 1))
    assert row.deviation == pytest.approx(1 / (2 * math.pi * (g - 1)), rel=1e-12)


def test_genus_limit_rejects_low_genus():
    with pytest.raises(ValueError):
        hyp.genus_limit_check([1])
