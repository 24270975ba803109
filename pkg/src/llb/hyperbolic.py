"""Scalar heat kernel of H^2, Fuchsian orbit enumeration and quotient kernels by the method of images.

Conventions: upper half-plane, curvature -1, heat equation ``u_t = Delta u``
with the nonnegative Laplacian, group elements as SL(2, R) matrices taken up
to sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np
from scipy import integrate, optimize
from scipy.special import lambertw

from .errors import (
    PruningUnsound,
    TOutOfWindow,
    TruncationUnreachable,
    UnsupportedSpace,
    ValidationError,
    WindowEmpty,
)

DEFAULT_WINDOW = 10.0
DET_TOL = 1e-10
RELATOR_TOL = 1e-8
KEY_SCALE = 1e6  # matrix entries are compared after rounding to 1e-6


# ---------------------------------------------------------------- geometry


def mobius(g, z):
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    return (a * z + b) / (c * z + d)


def mobius_many(G, z):
    """Images of one point under a stack of matrices of shape (N, 2, 2)."""
    return (G[:, 0, 0] * z + G[:, 0, 1]) / (G[:, 1, 0] * z + G[:, 1, 1])


def h2_distance(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def disk_to_uhp(w):
    return 1j * (1 + w) / (1 - w)


def uhp_to_disk(z):
    return (z - 1j) / (z + 1j)


def su11_to_sl2r(M):
    """Conjugate a disk automorphism [[a, b], [conj b, conj a]] to a real matrix acting on H^2."""
    C = np.array([[1, -1j], [1, 1j]])  # z -> (z - i)/(z + i)
    Cinv = np.linalg.inv(C)
    H = Cinv @ np.asarray(M, dtype=complex) @ C
    if np.abs(H.imag).max() > 1e-9:
        raise ValidationError("matrix does not preserve the unit disk")
    H = H.real
    return H / math.sqrt(abs(np.linalg.det(H)))


def translation_length(g):
    tr = abs(np.trace(g))
    return 2.0 * math.acosh(tr / 2.0) if tr > 2 else 0.0


def evaluate_word(word, generators):
    M = np.eye(2)
    for j, s in word:
        g = generators[j] if s > 0 else np.linalg.inv(generators[j])
        for _ in range(abs(s)):
            M = M @ g
    return M


# ---------------------------------------------------------------- surfaces


@dataclass
class HyperbolicSurface:
    """Quotient of H^2 by the group generated by ``generators``.

    ``domain_radius`` bounds the distance from ``basepoint`` to every point of a
    fundamental domain whose side pairings are the generators; orbit
    enumeration prunes with it.  Cyclic groups need no domain radius.
    """

    generators: list
    relator: list = field(default_factory=list)
    basepoint: complex = 1j
    area: float | None = None
    domain_radius: float | None = None
    label: str = ""

    def __post_init__(self):
        self.generators = [np.asarray(g, dtype=float).reshape(2, 2) for g in self.generators]
        self.relator = [tuple(x) for x in self.relator]
        for i, g in enumerate(self.generators):
            det = np.linalg.det(g)
            if abs(det - 1) > DET_TOL:
                raise ValidationError(f"generator {i} has determinant {det:.12g}, not 1")
            if abs(np.trace(g)) <= 2:
                raise ValidationError(f"generator {i} is not hyperbolic (|trace| = {abs(np.trace(g)):.6g})")
        if self.relator:
            M = evaluate_word(self.relator, self.generators)
            err = min(np.linalg.norm(M - np.eye(2), 2), np.linalg.norm(M + np.eye(2), 2))
            if err > RELATOR_TOL:
                raise ValidationError(f"relator evaluates {err:.3g} away from +-identity")
        if not self.is_cyclic and self.domain_radius is None:
            raise ValidationError("non-cyclic surfaces need a domain_radius for certified orbit pruning")

    @property
    def is_cyclic(self):
        return len(self.generators) == 1

    @cached_property
    def neighbour_matrices(self):
        """Elements moving the basepoint at most twice the domain radius (they cut out the Dirichlet domain)."""
        p = complex(self.basepoint)
        return np.array([e.matrix for e in orbit_enumerate(self, p, p, 2 * self.domain_radius + 1e-9, recheck=False) if e.word])

    def in_domain(self, z, tol=1e-12):
        """Is z in the closed Dirichlet domain about the basepoint?"""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        p = complex(self.basepoint)
        d0 = h2_distance(z, p)
        dn = h2_distance(z[:, None], mobius_many(self.neighbour_matrices, p)[None, :])
        return (d0[:, None] <= dn + tol).all(axis=1)


def cyclic_surface(length):
    """Hyperbolic cylinder: z -> e^length z, axis the imaginary axis."""
    g = np.diag([math.exp(length / 2), math.exp(-length / 2)])
    return HyperbolicSurface([g], [], 1j, None, None, f"cylinder(l={length:g})")


OCTAGON_RELATOR = [(0, 1), (1, -1), (2, 1), (3, -1), (0, -1), (1, 1), (2, -1), (3, 1)]


def genus2_octagon_surface():
    """Genus-2 surface from the regular octagon with angles pi/4; opposite sides paired.

    Generator k translates along the axis through the centre at angle k*pi/4.
    """
    alpha = 1 + math.sqrt(2)
    beta = math.sqrt(2 + 2 * math.sqrt(2))
    gens = []
    for k in range(4):
        phase = np.exp(1j * k * math.pi / 4)
        M = np.array([[alpha, beta * phase], [beta * np.conj(phase), alpha]])
        gens.append(su11_to_sl2r(M))
    rho = math.acosh(3 + 2 * math.sqrt(2))  # circumradius of the octagon
    return HyperbolicSurface(gens, OCTAGON_RELATOR, 1j, 4 * math.pi, rho, "genus2-octagon")


def genus2_systole():
    return 2 * math.acosh(1 + math.sqrt(2))


# ---------------------------------------------------------------- heat kernel


def _check_t(t, window):
    if not 0 < t <= window:
        raise TOutOfWindow(f"t = {t} outside the window (0, {window}]")


def _kernel_integrand(u, rho, t):
    if u == 0.0:
        return 0.0 if rho == 0 else 2 * rho * math.sqrt(2) / math.sqrt(-math.expm1(-2 * rho))
    u2 = u * u
    num = 2.0 * u * (rho + u2) * math.exp(-(2 * rho * u2 + u2 * u2) / (4 * t) - u2 / 4)
    den = math.sqrt(-math.expm1(-(2 * rho + u2)) * math.sinh(u2 / 2))
    return num / den


@lru_cache(maxsize=200_000)
def _h2_kernel(dist, t):
    # s = dist + u^2 removes the inverse square-root singularity at s = dist
    upper = (3200.0 * t) ** 0.25 + 1.0
    val, _ = integrate.quad(_kernel_integrand, 0.0, upper, args=(dist, t), epsabs=0.0, epsrel=1e-11, limit=400)
    pref = math.sqrt(2) * math.exp(-t / 4) / (4 * math.pi * t) ** 1.5
    return pref * math.exp(-dist * dist / (4 * t) - dist / 2) * val


def h2_heat_kernel(dist, t, window=DEFAULT_WINDOW):
    """p_t(dist) for the scalar heat kernel on H^2 (McKean's integral)."""
    _check_t(t, window)
    if dist < 0:
        raise ValueError("distance must be nonnegative")
    return _h2_kernel(float(dist), float(t))


def kernel_mass(t, window=DEFAULT_WINDOW):
    """2 pi int_0^inf p_t(s) sinh(s) ds (should be 1)."""
    smax = t + math.sqrt(160 * t) + 10

    def f(s):
        return h2_heat_kernel(s, t, window) * math.sinh(s)

    val, _ = integrate.quad(f, 0, smax, epsabs=0, epsrel=1e-10, limit=400, points=[t])
    return 2 * math.pi * val


def kernel_semigroup_diagonal(t, window=DEFAULT_WINDOW):
    """2 pi int_0^inf p_t(s)^2 sinh(s) ds (should equal p_{2t}(0))."""
    smax = t + math.sqrt(160 * t) + 10

    def f(s):
        return h2_heat_kernel(s, t, window) ** 2 * math.sinh(s)

    val, _ = integrate.quad(f, 0, smax, epsabs=0, epsrel=1e-10, limit=400)
    return 2 * math.pi * val


# ---------------------------------------------------------------- Gaussian constant


@dataclass
class GaussianFit:
    c1: float
    window: float
    t_grid: np.ndarray
    d_grid: np.ndarray
    argmax: tuple


def _min_gaussian_c(p, d):
    """Smallest c with p <= c exp(-d^2/c); c exp(-d^2/c) is increasing in c."""
    if d == 0:
        return p
    target = math.log(p)

    def f(logc):
        return logc - d * d / math.exp(logc) - target

    lo, hi = -50.0, 50.0
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def gaussian_grid(window, t_min=0.05, t_per_octave=4, d_max=12.0, d_step=0.5):
    """t = window * 2^(-j/t_per_octave) down to t_min (nested under doubling), d on a uniform grid."""
    if window <= 0 or window < t_min:
        raise WindowEmpty(f"window (0, {window}] holds no grid points above t_min = {t_min}")
    j_max = int(math.floor(t_per_octave * math.log2(window / t_min) + 1e-12))
    t_grid = window * 2.0 ** (-np.arange(j_max + 1) / t_per_octave)
    d_grid = np.arange(0.0, d_max + d_step / 2, d_step)
    return t_grid[::-1], d_grid


def gaussian_violations(c1, t_grid, d_grid, window=DEFAULT_WINDOW):
    bad = []
    for t in t_grid:
        for d in d_grid:
            p = h2_heat_kernel(d, t, max(window, t))
            if p > c1 * math.exp(-d * d / c1) * (1 + 1e-12):
                bad.append((float(d), float(t)))
    return bad


def fit_gaussian_constant(window, t_min=0.05, t_per_octave=4, d_max=12.0, d_step=0.5) -> GaussianFit:
    t_grid, d_grid = gaussian_grid(window, t_min, t_per_octave, d_max, d_step)
    best, arg = 0.0, None
    for t in t_grid:
        for d in d_grid:
            c = _min_gaussian_c(h2_heat_kernel(d, t, max(window, t)), d)
            if c > best:
                best, arg = c, (float(d), float(t))
    return GaussianFit(best, window, t_grid, d_grid, arg)


# ---------------------------------------------------------------- orbit enumeration


@dataclass
class OrbitElement:
    word: tuple
    matrix: np.ndarray
    image: complex
    distance: float


def _normalize(M):
    # PSL representative: first nonzero entry positive
    flat = M.reshape(-1)
    i = 0 if abs(flat[0]) > 1e-12 else 1
    return M if flat[i] > 0 else -M


def _candidate_keys(M):
    """Rounded entries; both roundings are tried for entries sitting on a rounding boundary."""
    vals = _normalize(M).reshape(-1) * KEY_SCALE
    options = []
    for v in vals:
        r = round(v)
        opts = [r]
        frac = v - math.floor(v)
        if abs(frac - 0.5) < 1e-3:
            opts.append(math.floor(v) if r != math.floor(v) else math.floor(v) + 1)
        options.append(opts)
    return [tuple(k) for k in product(*options)]


def _batch_keys(M):
    flat = M.reshape(-1, 4)
    lead = np.where(np.abs(flat[:, 0]) > 1e-12, flat[:, 0], flat[:, 1])
    scaled = flat * np.sign(lead)[:, None] * KEY_SCALE
    frac = scaled - np.floor(scaled)
    near = (np.abs(frac - 0.5) < 1e-3).any(axis=1)
    return np.rint(scaled).astype(np.int64).tolist(), near


class _ElementSet:
    def __init__(self):
        self.keys = {}

    def find(self, M):
        for k in _candidate_keys(M):
            if k in self.keys:
                return self.keys[k]
        return None

    def add(self, M, value):
        if self.find(M) is not None:
            return False
        self.keys[_candidate_keys(M)[0]] = value
        return True

    def add_batch(self, mats, values):
        """Insert in order; returns the indices that were new."""
        keys, near = _batch_keys(mats)
        new = []
        for i, k in enumerate(keys):
            if near[i]:
                if self.add(mats[i], values[i]):
                    new.append(i)
                continue
            k = tuple(k)
            if k not in self.keys:
                self.keys[k] = values[i]
                new.append(i)
        return new

    def missing(self, mats):
        keys, near = _batch_keys(mats)
        out = []
        for i, k in enumerate(keys):
            hit = self.find(mats[i]) is not None if near[i] else tuple(k) in self.keys
            if not hit:
                out.append(i)
        return out


def _compose(A, L):
    """All products A[n] @ L[k], shape (len(A) * len(L), 2, 2), row-major in (n, k)."""
    a = A[:, None, :, :]
    b = L[None, :, :, :]
    out = np.empty((A.shape[0], L.shape[0], 2, 2))
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out.reshape(-1, 2, 2)


def _letters(S: HyperbolicSurface):
    mats, labels = [], []
    for j, g in enumerate(S.generators):
        mats.append(g)
        labels.append((j, 1))
        mats.append(np.linalg.inv(g))
        labels.append((j, -1))
    return np.array(mats), labels


def _axis_distance_cyclic(g, z):
    """Distance from z to the axis of the hyperbolic element g."""
    ell = translation_length(g)
    disp = float(h2_distance(z, mobius(g, z)))
    # sinh(disp/2) = cosh(dist) sinh(ell/2)
    return math.acosh(max(1.0, math.sinh(disp / 2) / math.sinh(ell / 2)))


def _orbit_cyclic(S, x, y, R):
    g = S.generators[0]
    ell = translation_length(g)
    jmax = int(math.ceil((R + _axis_distance_cyclic(g, x) + _axis_distance_cyclic(g, y)) / ell)) + 1
    out = []
    ginv = np.linalg.inv(g)
    for j in range(-jmax, jmax + 1):
        M = np.linalg.matrix_power(g if j >= 0 else ginv, abs(j))
        img = complex(mobius(M, y))
        d = float(h2_distance(x, img))
        if d <= R:
            out.append(OrbitElement(((0, j),) if j else (), M, img, d))
    # d(x, g^j y) >= |j| ell - d(x, axis) - d(y, axis): nothing beyond jmax can be within R
    return out


def orbit_enumerate(S: HyperbolicSurface, x, y, R, recheck=True):
    """All group elements g with d(x, g y) <= R, each once, sorted by distance.

    Breadth-first search over words, right-multiplying by generators.  A word
    w is expanded only while d(x, w p) <= max(R + d(y, p), d(x, p)) + rho,
    where p is the basepoint and rho the domain radius: the tiles meeting a
    ball form an edge-connected set, so every element whose tile meets the
    ball is reached through such words.  With ``recheck`` every pruned word
    is extended by two more letters and must not produce a missed element.
    """
    if R < 0:
        raise ValueError("radius must be nonnegative")
    x, y = complex(x), complex(y)
    if S.is_cyclic:
        out = _orbit_cyclic(S, x, y, R)
        return sorted(out, key=lambda e: (e.distance, len(e.word)))
    p = complex(S.basepoint)
    if _domain_known(S, x, y):
        # tiles meeting B(x, R) are edge-connected, contain the identity tile and hold every g y
        reach = R + S.domain_radius + 1e-9
    else:
        reach = max(R + float(h2_distance(y, p)), float(h2_distance(x, p))) + S.domain_radius + 1e-9
    letters, labels = _letters(S)
    seen = _ElementSet()
    ident = np.eye(2)
    seen.add(ident, ())
    words = [()]
    mats = [ident]
    frontier = np.array([ident])
    frontier_words = [()]
    pruned = []
    while len(frontier):
        children = _compose(frontier, letters)
        inside = h2_distance(x, mobius_many(children, p)) <= reach
        pruned.append(children[~inside])
        idx = np.nonzero(inside)[0]
        cand_words = [frontier_words[i // len(labels)] + (labels[i % len(labels)],) for i in idx]
        new = seen.add_batch(children[idx], cand_words)
        frontier = children[idx[new]]
        frontier_words = [cand_words[i] for i in new]
        words += frontier_words
        mats.extend(frontier)
    M = np.array(mats)
    imgs = mobius_many(M, y)
    d = h2_distance(x, imgs)
    out = [OrbitElement(words[i], M[i], complex(imgs[i]), float(d[i])) for i in np.nonzero(d <= R)[0]]
    if recheck:
        _recheck_pruned(np.concatenate(pruned), letters, x, y, R, seen)
    return sorted(out, key=lambda e: (e.distance, len(e.word)))


def _domain_known(S, x, y):
    p = complex(S.basepoint)
    rho = S.domain_radius
    if "neighbour_matrices" not in S.__dict__ and x == p and y == p:
        return False  # bootstrap: the neighbour list itself is computed from the basepoint
    if h2_distance(x, p) > rho or h2_distance(y, p) > rho:
        return False
    return bool(S.in_domain([x, y]).all())


def _recheck_pruned(pruned, letters, x, y, R, seen):
    """Extend every pruned word by up to two letters; none may land within R unseen.

    d(x, w u y) >= d(x, w y) - d(y, u y), so only pruned words with
    d(x, w y) <= R + max_u d(y, u y) over words u of length <= 2 can matter.
    """
    two = np.concatenate([letters, _compose(letters, letters)])
    slack = float(h2_distance(y, mobius_many(two, y)).max())
    level = pruned[h2_distance(x, mobius_many(pruned, y)) <= R + slack + 1e-9]
    for step in range(3):
        close = level[h2_distance(x, mobius_many(level, y)) <= R]
        if len(close) and seen.missing(close):
            raise PruningUnsound("a pruned word extends to an element within the radius that was not found")
        if step < 2:
            level = _compose(level, letters)


def brute_force_orbit(S: HyperbolicSurface, x, y, R, max_length):
    """Distinct elements with d(x, g y) <= R among all reduced words of length <= max_length."""
    letters, labels = _letters(S)
    inverse_of = [k ^ 1 for k in range(len(labels))]
    x, y = complex(x), complex(y)
    seen = _ElementSet()
    hits = []

    def consider(M):
        d = float(h2_distance(x, mobius(M, y)))
        if d <= R and seen.add(M, True):
            hits.append(d)

    consider(np.eye(2))
    level = letters.copy()
    last = np.arange(len(labels))
    for length in range(1, max_length + 1):
        imgs = mobius_many(level, y)
        for i in np.nonzero(h2_distance(x, imgs) <= R)[0]:
            consider(level[i])
        if length == max_length:
            break
        nxt_m, nxt_last = [], []
        for k in range(len(labels)):
            keep = last != inverse_of[k]
            nxt_m.append(level[keep] @ letters[k])
            nxt_last.append(np.full(int(keep.sum()), k))
        level = np.concatenate(nxt_m)
        last = np.concatenate(nxt_last)
    return sorted(hits)


def injectivity_radius(S: HyperbolicSurface, x):
    """Half the shortest displacement d(x, g x) over g != 1."""
    R = 1.0
    while True:
        elems = [e for e in orbit_enumerate(S, x, x, R, recheck=False) if e.word]
        if elems:
            return min(e.distance for e in elems) / 2.0
        R *= 2.0
        if R > 200:
            raise TruncationUnreachable("no nontrivial element found; group may be trivial")


def min_displacements(S: HyperbolicSurface, points):
    return np.array([2.0 * injectivity_radius(S, z) for z in points])


# ---------------------------------------------------------------- orbit-count constant


def min_count_constant(count, R, injrad, dim=2):
    """Smallest c with count <= c exp(c R) injrad^(-dim)."""
    A = count * injrad**dim
    if R == 0:
        return A
    return float(np.real(lambertw(A * R)) / R)


@dataclass
class CountCase:
    label: str
    point: complex
    R: float
    count: int
    injrad: float

    @property
    def constant(self):
        return min_count_constant(self.count, self.R, self.injrad)


def count_cases(S: HyperbolicSurface, points, radii, label=None):
    cases = []
    for z in points:
        inj = injectivity_radius(S, z)
        for R in radii:
            n = len(orbit_enumerate(S, z, z, R, recheck=False))
            cases.append(CountCase(label or S.label, complex(z), float(R), n, inj))
    return cases


def fit_count_constant(cases):
    return max(c.constant for c in cases)


def count_bound(c2, R, injrad, dim=2):
    return c2 * math.exp(c2 * R) * injrad ** (-dim)


def standard_count_corpus(radii=(0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)):
    """Cylinders l in {0.25, 0.5, 1, 2} at several axis distances, plus octagon points."""
    cases = []
    for ell in (0.25, 0.5, 1.0, 2.0):
        S = cyclic_surface(ell)
        pts = [cylinder_point(delta) for delta in (0.0, 0.5, 1.0)]
        cases += count_cases(S, pts, radii)
    G = genus2_octagon_surface()
    cases += count_cases(G, octagon_points(), [r for r in radii if r <= 5.0])
    return cases


@lru_cache(maxsize=1)
def default_count_constant():
    return fit_count_constant(standard_count_corpus())


# ---------------------------------------------------------------- method of images


@dataclass
class KernelValue:
    value: float
    truncation_bound: float
    images_used: int
    radius: float
    injrad: float


def cylinder_point(delta, length=None):
    """Point at distance ``delta`` from the imaginary axis (the cylinder's core geodesic)."""
    theta = math.asin(1.0 / math.cosh(delta))  # angle from the real axis
    return complex(math.cos(theta), math.sin(theta))


def tail_bound(t, R, c2, injrad, window=DEFAULT_WINDOW, step=0.5):
    """Bound on sum of p_t(d(x, g x)) over images beyond distance R.

    Shell [R + j h, R + (j+1) h] holds at most count_bound(R + (j+1) h) images,
    each contributing at most p_t(R + j h).
    """
    total = 0.0
    j = 0
    while True:
        r = R + j * step
        term = count_bound(c2, r + step, injrad) * h2_heat_kernel(r, t, window)
        total += term
        if term < 1e-4 * total + 1e-300 or (term == 0.0):
            # the shell terms decay like exp(-r^2/4t + c2 r); remaining ones sum to far less
            if h2_heat_kernel(r, t, window) * count_bound(c2, r + step, injrad) < 1e-6 * max(total, 1e-300):
                break
        j += 1
        if j > 10_000:
            break
    return total


def surface_heat_diagonal(S: HyperbolicSurface, x, t, eps, c2=None, radius=None, window=DEFAULT_WINDOW,
                          max_radius=40.0, max_images=2_000_000) -> KernelValue:
    """Quotient heat kernel on the diagonal, sum over images of p_t(d(x, g x)).

    Without ``radius`` the truncation radius is the smallest multiple of 0.25
    with tail bound <= eps; with ``radius`` it is used as given and the tail
    bound at that radius reported.
    """
    _check_t(t, window)
    if eps <= 0:
        raise ValueError("eps must be positive")
    c2 = default_count_constant() if c2 is None else c2
    inj = injectivity_radius(S, x)
    if radius is None:
        R = 0.0
        while tail_bound(t, R, c2, inj, window) > eps:
            R += 0.25
            if R > max_radius:
                raise TruncationUnreachable(f"tail bound above {eps:g} at radius {max_radius}")
    else:
        R = float(radius)
    if S.area and 2 * math.pi * (math.cosh(R + 2 * S.domain_radius) - 1) / S.area > max_images:
        # tiles of the search region bounded by ball area over surface area
        raise TruncationUnreachable(f"radius {R:g} needs more than {max_images} images")
    elems = orbit_enumerate(S, x, x, R)
    value = math.fsum(h2_heat_kernel(e.distance, t, window) for e in elems)
    return KernelValue(value, tail_bound(t, R, c2, inj, window), len(elems), R, inj)


def cylinder_lattice_sum(length, t, window=DEFAULT_WINDOW):
    """sum over j in Z of p_t(|j| length): the diagonal kernel on the cylinder's core geodesic."""
    total = h2_heat_kernel(0.0, t, window)
    j = 1
    while True:
        term = 2 * h2_heat_kernel(j * length, t, window)
        total += term
        if term < 1e-18 * total:
            return total
        j += 1


# ---------------------------------------------------------------- sampling and deviation tables


def _uniform_ball(rng, center_radius, n):
    """n points uniform (hyperbolic area) in the disc of radius ``center_radius`` about i."""
    u = rng.random(n)
    r = np.arccosh(1 + u * (math.cosh(center_radius) - 1))
    theta = rng.random(n) * 2 * math.pi
    return disk_to_uhp(np.tanh(r / 2) * np.exp(1j * theta))


def dirichlet_samples(S: HyperbolicSurface, n, seed=0, batch=256):
    """Uniform points of the Dirichlet domain at the basepoint by rejection from the ball of radius rho.

    The basepoint must be i.
    """
    if S.is_cyclic:
        raise ValidationError("Dirichlet sampling needs a cocompact group")
    if abs(complex(S.basepoint) - 1j) > 1e-12:
        raise ValidationError("Dirichlet sampling assumes basepoint i")
    rho = S.domain_radius
    p = 1j
    N = S.neighbour_matrices
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = _uniform_ball(rng, rho, batch)
        d0 = h2_distance(z, p)
        imgs = mobius_many(N, p)  # neighbour basepoints
        dn = h2_distance(z[:, None], imgs[None, :])
        keep = (d0[:, None] <= dn).all(axis=1)
        out.extend(z[keep].tolist())
    return np.array(out[:n])


def octagon_points(n=6, seed=11):
    """Basepoint, an interior point and Dirichlet samples of the octagon surface."""
    S = genus2_octagon_surface()
    pts = [1j, disk_to_uhp(0.3 + 0.2j)]
    pts += list(dirichlet_samples(S, n - 2, seed=seed))
    return pts


@dataclass
class DeviationRow:
    point: complex
    injrad: float
    kernel: float
    deviation: float
    ratio: float  # deviation * injrad^2
    truncation_bound: float


@dataclass
class DeviationTable:
    t: float
    rows: list
    empirical_c: float


def deviation_vs_injrad(S: HyperbolicSurface, points, t, eps=1e-10, c2=None, window=DEFAULT_WINDOW) -> DeviationTable:
    p0 = h2_heat_kernel(0.0, t, window)
    rows = []
    for z in points:
        kv = surface_heat_diagonal(S, z, t, eps, c2=c2, window=window)
        dev = abs(kv.value - p0)
        rows.append(DeviationRow(complex(z), kv.injrad, kv.value, dev, dev * kv.injrad**2, kv.truncation_bound))
    return DeviationTable(t, rows, max(r.ratio for r in rows))


def thin_part_fraction_surface(S: HyperbolicSurface, r, samples=400, seed=0):
    """Monte-Carlo fraction of area with injectivity radius < r, with its binomial standard error."""
    if r <= 0:
        raise ValueError("r must be positive")
    pts = dirichlet_samples(S, samples, seed=seed)
    inj = np.array([injectivity_radius(S, z) for z in pts])
    frac = float((inj < r).mean())
    return frac, math.sqrt(frac * (1 - frac) / samples)


# ---------------------------------------------------------------- compact duals and genus limit


@dataclass(frozen=True)
class DualSpaceEntry:
    space: str
    dim: int
    dual: str
    euler_characteristic: int
    volume: float  # of the compact dual, curvature +1

    def beta(self, k):
        if self.dim % 2 or k != self.dim // 2:
            return 0.0
        return self.euler_characteristic / self.volume


DUAL_CATALOG = {
    "H2": DualSpaceEntry("H2", 2, "S2", 2, 4 * math.pi),
    "H3": DualSpaceEntry("H3", 3, "S3", 0, 2 * math.pi**2),
}


def compact_dual_l2_betti(space, k):
    try:
        entry = DUAL_CATALOG[space]
    except KeyError:
        raise UnsupportedSpace(f"no compact-dual entry for {space!r}; known: {sorted(DUAL_CATALOG)}") from None
    if not 0 <= k <= entry.dim:
        return 0.0
    return entry.beta(k)


@dataclass(frozen=True)
class GenusLimitRow:
    genus: int
    # exact values are rational multiples of 1/pi
    normalized_over_pi: Fraction  # b_1 / area = this / pi
    deviation_over_pi: Fraction  # (b_1 / area - 1/(2 pi)) = this / pi

    @property
    def normalized(self):
        return float(self.normalized_over_pi) / math.pi

    @property
    def deviation(self):
        return float(self.deviation_over_pi) / math.pi


def genus_limit_check(genera):
    """b_1 / area = 2g / (4 pi (g - 1)) against the limit 1/(2 pi)."""
    rows = []
    for g in genera:
        if g < 2:
            raise ValueError(f"genus {g} < 2 is not hyperbolic")
        val = Fraction(2 * g, 4 * (g - 1))
        rows.append(GenusLimitRow(g, val, val - Fraction(1, 2)))
    return rows
