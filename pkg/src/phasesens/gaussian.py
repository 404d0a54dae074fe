"""Gaussian states, symplectic optics and moments of quadratic observables.

Quadratures are interleaved ``(x1, p1, x2, p2, ...)`` with ``a = (x + ip)/sqrt(2)``,
so the vacuum has covariance ``I/2``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-12
UNCERTAINTY_TOL = 1e-10


@lru_cache(maxsize=8)
def omega(n_modes):
    """Standard symplectic form for ``n_modes`` interleaved modes (read-only)."""
    om = np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    om.setflags(write=False)
    return om


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_mode(mode, n_modes):
    if not 0 <= mode < n_modes:
        raise IndexError(f"mode {mode} out of range for {n_modes} mode(s)")


def symplectic_eigenvalues(cov):
    """Symplectic spectrum of a covariance matrix (each value listed once)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(n) @ cov))
    return np.sort(ev)[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second quadrature moments of an ``n_modes`` Gaussian state.

    Construction validates symmetry and the uncertainty principle; a state
    that violates them can only come from a bug, so it is rejected.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.ndim != 1 or mean.shape[0] % 2 or mean.shape[0] == 0:
            raise ValueError("mean must be a non-empty vector of even length")
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.shape[0]}")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        if np.min(symplectic_eigenvalues(cov)) < 0.5 - UNCERTAINTY_TOL * scale:
            raise ValueError("covariance violates the uncertainty principle")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self):
        return self.mean.shape[0] // 2

    def mode(self, k):
        """Reduced single-mode state of mode ``k``."""
        _check_mode(k, self.n_modes)
        sl = slice(2 * k, 2 * k + 2)
        return GaussianState(self.mean[sl], self.cov[sl, sl])

    def allclose(self, other, atol=1e-12):
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Affine quadrature map ``q -> S q + d``."""

    S: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        S = _frozen(self.S)
        d = _frozen(self.d)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError("S must be a square matrix of even size")
        if d.shape != (S.shape[0],):
            raise ValueError("displacement length does not match S")
        om = omega(S.shape[0] // 2)
        scale = max(1.0, float(np.max(np.abs(S))) ** 2)
        if np.max(np.abs(S @ om @ S.T - om)) > SYMPLECTIC_TOL * scale:
            raise ValueError("S is not symplectic")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", d)

    @property
    def n_modes(self):
        return self.S.shape[0] // 2

    @classmethod
    def identity(cls, n_modes=1):
        return cls(np.eye(2 * n_modes), np.zeros(2 * n_modes))

    def then(self, other):
        """Transform applying ``self`` first and ``other`` second."""
        if other.n_modes != self.n_modes:
            raise ValueError("mode count mismatch")
        return SymplecticTransform(other.S @ self.S, other.S @ self.d + other.d)


@dataclass(frozen=True, eq=False)
class QuadraticObservable:
    """The operator ``c0 + c.q + q.M.q`` with symmetrically ordered products."""

    c0: float
    c: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c)
        M = _frozen(self.M)
        if c.ndim != 1 or c.shape[0] % 2:
            raise ValueError("c must be a vector of even length")
        if M.shape != (c.shape[0], c.shape[0]):
            raise ValueError("M shape does not match c")
        scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
        if np.max(np.abs(M - M.T)) > SYMMETRY_TOL * scale:
            raise ValueError("M must be symmetric")
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "M", M)

    @property
    def n_modes(self):
        return self.c.shape[0] // 2

    @classmethod
    def zero(cls, n_modes):
        return cls(0.0, np.zeros(2 * n_modes), np.zeros((2 * n_modes, 2 * n_modes)))

    def __add__(self, other):
        if other.n_modes != self.n_modes:
            raise ValueError("mode count mismatch")
        return QuadraticObservable(self.c0 + other.c0, self.c + other.c, self.M + other.M)

    def __mul__(self, k):
        return QuadraticObservable(k * self.c0, k * self.c, k * self.M)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def quadrature(n_modes, mode, which):
    """Linear observable ``x_mode`` (``which='x'``) or ``p_mode``."""
    _check_mode(mode, n_modes)
    idx = {"x": 0, "p": 1}[which]
    c = np.zeros(2 * n_modes)
    c[2 * mode + idx] = 1.0
    return QuadraticObservable(0.0, c, np.zeros((2 * n_modes, 2 * n_modes)))


def symmetric_product(n_modes, i, j):
    """``q_i o q_j = (q_i q_j + q_j q_i)/2`` for quadrature indices ``i, j``."""
    d = 2 * n_modes
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError("quadrature index out of range")
    M = np.zeros((d, d))
    M[i, j] += 0.5
    M[j, i] += 0.5
    return QuadraticObservable(0.0, np.zeros(d), M)


def number_operator(n_modes, mode):
    """``a^dag a = (x^2 + p^2 - 1)/2`` on one mode."""
    _check_mode(mode, n_modes)
    d = 2 * n_modes
    M = np.zeros((d, d))
    M[2 * mode, 2 * mode] = M[2 * mode + 1, 2 * mode + 1] = 0.5
    return QuadraticObservable(-0.5, np.zeros(d), M)


def vacuum(n_modes=1):
    if n_modes < 1:
        raise ValueError("need at least one mode")
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def _embed(block, modes, n_modes):
    S = np.eye(2 * n_modes)
    idx = [2 * m + k for m in modes for k in (0, 1)]
    S[np.ix_(idx, idx)] = block
    return S


def make_displacement(mode, alpha, n_modes=1):
    """``exp(alpha (a^dag - a))`` for real ``alpha``: shifts ``x`` by ``sqrt(2) alpha``."""
    _check_mode(mode, n_modes)
    d = np.zeros(2 * n_modes)
    d[2 * mode] = np.sqrt(2.0) * alpha
    return SymplecticTransform(np.eye(2 * n_modes), d)


def make_squeeze(mode, r, n_modes=1):
    """``exp(r (a^dag^2 - a^2)/2)``: ``x -> x e^r``, ``p -> p e^-r``."""
    _check_mode(mode, n_modes)
    block = np.diag([np.exp(r), np.exp(-r)])
    return SymplecticTransform(_embed(block, [mode], n_modes), np.zeros(2 * n_modes))


def make_rotation(mode, phi, n_modes=1):
    """Phase shift ``exp(-i N phi)``.

    ``x -> x cos(phi) + p sin(phi)`` and ``p -> -x sin(phi) + p cos(phi)``.
    """
    _check_mode(mode, n_modes)
    c, s = np.cos(phi), np.sin(phi)
    block = np.array([[c, s], [-s, c]])
    return SymplecticTransform(_embed(block, [mode], n_modes), np.zeros(2 * n_modes))


def make_beamsplitter(mode_i, mode_j, n_modes=2):
    """Balanced beamsplitter ``[[1, 1], [1, -1]]/sqrt(2)`` on both quadratures."""
    _check_mode(mode_i, n_modes)
    _check_mode(mode_j, n_modes)
    if mode_i == mode_j:
        raise ValueError("beamsplitter needs two distinct modes")
    h = 1.0 / np.sqrt(2.0)
    block = np.zeros((4, 4))
    # (x_i, p_i, x_j, p_j)
    block[0, 0] = block[0, 2] = block[2, 0] = h
    block[2, 2] = -h
    block[1, 1] = block[1, 3] = block[3, 1] = h
    block[3, 3] = -h
    return SymplecticTransform(_embed(block, [mode_i, mode_j], n_modes), np.zeros(2 * n_modes))


def apply(state, transform):
    """Evolve ``state`` through ``transform``: mean -> S m + d, cov -> S cov S^T."""
    if state.n_modes != transform.n_modes:
        raise ValueError(
            f"transform acts on {transform.n_modes} mode(s), state has {state.n_modes}"
        )
    S = transform.S
    cov = S @ state.cov @ S.T
    return GaussianState(S @ state.mean + transform.d, 0.5 * (cov + cov.T))


def quadratic_moments(state, obs):
    """Mean and variance of ``obs`` in ``state``.

    Uses ``<c.q + q.M.q>`` and the Gaussian variance
    ``c~.cov.c~ + 2 tr(M cov M cov) + tr(M Om M Om)/2`` with ``c~ = c + 2 M m``.
    """
    if state.n_modes != obs.n_modes:
        raise ValueError("observable and state act on different mode counts")
    return kernels.quadratic_moments(state.mean, state.cov, obs.c0, obs.c, obs.M)


def photon_stats(state, mode=0):
    """Mean and variance of the photon number in ``mode``."""
    return quadratic_moments(state, number_operator(state.n_modes, mode))
