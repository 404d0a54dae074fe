"""Pure-Python (numpy) implementation of the hot moment kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled kernels are tested against.
"""

import numpy as np


def omega(n_modes):
    """Symplectic form for interleaved (x1, p1, x2, p2, ...) ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadratic_moments(mean, cov, c0, c, M):
    """Mean and variance of ``c0 + c.q + q.M.q`` (symmetric ordering).

    Gaussian fourth moments of the non-commuting quadratures contribute the
    ``tr(M Omega M Omega) / 2`` term on top of the classical Isserlis part.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    c = np.asarray(c, dtype=float)
    M = np.asarray(M, dtype=float)
    om = omega(mean.shape[0] // 2)

    ct = c + 2.0 * M @ mean
    mu = c0 + c @ mean + mean @ M @ mean + np.trace(M @ cov)
    ms = M @ cov
    mo = M @ om
    var = ct @ cov @ ct + 2.0 * np.trace(ms @ ms) + 0.5 * np.trace(mo @ mo)
    return float(mu), max(float(var), 0.0)


def phase_matrices(phis, two_arm):
    """Stacked phase-shift matrices S(phi) and their phi-derivatives.

    Single arm: rotation ``[[cos, sin], [-sin, cos]]``.  Two arm: the
    balanced beamsplitter / +-phi / beamsplitter sandwich on (x1, p1, x2, p2).
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    co, si = np.cos(phis), np.sin(phis)
    z = np.zeros_like(phis)
    if not two_arm:
        S = np.array([[co, si], [-si, co]])
        dS = np.array([[-si, co], [-co, -si]])
    else:
        S = np.array([
            [co, z, z, si],
            [z, co, -si, z],
            [z, si, co, z],
            [-si, z, z, co],
        ])
        dS = np.array([
            [-si, z, z, co],
            [z, -si, -co, z],
            [z, co, -si, z],
            [-co, z, z, -si],
        ])
    return np.moveaxis(S, -1, 0), np.moveaxis(dS, -1, 0)


def phase_curve(mean, cov, c0, c, M, phis, two_arm):
    """Observable mean, variance and phase gain for every phi in ``phis``.

    ``mean``/``cov`` describe the state entering the phase shift; the
    observable is fixed and measured after it.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    c = np.asarray(c, dtype=float)
    M = np.asarray(M, dtype=float)
    S, dS = phase_matrices(phis, two_arm)
    om = omega(mean.shape[0] // 2)

    m = S @ mean
    dm = dS @ mean
    sig = S @ cov @ np.swapaxes(S, 1, 2)
    half = dS @ cov @ np.swapaxes(S, 1, 2)
    dsig = half + np.swapaxes(half, 1, 2)

    Mm = m @ M
    mu = c0 + m @ c + np.einsum("ki,ki->k", Mm, m) + np.einsum("ij,kji->k", M, sig)
    gain = dm @ c + 2.0 * np.einsum("ki,ki->k", Mm, dm) + np.einsum("ij,kji->k", M, dsig)
    ct = c + 2.0 * Mm
    ms = M @ sig
    mo = M @ om
    var = (
        np.einsum("ki,kij,kj->k", ct, sig, ct)
        + 2.0 * np.einsum("kij,kji->k", ms, ms)
        + 0.5 * np.trace(mo @ mo)
    )
    return mu, np.maximum(var, 0.0), gain
