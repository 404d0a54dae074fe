"""Truncated Fock-space oracle.

Brute-force construction of the interferometer states and operators in a
number basis, used to check every Gaussian-moment result independently.
States are dense vectors (two modes: row-major ``n1 * dim + n2``);
operators are scipy sparse matrices unless noted.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

DEFAULT_DIM_SINGLE = 80
DEFAULT_DIM_TWO = 30
MAX_DIM_SINGLE = 1280
MAX_DIM_TWO = 320
TAIL_TOL = 1e-12
EXPLICIT_TAIL_TOL = 1e-10
GROWTH = 1.5
TAIL_FRACTION = 0.1
# operators are at most quadratic in a, a^dag
PAD = 2


class TruncationError(ValueError):
    """The truncated basis holds too much probability in its top levels."""

    def __init__(self, tail, dim, suggested_dim):
        self.tail = tail
        self.dim = dim
        self.suggested_dim = suggested_dim
        super().__init__(
            f"tail mass {tail:.3e} at dim={dim} exceeds tolerance; try dim>={suggested_dim}"
        )


def ladder(dim):
    """Annihilation operator (dense), ``sqrt(n)`` on the first superdiagonal."""
    if dim < 4:
        raise ValueError("dim must be at least 4")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def number(dim):
    return np.diag(np.arange(dim, dtype=float))


def displacement(alpha, dim):
    """Dense ``exp(alpha (a^dag - a))`` of the truncated generator."""
    a = ladder(dim)
    return scipy.linalg.expm(alpha * (a.T - a))


def squeeze(r, dim):
    """Dense ``exp(r (a^dag^2 - a^2)/2)`` of the truncated generator."""
    a = ladder(dim)
    a2 = a @ a
    return scipy.linalg.expm(0.5 * r * (a2.T - a2))


def _sparse_ladder(dim):
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, shape=(dim, dim), format="csr")


def _disp_generator(alpha, dim):
    a = _sparse_ladder(dim)
    return (alpha * (a.T - a)).tocsr()


def _squeeze_generator(r, dim):
    a = _sparse_ladder(dim)
    a2 = a @ a
    return (0.5 * r * (a2.T - a2)).tocsr()


def _sector_tail(probs, dim, n_modes):
    cut = math.ceil((1.0 - TAIL_FRACTION) * dim)
    if n_modes == 1:
        return float(probs[cut:].sum())
    n = np.arange(dim)
    total = n[:, None] + n[None, :]
    return float(probs.reshape(dim, dim)[total >= cut].sum())


@dataclass(frozen=True, eq=False)
class FockState:
    """Truncated pure state of one or two modes."""

    amplitudes: np.ndarray
    dim: int
    n_modes: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim**self.n_modes,):
            raise ValueError("amplitude vector does not match dim and mode count")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def tail_mass(self):
        """Probability in the top 10% of levels plus the mass lost to truncation.

        For two modes the top levels are the total-photon sectors
        ``n1 + n2 >= 0.9 dim``; sectors at or above ``dim`` are never stored.
        """
        probs = np.abs(self.amplitudes) ** 2
        return _sector_tail(probs, self.dim, self.n_modes) + max(0.0, 1.0 - self.norm)

    def fidelity(self, other):
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def padded(self, pad=PAD):
        """Same state embedded in ``dim + pad`` levels per mode."""
        D = self.dim + pad
        if self.n_modes == 1:
            out = np.zeros(D, dtype=complex)
            out[: self.dim] = self.amplitudes
        else:
            out = np.zeros((D, D), dtype=complex)
            out[: self.dim, : self.dim] = self.amplitudes.reshape(self.dim, self.dim)
            out = out.ravel()
        return FockState(out, D, self.n_modes)


def _working_dim(dim):
    return 2 * dim + 16


def _squeezed_coherent_full(alpha, r, W):
    vac = np.zeros(W)
    vac[0] = 1.0
    psi = expm_multiply(_squeeze_generator(r, W), vac)
    return expm_multiply(_disp_generator(alpha, W), psi)


def _squeezed_coherent(alpha, r, dim):
    """``D(alpha) S(r)|0>`` computed in a larger working basis, then cut to ``dim``."""
    return _squeezed_coherent_full(alpha, r, _working_dim(dim))[:dim]


def _prepare_at(cfg, dim):
    if not cfg.two_arm:
        return FockState(_squeezed_coherent(cfg.alpha, cfg.r, dim), dim, 1)
    bright = _squeezed_coherent(cfg.alpha, cfg.R, dim)
    dark = _squeezed_coherent(0.0, cfg.r, dim)
    amps = np.outer(bright, dark)
    # keep only total-photon sectors the box holds completely; both phase
    # generators conserve n1 + n2, so the evolution stays exact on them
    n = np.arange(dim)
    amps[n[:, None] + n[None, :] >= dim] = 0.0
    return FockState(amps.ravel(), dim, 2)


def prepare(cfg, dim=None, tail_tol=None):
    """Input state ``|psi_0>`` of ``cfg`` (before the phase shift).

    With ``dim=None`` the basis starts at the default size and grows by
    ``GROWTH`` until
    the tail mass drops below ``tail_tol`` (default ``TAIL_TOL``).  An
    explicit ``dim`` whose tail reaches ``tail_tol`` (default
    ``EXPLICIT_TAIL_TOL``) raises ``TruncationError``.
    """
    if dim is not None:
        tail_tol = EXPLICIT_TAIL_TOL if tail_tol is None else tail_tol
        state = _prepare_at(cfg, dim)
        if state.tail_mass >= tail_tol:
            raise TruncationError(state.tail_mass, dim, 2 * dim)
        return state
    tail_tol = TAIL_TOL if tail_tol is None else tail_tol
    dim = DEFAULT_DIM_TWO if cfg.two_arm else DEFAULT_DIM_SINGLE
    limit = MAX_DIM_TWO if cfg.two_arm else MAX_DIM_SINGLE
    while True:
        state = _prepare_at(cfg, dim)
        if state.tail_mass < tail_tol:
            return state
        nxt = math.ceil(GROWTH * dim)
        if nxt > limit:
            raise TruncationError(state.tail_mass, dim, nxt)
        dim = nxt


def _two_mode(op1, op2):
    return sp.kron(op1, op2, format="csr")


def _mode_ops(dim, n_modes):
    """Annihilation operators for each mode on the full (sparse) space."""
    a = _sparse_ladder(dim)
    if n_modes == 1:
        return [a]
    eye = sp.identity(dim, format="csr")
    return [_two_mode(a, eye), _two_mode(eye, a)]


def quadrature_ops(dim, n_modes):
    """Sparse ``[x1, p1, (x2, p2)]`` with ``a = (x + ip)/sqrt(2)``."""
    ops = []
    for a in _mode_ops(dim, n_modes):
        ad = a.conj().T
        ops.append(((a + ad) / math.sqrt(2)).tocsr())
        ops.append(((a - ad) / (1j * math.sqrt(2))).tocsr())
    return ops


def number_op(dim, n_modes=1, mode=0):
    a = _mode_ops(dim, n_modes)[mode]
    return (a.conj().T @ a).tocsr()


def arm_difference_op(dim):
    """``N_- = a1^dag a2 + a2^dag a1`` in the input-port basis."""
    a1, a2 = _mode_ops(dim, 2)
    return (a1.conj().T @ a2 + a2.conj().T @ a1).tocsr()


def observable_operator(obs, dim):
    """Sparse matrix of a ``QuadraticObservable`` with symmetric ordering."""
    n_modes = obs.n_modes
    q = quadrature_ops(dim, n_modes)
    size = dim**n_modes
    op = obs.c0 * sp.identity(size, dtype=complex, format="csr")
    for i, ci in enumerate(obs.c):
        if ci:
            op = op + ci * q[i]
    for i in range(2 * n_modes):
        for j in range(2 * n_modes):
            if obs.M[i, j]:
                op = op + obs.M[i, j] * 0.5 * (q[i] @ q[j] + q[j] @ q[i])
    return op.tocsr()


def moments(state, op):
    """Mean and variance of the Hermitian ``op`` (built at ``state.dim``)."""
    psi = state.amplitudes
    v = op @ psi
    mu = np.vdot(psi, v).real
    resid = v - mu * psi
    return float(mu), float(np.vdot(resid, resid).real)


def observable_moments(state, obs):
    """Moments of a ``QuadraticObservable``, padding the basis so ``obs|psi>`` is exact."""
    big = state.padded()
    return moments(big, observable_operator(obs, big.dim))


def _beamsplitter_apply(psi, dim, inverse=False):
    """Balanced beamsplitter ``U_B = P2 exp(pi/4 (a1^dag a2 - a2^dag a1))``.

    ``U_B^dag a1 U_B = (a1 + a2)/sqrt2`` and ``U_B^dag a2 U_B = (a1 - a2)/sqrt2``;
    ``P2`` is the mode-2 parity.  Exact on total-photon sectors below ``dim``.
    """
    a1, a2 = _mode_ops(dim, 2)
    gen = (math.pi / 4) * (a1.T @ a2 - a2.T @ a1)
    parity = np.kron(np.ones(dim), (-1.0) ** np.arange(dim))
    if inverse:
        return expm_multiply(-gen.tocsr(), parity * psi)
    return parity * expm_multiply(gen.tocsr(), psi)


def evolve_phase(state, cfg, method="arm"):
    """Apply the phase shift ``exp(-i G phi)`` of ``cfg`` to ``state``.

    Single arm: ``G = N``.  Two arm: ``G = N_-``, either through the arm basis
    (``method="arm"``: beamsplitter, ``exp(-i (n1 - n2) phi)``, beamsplitter
    back) or by exponentiating ``N_-`` directly (``method="generator"``).
    """
    psi = state.amplitudes
    D = state.dim
    n = np.arange(D)
    if not cfg.two_arm:
        return FockState(np.exp(-1j * n * cfg.phi) * psi, D, 1)
    if method == "generator":
        out = expm_multiply(-1j * cfg.phi * arm_difference_op(D), psi)
    elif method == "arm":
        diff = (n[:, None] - n[None, :]).ravel()
        arm = _beamsplitter_apply(psi, D)
        out = _beamsplitter_apply(np.exp(-1j * diff * cfg.phi) * arm, D, inverse=True)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FockState(out, D, 2)


def output(cfg, dim=None, method="arm"):
    """Prepared and phase-shifted state for ``cfg``."""
    return evolve_phase(prepare(cfg, dim), cfg, method)


def _apply_single(gen_list, vec):
    for gen in gen_list:
        vec = expm_multiply(gen, vec)
    return vec


def threshold_identity_residual(cfg, dim=None, obs=None):
    """How far the threshold operator is from its defining matrix elements.

    Returns ``max_l |<psi_0|Y|psi_l> - 2i <psi_0|G|psi_l>|`` over the
    squeezed-displaced Fock basis ``psi_l = V|l>`` (``l`` up to ``0.8 dim``
    per mode, ``l != 0``), maxed with ``|<psi_0|Y|psi_0>|``.  ``G`` is the
    phase generator.  The elements are read off as components of
    ``V^dag (Y + 2iG) psi_0``, evaluated in the working basis so that the
    cut at ``dim`` does not leak into the checked block.  ``obs`` replaces
    the threshold observable (for testing other candidates).
    """
    from .detection import threshold_observable

    dim = prepare(cfg, dim).dim
    W = _working_dim(dim)
    lmax = int(0.8 * dim)
    Y = observable_operator(threshold_observable(cfg) if obs is None else obs, W)
    if not cfg.two_arm:
        psi = _squeezed_coherent_full(cfg.alpha, cfg.r, W)
        G = number_op(W)
    else:
        bright = _squeezed_coherent_full(cfg.alpha, cfg.R, W)
        dark = _squeezed_coherent_full(0.0, cfg.r, W)
        psi = np.outer(bright, dark).ravel()
        G = arm_difference_op(W)
    y_mean = np.vdot(psi, Y @ psi)
    v = Y @ psi + 2j * (G @ psi)

    if not cfg.two_arm:
        vec = _apply_single([_disp_generator(-cfg.alpha, W), _squeeze_generator(-cfg.r, W)], v)
        elems = vec[1 : lmax + 1]
    else:
        mat = v.reshape(W, W)
        # V^dag = S1^dag D1^dag (x) S2^dag
        mat = _apply_single([_disp_generator(-cfg.alpha, W), _squeeze_generator(-cfg.R, W)], mat)
        mat = _apply_single([_squeeze_generator(-cfg.r, W)], mat.T).T
        block = mat[: lmax + 1, : lmax + 1].copy()
        block[0, 0] = 0.0
        elems = block.ravel()
    return float(max(np.max(np.abs(elems)), abs(y_mean)))


def generator_operator(dim, two_arm):
    """Phase generator: ``N`` (single arm) or ``N_-`` (two arm, input basis)."""
    return arm_difference_op(dim) if two_arm else number_op(dim)


def observable_gain(state, obs, two_arm):
    """``d<obs>/dphi = i <[G, obs]>`` for a state evolved by ``exp(-i G phi)``."""
    big = state.padded()
    psi = big.amplitudes
    Y = observable_operator(obs, big.dim)
    G = generator_operator(big.dim, two_arm)
    Ypsi, Gpsi = Y @ psi, G @ psi
    return float((1j * (np.vdot(Gpsi, Ypsi) - np.vdot(Ypsi, Gpsi))).real)
