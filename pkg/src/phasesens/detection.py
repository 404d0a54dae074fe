"""Measured observables and error-propagation phase estimates."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import gaussian as g
from . import kernels
from .interferometer import (
    input_state,
    output_state,
    phase_transform,
    phase_transform_derivative,
)

FD_STEP = 1e-4
# |gain| below this fraction of the observable's spread means a phase error
# beyond 1e10 rad, i.e. no usable sensitivity.
NOSENS_RATIO = 1e-10


class DetectionScheme(enum.Enum):
    HOMODYNE = "homodyne"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class ErrorPoint:
    """Error-propagation result at one phase.

    ``dphi_sq`` is ``variance_y / gain**2``; at a no-sensitivity point
    ``flag`` is ``"nosens"`` and ``dphi_sq`` is infinite.
    """

    phi: float
    variance_y: float
    gain: float
    dphi_sq: float
    flag: str = "ok"

    @property
    def sensitive(self):
        return self.flag == "ok"


def make_error_point(phi, variance_y, gain):
    if abs(gain) <= NOSENS_RATIO * math.sqrt(max(variance_y, 0.0)) or gain == 0.0:
        return ErrorPoint(float(phi), float(variance_y), float(gain), math.inf, "nosens")
    return ErrorPoint(float(phi), float(variance_y), float(gain), float(variance_y / gain**2))


def homodyne_observable(cfg):
    """Phase quadrature of the output (the dark port for two arms)."""
    if not cfg.two_arm:
        return g.quadrature(1, 0, "p")
    return g.quadrature(2, 1, "p")


def threshold_observable(cfg):
    """Bilinear threshold operator solving the SLD equation at ``phi = 0``.

    Single arm: ``-2 p o (sqrt2 alpha cosh2r + x sinh2r)``.
    Two arm: ``-2 [sqrt2 alpha e^(r-R) cosh(R+r) p2
    + sinh(R+r) (e^(r-R) x1 o p2 + e^(R-r) x2 o p1)]``.
    Depends on ``alpha, r, R`` only; ``cfg.phi`` is ignored.
    """
    a, r, R = cfg.alpha, cfg.r, cfg.R
    s2 = math.sqrt(2.0)
    if not cfg.two_arm:
        lin = -2.0 * s2 * a * math.cosh(2 * r) * g.quadrature(1, 0, "p")
        quad = -2.0 * math.sinh(2 * r) * g.symmetric_product(1, 0, 1)
        return lin + quad
    rp = R + r
    lin = -2.0 * s2 * a * math.exp(r - R) * math.cosh(rp) * g.quadrature(2, 1, "p")
    quad = -2.0 * math.sinh(rp) * (
        math.exp(r - R) * g.symmetric_product(2, 0, 3)
        + math.exp(R - r) * g.symmetric_product(2, 2, 1)
    )
    return lin + quad


def observable(cfg, scheme):
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        return homodyne_observable(cfg)
    return threshold_observable(cfg)


def analytic_gain(cfg, obs):
    """Exact ``d<obs>/dphi`` from the derivative of the phase-section map."""
    st = input_state(cfg)
    S = phase_transform(cfg).S
    dS = phase_transform_derivative(cfg)
    m = S @ st.mean
    dm = dS @ st.mean
    half = dS @ st.cov @ S.T
    dcov = half + half.T
    return float(obs.c @ dm + 2.0 * m @ obs.M @ dm + np.trace(obs.M @ dcov))


def fd_gain(cfg, obs, h=FD_STEP):
    """Five-point central difference of ``<obs>`` with one Richardson step."""

    def mean_at(phi):
        return g.quadratic_moments(output_state(cfg.with_phi(phi)), obs)[0]

    def five_point(step):
        p = cfg.phi
        return (
            mean_at(p - 2 * step) - 8 * mean_at(p - step)
            + 8 * mean_at(p + step) - mean_at(p + 2 * step)
        ) / (12 * step)

    coarse, fine = five_point(h), five_point(h / 2)
    return (16 * fine - coarse) / 15


def phase_error(cfg, scheme, gain_method="analytic"):
    """Error-propagation phase error ``Var(Y)/G^2`` at ``cfg.phi``.

    The threshold observable stays frozen at its ``phi = 0`` form.
    ``gain_method`` is ``"analytic"`` or ``"fd"``.
    """
    obs = observable(cfg, scheme)
    _, var = g.quadratic_moments(output_state(cfg), obs)
    if gain_method == "analytic":
        gain = analytic_gain(cfg, obs)
    elif gain_method == "fd":
        gain = fd_gain(cfg, obs)
    else:
        raise ValueError(f"unknown gain method {gain_method!r}")
    return make_error_point(cfg.phi, var, gain)


def _curve_moments(cfg, scheme):
    """``phis -> (variance, gain)`` arrays with the state and observable built once."""
    obs = observable(cfg, scheme)
    st = input_state(cfg)

    def evaluate(phis):
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        _, var, gain = kernels.phase_curve(st.mean, st.cov, obs.c0, obs.c, obs.M, phis, cfg.two_arm)
        return phis, var, gain

    return evaluate


def error_curve(cfg, scheme, phis):
    """Vectorised ``phase_error`` over ``phis`` through the moment kernel."""
    phis, var, gain = _curve_moments(cfg, scheme)(phis)
    return [make_error_point(p, v, k) for p, v, k in zip(phis, var, gain)]


def error_function(cfg, scheme):
    """Fast ``phis -> dphi_sq`` array for repeated evaluation of one configuration.

    Uses the same no-sensitivity rule as ``make_error_point`` (``inf`` there).
    """
    evaluate = _curve_moments(cfg, scheme)

    def dphi_sq(phis):
        _, var, gain = evaluate(phis)
        dead = (np.abs(gain) <= NOSENS_RATIO * np.sqrt(np.maximum(var, 0.0))) | (gain == 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = var / gain**2
        return np.where(dead, np.inf, out)

    return dphi_sq


def dphi_sq_at(cfg, scheme, phis):
    """Array of squared phase errors (``inf`` where there is no sensitivity)."""
    return error_function(cfg, scheme)(phis)


def sld_defining_check(cfg, fock_dim):
    """Residual of the threshold operator's defining matrix elements (Fock basis)."""
    from .fock import threshold_identity_residual

    return threshold_identity_residual(cfg, fock_dim)


def parametric_readout_error(gt, signal_state, probe_x_variance, mode=0):
    """Readout error of ``x o p`` through a degenerate parametric probe coupling.

    ``[1/(gt)^2 - <x^2+p^2> + (gt)^2/4 <(x^2+p^2)^2>] <X^2>`` with the probe
    mean assumed zero, so ``probe_x_variance`` is ``<X^2>``.
    """
    if not gt > 0:
        raise ValueError("coupling gt must be positive")
    if probe_x_variance < 0:
        raise ValueError("probe variance must be non-negative")
    n = signal_state.n_modes
    if not 0 <= mode < n:
        raise IndexError(f"mode {mode} out of range for {n} mode(s)")
    d = 2 * n
    M = np.zeros((d, d))
    M[2 * mode, 2 * mode] = M[2 * mode + 1, 2 * mode + 1] = 1.0
    energy = g.QuadraticObservable(0.0, np.zeros(d), M)
    first, var = g.quadratic_moments(signal_state, energy)
    second = var + first**2
    return (1.0 / gt**2 - first + gt**2 / 4.0 * second) * probe_x_variance
