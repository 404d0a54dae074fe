"""Single-arm and antisymmetric two-arm interferometers as Gaussian pipelines."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import gaussian as g

SQUEEZE_GUARD = 20.0


class Topology(enum.Enum):
    SINGLE_ARM = "single"
    TWO_ARM = "two"


class _NoInformation:
    """Result of a phase bound when the probe carries no phase information."""

    __slots__ = ()

    def __repr__(self):
        return "NO_INFORMATION"

    def __bool__(self):
        return False


NO_INFORMATION = _NoInformation()


@dataclass(frozen=True)
class InterferometerConfig:
    """One physical scenario.

    ``r`` squeezes the single-arm input, or the dark (second) input of the
    two-arm interferometer; ``R`` squeezes the bright two-arm input and must
    be zero for the single arm.  ``phi`` is the true phase in radians.
    """

    topology: Topology
    alpha: float
    r: float
    R: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        topo = Topology(self.topology)
        object.__setattr__(self, "topology", topo)
        for name in ("alpha", "r", "R", "phi"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not -SQUEEZE_GUARD <= self.r <= SQUEEZE_GUARD:
            raise ValueError(f"r outside [-{SQUEEZE_GUARD}, {SQUEEZE_GUARD}]")
        if not -SQUEEZE_GUARD <= self.R <= SQUEEZE_GUARD:
            raise ValueError(f"R outside [-{SQUEEZE_GUARD}, {SQUEEZE_GUARD}]")
        if topo is Topology.SINGLE_ARM and self.R != 0.0:
            raise ValueError("single-arm configuration has no second squeezer; R must be 0")

    @property
    def n_modes(self):
        return 1 if self.topology is Topology.SINGLE_ARM else 2

    @property
    def two_arm(self):
        return self.topology is Topology.TWO_ARM

    def with_phi(self, phi):
        return InterferometerConfig(self.topology, self.alpha, self.r, self.R, phi)


@dataclass(frozen=True)
class PhotonBudget:
    """Mean number of photons interacting with the phase object(s)."""

    n_mean: float

    def __post_init__(self):
        if not self.n_mean >= 0:
            raise ValueError("photon budget must be non-negative")

    def __float__(self):
        return float(self.n_mean)


def input_state(cfg):
    """State entering the phase-shifting section (before any beamsplitter)."""
    if not cfg.two_arm:
        prep = g.make_squeeze(0, cfg.r).then(g.make_displacement(0, cfg.alpha))
        return g.apply(g.vacuum(1), prep)
    prep = (
        g.make_squeeze(0, cfg.R, 2)
        .then(g.make_squeeze(1, cfg.r, 2))
        .then(g.make_displacement(0, cfg.alpha, 2))
    )
    return g.apply(g.vacuum(2), prep)


def phase_transform(cfg, phi=None):
    """Symplectic map of the phase section at ``phi`` (defaults to ``cfg.phi``).

    Two-arm: beamsplitter, ``+phi`` in arm 1, ``-phi`` in arm 2, beamsplitter.
    """
    phi = cfg.phi if phi is None else phi
    if not cfg.two_arm:
        return g.make_rotation(0, phi)
    bs = g.make_beamsplitter(0, 1)
    arms = g.make_rotation(0, phi, 2).then(g.make_rotation(1, -phi, 2))
    return bs.then(arms).then(bs)


def phase_transform_derivative(cfg, phi=None):
    """d/dphi of the phase-section matrix (a plain array, not symplectic)."""
    phi = cfg.phi if phi is None else phi
    if not cfg.two_arm:
        # d/dphi R(phi) = R(phi + pi/2)
        return g.make_rotation(0, phi + np.pi / 2).S
    bs = g.make_beamsplitter(0, 1).S
    darms = np.zeros((4, 4))
    darms[:2, :2] = g.make_rotation(0, phi + np.pi / 2).S
    darms[2:, 2:] = -g.make_rotation(0, -phi + np.pi / 2).S
    return bs @ darms @ bs


def output_state(cfg):
    return g.apply(input_state(cfg), phase_transform(cfg))


def mean_probe_photons(cfg):
    n = cfg.alpha**2 + math.sinh(cfg.r) ** 2
    if cfg.two_arm:
        n += math.sinh(cfg.R) ** 2
    return PhotonBudget(n)


def generator_observable(cfg):
    """Phase-shift generator in input-port quadratures.

    Single arm: ``N``.  Two arm: ``N_- = a1^dag a2 + a2^dag a1 = x1 x2 + p1 p2``,
    the photon-number difference between the arms.
    """
    if not cfg.two_arm:
        return g.number_operator(1, 0)
    return g.symmetric_product(2, 0, 2) + g.symmetric_product(2, 1, 3)


def generator_variance(cfg):
    return g.quadratic_moments(input_state(cfg), generator_observable(cfg))[1]


def generator_variance_closed_form(cfg):
    """``alpha^2 e^2r + sinh^2(2r)/2`` (single) or ``alpha^2 e^2r + sinh^2(R + r)`` (two)."""
    a2 = cfg.alpha**2 * math.exp(2 * cfg.r)
    if cfg.two_arm:
        return a2 + math.sinh(cfg.R + cfg.r) ** 2
    return a2 + 0.5 * math.sinh(2 * cfg.r) ** 2


def qcrb(cfg):
    """Quantum Cramer-Rao bound ``1/(4 Var(generator))`` on the squared phase error.

    Returns ``NO_INFORMATION`` when the generator variance vanishes.
    """
    var = generator_variance(cfg)
    scale = max(1.0, generator_variance_closed_form(cfg))
    if var <= 1e-14 * scale:
        return NO_INFORMATION
    return 1.0 / (4.0 * var)
