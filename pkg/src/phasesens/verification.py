"""Cross-checks of the Gaussian engine against the truncated Fock oracle."""

from dataclasses import dataclass

import numpy as np

from . import fock
from . import gaussian as g
from .detection import DetectionScheme, observable
from .interferometer import (
    InterferometerConfig,
    Topology,
    generator_observable,
    input_state,
    output_state,
)

MOMENT_RTOL = 1e-8
# below this magnitude the relative tolerance turns into an absolute 1e-10
MOMENT_FLOOR = 1e-2
NORM_TOL = 1e-12
IDENTITY_TOL = 1e-9

SINGLE_POINTS = ((2.0, 0.5, 0.3), (1.0, 0.7, -0.7), (0.0, 0.8, 0.5))
TWO_POINTS = ((1.5, 0.5, 0.0, 0.3), (1.0, 0.5, -0.5, -0.5), (1.0, 0.4, 0.4, 0.7))


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self):
        return bool(self.residual <= self.tol)


def relative_residual(value, reference):
    return abs(value - reference) / max(abs(reference), MOMENT_FLOOR)


def default_configs():
    cfgs = [InterferometerConfig(Topology.SINGLE_ARM, a, r, 0.0, p) for a, r, p in SINGLE_POINTS]
    cfgs += [InterferometerConfig(Topology.TWO_ARM, a, r, R, p) for a, r, R, p in TWO_POINTS]
    return cfgs


def _label(cfg):
    if cfg.two_arm:
        return f"two(alpha={cfg.alpha:g},r={cfg.r:g},R={cfg.R:g},phi={cfg.phi:g})"
    return f"single(alpha={cfg.alpha:g},r={cfg.r:g},phi={cfg.phi:g})"


def _observables(cfg):
    n = cfg.n_modes
    yield "n1", g.number_operator(n, 0)
    if n == 2:
        yield "n2", g.number_operator(n, 1)
    for scheme in DetectionScheme:
        yield scheme.value, observable(cfg, scheme)


def moment_residual(cfg, dim=None, method="generator"):
    """Largest relative mismatch of output means and variances, and the tail mass."""
    out = fock.output(cfg, dim, method=method)
    gauss = output_state(cfg)
    worst = 0.0
    for _, obs in _observables(cfg):
        gm, gv = g.quadratic_moments(gauss, obs)
        fm, fv = fock.observable_moments(out, obs)
        worst = max(worst, relative_residual(fm, gm), relative_residual(fv, gv))
    return worst, out.tail_mass


def checks_for(cfg, dim=None):
    label = _label(cfg)
    res = []
    worst, tail = moment_residual(cfg, dim)
    res.append(Check(f"moments {label}", worst, MOMENT_RTOL))
    res.append(Check(f"tail {label}", tail, fock.TAIL_TOL if dim is None else fock.EXPLICIT_TAIL_TOL))

    psi0 = fock.prepare(cfg, dim)
    arm = fock.evolve_phase(psi0, cfg, method="arm")
    gen = fock.evolve_phase(psi0, cfg, method="generator")
    res.append(Check(f"unitarity {label}", abs(arm.norm - psi0.norm), NORM_TOL))
    res.append(
        Check(f"evolution paths {label}", float(np.max(np.abs(arm.amplitudes - gen.amplitudes))), MOMENT_RTOL)
    )

    # (Delta Y)^2 = 4 (Delta G)^2 on the input state
    gvar = g.quadratic_moments(input_state(cfg), generator_observable(cfg))[1]
    yvar = fock.observable_moments(psi0, observable(cfg, DetectionScheme.THRESHOLD))[1]
    res.append(Check(f"threshold variance {label}", relative_residual(yvar, 4 * gvar), MOMENT_RTOL))
    res.append(Check(f"threshold identity {label}", fock.threshold_identity_residual(cfg, dim), IDENTITY_TOL))
    return res


def run_checks(fock_dim=None, configs=None):
    """All oracle-equivalence checks; ``fock_dim=None`` lets the oracle size itself."""
    configs = default_configs() if configs is None else configs
    out = []
    for cfg in configs:
        out.extend(checks_for(cfg, fock_dim))
    return out
