"""Photon-budget optimisation, error curves and the two figures of merit.

The peak error is the squared phase error at ``phi = 0``; the width is twice
the smallest positive phase at which the squared error has doubled.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .detection import DetectionScheme, error_curve, error_function
from .interferometer import InterferometerConfig, Topology, mean_probe_photons

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
ALPHA_SQ_TOL = 1e-10
ROOT_TOL = 1e-10
CLOSED_FORM_RTOL = 1e-6
EXACT_RTOL = 1e-6
WIDTH_CAP = math.pi**2


class SqueezeRegime(enum.Enum):
    """Which squeezers share the photon budget with the displacement."""

    SINGLE_ARM = "single"
    TWO_ARM_R0 = "two-r0"
    TWO_ARM_ANTI = "two-anti"


REGIMES = tuple(SqueezeRegime)
SCHEMES = tuple(DetectionScheme)


def config_for(n, regime, alpha_sq, phi=0.0):
    """Configuration spending ``alpha_sq`` on displacement, the rest on squeezing.

    Single arm and two-arm ``R = 0``: ``N = alpha^2 + sinh^2 r``.
    Two-arm antisymmetric (``R = -r``): ``N = alpha^2 + 2 sinh^2 r``.
    """
    regime = SqueezeRegime(regime)
    n = float(n)
    alpha_sq = min(max(float(alpha_sq), 0.0), n)
    rest = max(n - alpha_sq, 0.0)
    alpha = math.sqrt(alpha_sq)
    if regime is SqueezeRegime.SINGLE_ARM:
        return InterferometerConfig(Topology.SINGLE_ARM, alpha, math.asinh(math.sqrt(rest)), 0.0, phi)
    if regime is SqueezeRegime.TWO_ARM_R0:
        return InterferometerConfig(Topology.TWO_ARM, alpha, math.asinh(math.sqrt(rest)), 0.0, phi)
    r = math.asinh(math.sqrt(rest / 2.0))
    return InterferometerConfig(Topology.TWO_ARM, alpha, r, -r, phi)


def closed_form_alpha_sq(n, regime, scheme):
    """Optimal ``alpha^2`` from the analytic treatment, and whether it is exact.

    The two-arm ``R = 0`` threshold value ``(N + 1/4)/2`` is an approximation.
    """
    regime, scheme = SqueezeRegime(regime), DetectionScheme(scheme)
    if regime is SqueezeRegime.TWO_ARM_ANTI:
        return n * (n + 2) / (2 * (n + 1)), True
    if scheme is DetectionScheme.HOMODYNE:
        return n * (n + 1) / (2 * n + 1), True
    if regime is SqueezeRegime.SINGLE_ARM:
        return 0.0, True
    return (n + 0.25) / 2.0, False


def golden_section(f, lo, hi, tol=ALPHA_SQ_TOL, max_iter=200):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; endpoints are candidates too."""
    f_lo, f_hi = f(lo), f(hi)
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    # a minimum within tolerance of a boundary is the boundary
    if f_lo <= fx or x - lo <= tol:
        x, fx = lo, f_lo
    if f_hi < fx or hi - x <= tol:
        x, fx = hi, f_hi
    return x, fx


def _peak_error(n, regime, scheme):
    def f(alpha_sq):
        cfg = config_for(n, regime, alpha_sq)
        return float(error_function(cfg, scheme)(0.0)[0])

    return f


def _is_unimodal(values):
    finite = np.where(np.isfinite(values), values, np.inf)
    k = int(np.argmin(finite))
    left, right = np.diff(finite[: k + 1]), np.diff(finite[k:])
    slack = 1e-12 * np.abs(finite[k])
    return bool(np.all(left <= slack) and np.all(right >= -slack))


def optimize_displacement(n, regime, scheme):
    """``alpha^2`` in ``[0, N]`` minimising the peak squared error.

    Golden-section search; the result is checked against the analytic
    optimum where one is exact (a warning is issued on disagreement).
    """
    n = float(n)
    if n < 0:
        raise ValueError("photon budget must be non-negative")
    if n == 0:
        return 0.0
    f = _peak_error(n, regime, scheme)
    samples = np.array([f(x) for x in np.linspace(0.0, n, 33)])
    if not _is_unimodal(samples):
        warnings.warn(f"peak error is not unimodal in alpha^2 for {regime}, {scheme}", stacklevel=2)
    alpha_sq, _ = golden_section(f, 0.0, n)
    expected, exact = closed_form_alpha_sq(n, regime, scheme)
    if exact:
        err = abs(alpha_sq - expected) / max(expected, 1.0)
        if err > CLOSED_FORM_RTOL:
            warnings.warn(
                f"numeric alpha^2={alpha_sq:.10g} departs from analytic {expected:.10g}",
                stacklevel=2,
            )
    return alpha_sq


@dataclass(frozen=True)
class FigureOfMerit:
    """Peak squared error, squared width and the configuration that produced them."""

    dphi0_sq: float
    width_sq: float
    alpha_sq_opt: float
    n_mean: float
    flagged: bool = False

    @property
    def width(self):
        return math.sqrt(self.width_sq)


@dataclass(frozen=True)
class SensitivityCurve:
    phi_grid: np.ndarray
    dphi_sq: np.ndarray
    gain: np.ndarray
    variance_y: np.ndarray
    flags: tuple

    def __len__(self):
        return len(self.phi_grid)


def sweep(cfg, scheme, grid):
    """Squared phase error of ``cfg`` on each phase in the increasing ``grid``."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    pts = error_curve(cfg, scheme, grid)
    return SensitivityCurve(
        phi_grid=grid,
        dphi_sq=np.array([p.dphi_sq for p in pts]),
        gain=np.array([p.gain for p in pts]),
        variance_y=np.array([p.variance_y for p in pts]),
        flags=tuple(p.flag for p in pts),
    )


def _bisect(g, lo, hi, tol=ROOT_TOL):
    """Sign-change bisection; ``g(lo) < 0 <= g(hi)``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def half_width(cfg, scheme, dphi0_sq=None, upper=math.pi / 2):
    """Smallest ``phi`` in ``(0, upper)`` where the squared error reaches twice its peak.

    Returns ``(phi_half, flagged)``; ``phi_half`` is None if there is no crossing.
    A no-sensitivity phase counts as a crossing.
    """
    curve = error_function(cfg, scheme)
    if dphi0_sq is None:
        dphi0_sq = float(curve(0.0)[0])
    target = 2.0 * dphi0_sq

    def g(phi):
        return float(curve(phi)[0]) - target

    grid = np.geomspace(1e-9, upper, 600)
    values = curve(grid) - target
    above = np.nonzero(values >= 0)[0]
    if above.size == 0:
        return None, True
    k = int(above[0])
    lo = grid[k - 1] if k > 0 else 0.0
    root = _bisect(g, lo, grid[k])
    before = values[:k]
    flagged = bool(np.any(np.diff(before) < -1e-12 * abs(target)))
    return root, flagged


def peak_and_width(cfg, scheme, n_mean=None):
    """Figure of merit of ``cfg`` (its ``phi`` is ignored; the peak sits at 0)."""
    cfg0 = cfg.with_phi(0.0)
    peak = error_curve(cfg0, scheme, [0.0])[0]
    if n_mean is None:
        n_mean = mean_probe_photons(cfg0).n_mean
    alpha_sq = cfg0.alpha**2
    if not peak.sensitive:
        return FigureOfMerit(math.inf, WIDTH_CAP, alpha_sq, n_mean, flagged=True)
    phi_half, flagged = half_width(cfg0, scheme, peak.dphi_sq)
    if phi_half is None:
        width_sq = WIDTH_CAP
    else:
        width_sq = min((2.0 * phi_half) ** 2, WIDTH_CAP)
    return FigureOfMerit(peak.dphi_sq, width_sq, alpha_sq, n_mean, flagged)


def optimized_figure(n, regime, scheme):
    alpha_sq = optimize_displacement(n, regime, scheme)
    cfg = config_for(n, regime, alpha_sq)
    return peak_and_width(cfg, scheme, n_mean=float(n))


def reference_table_values(n, regime, scheme):
    """Analytic table entries ``(peak, width, peak_exact, width_exact)``.

    ``width`` is None where the analytic treatment gives only an order of
    magnitude.  Exact entries must match to ``EXACT_RTOL``; the rest are
    asymptotic or approximate.
    """
    regime, scheme = SqueezeRegime(regime), DetectionScheme(scheme)
    hd = scheme is DetectionScheme.HOMODYNE
    if regime is SqueezeRegime.SINGLE_ARM:
        if hd:
            return 1 / (4 * n * (n + 1)), 1 / (n * (n + 1)), True, False
        return 1 / (8 * n * (n + 1)), 1 / (4 * n * (n + 1)), True, False
    if regime is SqueezeRegime.TWO_ARM_R0:
        if hd:
            return 1 / (4 * n * (n + 1)), 2 / (n + 0.5), True, False
        return 1 / (4 * n * (n + 1.5)), 8 / (9 * n + 1.25), False, False
    if hd:
        return 1 / (2 * n * (n + 2)), None, True, None
    return 1 / (2 * n * (n + 2)), (math.pi / 2) ** 2, True, True


def approx_tolerance(n):
    """Relative tolerance for asymptotic entries: 2% up to N=10, 0.5% from N=200,
    log-interpolated in between."""
    if n <= 10:
        return 0.02
    if n >= 200:
        return 0.005
    t = math.log(n / 10) / math.log(20)
    return 0.02 * (0.25**t)


def tolerance(n, exact):
    return EXACT_RTOL if exact else approx_tolerance(n)


@dataclass(frozen=True)
class Table1Entry:
    regime: SqueezeRegime
    scheme: DetectionScheme
    figure: FigureOfMerit
    reference_dphi0_sq: float
    reference_width_sq: float
    peak_exact: bool
    width_exact: bool

    @property
    def rel_err_peak(self):
        return self.figure.dphi0_sq / self.reference_dphi0_sq - 1.0

    @property
    def rel_err_width(self):
        if self.reference_width_sq is None:
            return None
        return self.figure.width_sq / self.reference_width_sq - 1.0

    def peak_ok(self):
        return abs(self.rel_err_peak) <= tolerance(self.figure.n_mean, self.peak_exact)

    def width_ok(self):
        if self.reference_width_sq is None:
            return True
        return abs(self.rel_err_width) <= tolerance(self.figure.n_mean, self.width_exact)


def table1(n):
    """Optimise and characterise every regime and scheme at photon budget ``n``."""
    n = float(n)
    if n < 1:
        raise ValueError("table needs a photon budget of at least 1")
    rows = []
    for regime in REGIMES:
        for scheme in SCHEMES:
            fig = optimized_figure(n, regime, scheme)
            peak, width, pe, we = reference_table_values(n, regime, scheme)
            rows.append(Table1Entry(regime, scheme, fig, peak, width, pe, we))
    return rows


@dataclass(frozen=True)
class TradeoffRow:
    """Both sides of ``log_N(width) ~ log_2(N * peak) + 1/2``."""

    regime: SqueezeRegime
    scheme: DetectionScheme
    log_n_width: float
    log2_n_peak: float

    @property
    def difference(self):
        return self.log_n_width - (self.log2_n_peak + 0.5)


def tradeoff_report(n):
    n = float(n)
    if n < 4:
        raise ValueError("trade-off report needs N >= 4")
    rows = []
    for entry in table1(n):
        fig = entry.figure
        rows.append(
            TradeoffRow(
                entry.regime,
                entry.scheme,
                math.log(fig.width) / math.log(n),
                math.log2(n * math.sqrt(fig.dphi0_sq)),
            )
        )
    return rows
