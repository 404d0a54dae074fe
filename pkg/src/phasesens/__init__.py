"""Phase sensitivity of squeezed-light interferometers with Gaussian moment algebra."""

from .detection import (
    DetectionScheme,
    ErrorPoint,
    error_curve,
    observable,
    parametric_readout_error,
    phase_error,
)
from .gaussian import (
    GaussianState,
    QuadraticObservable,
    SymplecticTransform,
    apply,
    make_beamsplitter,
    make_displacement,
    make_rotation,
    make_squeeze,
    photon_stats,
    quadratic_moments,
    vacuum,
)
from .interferometer import (
    NO_INFORMATION,
    InterferometerConfig,
    PhotonBudget,
    Topology,
    mean_probe_photons,
    output_state,
    qcrb,
)
from .kernels import BACKEND
from .sensitivity import (
    FigureOfMerit,
    SensitivityCurve,
    SqueezeRegime,
    config_for,
    optimize_displacement,
    peak_and_width,
    sweep,
    table1,
    tradeoff_report,
)

__version__ = "0.1.0"
