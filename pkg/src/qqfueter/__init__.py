"""Numerical verification lab for deformed quaternionic Fueter operators.

The package implements quaternion arithmetic over orthonormal 4-frames,
two-parameter difference (deformed) operators, the Cauchy kernel of the
frame Dirac operators, tensor-product Gauss quadrature on 4-D boxes
with graded singular handling, and an executable harness that certifies
the classical and deformed surface/volume and reproduction identities
at desk scale.
"""

from .errors import (
    CalibrationAmbiguous,
    ComponentVanishes,
    ConfigError,
    HypothesisViolated,
    InvalidDeformation,
    InvalidStructuralSet,
    MissingExactPartial,
    NonFiniteSample,
    NotOrthonormal,
    PoleHit,
    PoleTooCloseToBoundary,
    QQFueterError,
    RequiresDerivativeAtZero,
    SingularPoint,
)
from .fields import builtin_catalog
from .geometry import Box4, QuadSpec, calibrate_sigma
from .harness import CASES, SuiteConfig, convergence_sweep, load_config, run_suite
from .qqcalc import EvalFrame, QQPair, QQVector
from .quaternion import (
    ONE,
    E1,
    E2,
    E3,
    Quaternion,
    StructuralSet,
    STANDARD,
    random_structural_set,
    validate_structural_set,
)

__version__ = "0.1.0"

__all__ = [
    "Box4",
    "CASES",
    "CalibrationAmbiguous",
    "ComponentVanishes",
    "ConfigError",
    "E1",
    "E2",
    "E3",
    "EvalFrame",
    "HypothesisViolated",
    "InvalidDeformation",
    "InvalidStructuralSet",
    "MissingExactPartial",
    "NonFiniteSample",
    "NotOrthonormal",
    "ONE",
    "PoleHit",
    "PoleTooCloseToBoundary",
    "QQFueterError",
    "QQPair",
    "QQVector",
    "QuadSpec",
    "Quaternion",
    "RequiresDerivativeAtZero",
    "SingularPoint",
    "StructuralSet",
    "STANDARD",
    "SuiteConfig",
    "builtin_catalog",
    "calibrate_sigma",
    "convergence_sweep",
    "load_config",
    "random_structural_set",
    "run_suite",
    "validate_structural_set",
    "__version__",
]
