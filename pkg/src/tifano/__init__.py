"""Quantized dipolar modes of a magnetoelectric nanosphere and their Fano interference with a quantum dot."""

from .errors import PhysicsError, PhysicsWarning, QuadratureError
from .materials import SI, DielectricModel, HostMedium, TIMaterial
from .quantization import HybridScenario, Orientation, QuantumDot
from .quasistatics import SphereGeometry
from .spectrum import compute_spectrum, derive_parameters, sweep

__version__ = "0.1.0"

__all__ = [
    "PhysicsError",
    "PhysicsWarning",
    "QuadratureError",
    "SI",
    "DielectricModel",
    "HostMedium",
    "TIMaterial",
    "HybridScenario",
    "Orientation",
    "QuantumDot",
    "SphereGeometry",
    "compute_spectrum",
    "derive_parameters",
    "sweep",
]
