from .errors import (
    PwlabError, SpecError, InvalidPointError, JetDomainError, DegenerateBasis,
    NonIsotropicXi, SingularityReached, BlowUp, StepUnderflow,
)
from .jets import Jet2
from .tensors import TensorValue, MetricDerivatives
from .integrator import GeodesicState, Trajectory, ComplexWaveGeometry, integrate_geodesic
from .lie_model import LieAlgebraG, build_algebra
from .quaternionic import QuaternionTriple, WedgeSystem, build_flat_model

__all__ = [
    "PwlabError", "SpecError", "InvalidPointError", "JetDomainError", "DegenerateBasis",
    "NonIsotropicXi", "SingularityReached", "BlowUp", "StepUnderflow",
    "Jet2", "TensorValue", "MetricDerivatives",
    "GeodesicState", "Trajectory", "ComplexWaveGeometry", "integrate_geodesic",
    "LieAlgebraG", "build_algebra",
    "QuaternionTriple", "WedgeSystem", "build_flat_model",
]
