from .spec import ProfileKind, Coupling, MetricSpec, WaveProfile, PlaneWaveSpec
from .report import CheckResult, SuiteReport, ReportDoc

__all__ = [
    "ProfileKind", "Coupling", "MetricSpec",
    "WaveProfile", "PlaneWaveSpec",
    "CheckResult", "SuiteReport", "ReportDoc",
]
