from typing import List, Literal, Optional

from pydantic import BaseModel, Field


SuiteName = Literal[
    "metric",           # Ricci-flatness, curvature formula, Christoffel cross-checks
    "kahler",           # J, Kähler form, Cauchy–Riemann, structure tensor class
    "ambrose_singer",   # canonical connection residuals and recurrence identities
    "vsi",              # scalar invariants
    "osserman",         # Jacobi operators
    "walker",           # parallel null distribution
    "holonomy",
    "geodesic",
    "liealg",
    "wave",
    "quaternion",
]

CheckStatus = Literal["pass", "fail", "skipped"]


class CheckResult(BaseModel):
    """One verified identity with its worst residual over the sampled points."""
    name: str
    suite: str
    max_residual: Optional[float] = None
    threshold: Optional[float] = None
    passed: bool = False
    status: CheckStatus = "fail"
    details: dict = Field(default_factory=dict)
    diagnostic: bool = False                # reported, never counted against the run
    message: Optional[str] = None

    @classmethod
    def from_residual(cls, name: str, suite: str, residual: float, threshold: float, **extra) -> "CheckResult":
        passed = bool(residual <= threshold)
        return cls(
            name=name, suite=suite, max_residual=float(residual), threshold=threshold,
            passed=passed, status="pass" if passed else "fail", **extra,
        )

    @classmethod
    def from_flag(cls, name: str, suite: str, ok: bool, **extra) -> "CheckResult":
        return cls(name=name, suite=suite, passed=bool(ok), status="pass" if ok else "fail", **extra)

    @classmethod
    def skipped(cls, name: str, suite: str, reason: str) -> "CheckResult":
        return cls(name=name, suite=suite, passed=False, status="skipped", message=reason)


class SuiteReport(BaseModel):
    name: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.diagnostic or c.status == "skipped" for c in self.checks)


class ReportDoc(BaseModel):
    """
    Machine-readable result of one CLI command, written as JSON.
    Carries no timing; reruns with the same seed are byte-identical.
    """
    tool_version: str
    command: str
    spec: dict = Field(default_factory=dict)
    seed: Optional[int] = None
    samples: Optional[int] = None
    suites: List[SuiteReport] = Field(default_factory=list)
    artifacts: dict = Field(default_factory=dict)

    # --- Summary ---
    passed: bool = False
    check_count: int = 0
    failure_count: int = 0
    skipped_count: int = 0
    failures: List[str] = Field(default_factory=list)

    def compute_summary(self) -> None:
        """Populate summary fields from the suite checks."""
        checks = [c for s in self.suites for c in s.checks]
        self.check_count = len(checks)
        self.skipped_count = sum(1 for c in checks if c.status == "skipped")
        self.failures = [f"{c.suite}.{c.name}" for c in checks if c.status == "fail" and not c.diagnostic]
        self.failure_count = len(self.failures)
        self.passed = self.failure_count == 0
