from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


ProfileVariant = Literal["singular", "cw_analog", "flat"]
WaveProfileKind = Literal["constant", "scale_invariant", "polynomial"]
MetricConvention = Literal["full", "half"]

# (re, im) pair; complex numbers are kept as pairs so spec files stay plain text
ComplexPair = Tuple[float, float]
# (power of w1, power of w2, coefficient)
Monomial = Tuple[int, int, float]


class ProfileKind(BaseModel):
    """The coefficient b of the metric, fixed by its Laplacian."""
    model_config = ConfigDict(frozen=True)

    variant: ProfileVariant
    b0: float = 0.0
    harmonic_extra: Tuple[ComplexPair, ...] = ()    # Re of this polynomial is added to b

    @model_validator(mode="after")
    def _check_b0(self) -> "ProfileKind":
        if self.variant == "flat" and self.b0 != 0.0:
            raise ValueError("flat profile forces b0 = 0")
        if self.variant != "flat" and self.b0 == 0.0:
            raise ValueError(f"{self.variant} profile needs b0 != 0")
        return self


class Coupling(BaseModel):
    """
    One coupling function of the metric.

    Either a holomorphic polynomial h (coefficients of w^k) giving
    (r, s) = (Re h, -Im h), or a split pair of real polynomials r, s.
    The split form exists to ingest non-holomorphic negative controls.
    """
    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[ComplexPair, ...] = ()
    r: Optional[Tuple[Monomial, ...]] = None
    s: Optional[Tuple[Monomial, ...]] = None

    @model_validator(mode="after")
    def _check_form(self) -> "Coupling":
        split = self.r is not None or self.s is not None
        if split and self.coeffs:
            raise ValueError("a coupling is either holomorphic coefficients or split r/s, not both")
        if split and (self.r is None or self.s is None):
            raise ValueError("split couplings need both r and s")
        return self

    @property
    def is_split(self) -> bool:
        return self.r is not None


class MetricSpec(BaseModel):
    """Full parametrization of the complex-wave metric family."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    epsilons: Tuple[int, ...] = ()
    profile: ProfileKind
    couplings: Tuple[Coupling, ...] = ()
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_sizes(self) -> "MetricSpec":
        if len(self.epsilons) != self.n:
            raise ValueError(f"expected {self.n} signs, got {len(self.epsilons)}")
        if len(self.couplings) != self.n:
            raise ValueError(f"expected {self.n} couplings, got {len(self.couplings)}")
        if any(e not in (1, -1) for e in self.epsilons):
            raise ValueError("signs must be +1 or -1")
        return self

    @property
    def dim(self) -> int:
        return 2 * self.n + 4

    @property
    def signature(self) -> Tuple[int, int]:
        """(negative, positive) counts of the metric."""
        neg = sum(1 for e in self.epsilons if e == -1)
        pos = self.n - neg
        return 2 + 2 * neg, 2 + 2 * pos

    @property
    def is_holomorphic(self) -> bool:
        return not any(c.is_split for c in self.couplings)


class WaveProfile(BaseModel):
    """
    Profile rule u -> A(u) of a plane wave.

    constant:        matrices = [A]
    scale_invariant: matrices = [B], A(u) = B / u^2
    polynomial:      matrices = [C0, C1, ...], A(u) = sum C_k u^k
    """
    model_config = ConfigDict(frozen=True)

    kind: WaveProfileKind
    matrices: Tuple[Tuple[Tuple[float, ...], ...], ...]

    @model_validator(mode="after")
    def _check_matrices(self) -> "WaveProfile":
        if not self.matrices:
            raise ValueError("profile needs at least one matrix")
        if self.kind != "polynomial" and len(self.matrices) != 1:
            raise ValueError(f"{self.kind} profile takes exactly one matrix")
        size = len(self.matrices[0])
        for m in self.matrices:
            if len(m) != size or any(len(row) != size for row in m):
                raise ValueError("profile matrices must all be square of the same size")
            for i in range(size):
                for j in range(i):
                    if m[i][j] != m[j][i]:
                        raise ValueError("profile matrices must be symmetric")
        return self


class PlaneWaveSpec(BaseModel):
    """Lorentzian plane wave in coordinates (u, v, x1..xn)."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    profile: WaveProfile
    epsilons: Tuple[int, ...] = ()
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_sizes(self) -> "PlaneWaveSpec":
        if len(self.profile.matrices[0]) != self.n:
            raise ValueError(f"profile must be {self.n}x{self.n}")
        if self.epsilons and len(self.epsilons) != self.n:
            raise ValueError(f"expected {self.n} signs, got {len(self.epsilons)}")
        if any(e not in (1, -1) for e in self.epsilons):
            raise ValueError("signs must be +1 or -1")
        return self

    @property
    def signs(self) -> Tuple[int, ...]:
        return self.epsilons or (1,) * self.n

    @property
    def dim(self) -> int:
        return self.n + 2
