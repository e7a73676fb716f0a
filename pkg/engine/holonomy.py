"""
Infinitesimal holonomy of the complex-wave family.

The curvature endomorphisms R_XY all lie on one line spanned by

  A: d_w1 -> d_z2,  d_w2 -> -d_z1,  everything else -> 0

and the recurrence of R keeps the covariant derivatives on that line, so
the holonomy algebra is one dimensional. Spans are reduced by singular
values relative to the largest one.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from models.spec import MetricSpec
from .errors import DegenerateBasis
from .geometry import curvature_data, nabla2_riemann
from .kahler import standard_J
from .metric_family import W1, Z1, Z2, W2, eval_profile_b, metric_derivatives
from .tensors import endomorphism_from_curvature

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
DEFAULT_RANK_TOL = 1e-9
# spans whose largest singular value is below this are treated as zero
ZERO_FLOOR = 1e-12
MAX_HOLONOMY_ORDER = 2


@dataclass
class EndoSpan:
    generators: list[FloatArray]
    basis: list[FloatArray] = field(default_factory=list)
    dims_by_order: list[int] = field(default_factory=list)
    stabilized: bool = True

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def from_generators(cls, generators: Sequence[FloatArray], rank_tol: float = DEFAULT_RANK_TOL) -> "EndoSpan":
        generators = [np.asarray(m, float) for m in generators]
        return cls(generators=generators, basis=reduce_span(generators, rank_tol))

    def coefficient_on(self, matrix: FloatArray) -> tuple[float, float]:
        """
        Least-squares multiple of matrix fitting the first basis element,
        with the size of what is left over.
        """
        if not self.basis:
            return 0.0, 0.0
        gen = self.basis[0]
        coeff = float(np.sum(gen * matrix) / np.sum(matrix * matrix))
        return coeff, float(np.max(np.abs(gen - coeff * matrix)))


def reduce_span(matrices: Sequence[FloatArray], rank_tol: float = DEFAULT_RANK_TOL) -> list[FloatArray]:
    """Orthonormal basis (Frobenius) of the span, rank decided relative to the largest singular value."""
    if not matrices:
        return []
    shape = matrices[0].shape
    stack = np.stack([m.ravel() for m in matrices])
    _, sv, vt = np.linalg.svd(stack, full_matrices=False)
    if sv.size == 0 or sv[0] < ZERO_FLOOR:
        return []
    rank = int(np.sum(sv > rank_tol * sv[0]))
    return [vt[k].reshape(shape) for k in range(rank)]


def standard_A(n: int) -> FloatArray:
    dim = 2 * n + 4
    A = np.zeros((dim, dim))
    A[Z2, W1] = 1.0
    A[Z1, W2] = -1.0
    return A


def _pair_endomorphisms(ends: FloatArray) -> list[FloatArray]:
    dim = ends.shape[0]
    return [ends[a, b] for a in range(dim) for b in range(a + 1, dim)]


# ---------------------------------------------------------------------------
# Curvature and holonomy
# ---------------------------------------------------------------------------

def curvature_endomorphisms(spec: MetricSpec, point: Sequence[float], rank_tol: float = DEFAULT_RANK_TOL) -> EndoSpan:
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    ends = endomorphism_from_curvature(cd.Rm, cd.ginv)
    span = EndoSpan.from_generators(_pair_endomorphisms(ends), rank_tol)
    span.dims_by_order = [span.dim]
    return span


def curvature_generator(spec: MetricSpec, point: Sequence[float]) -> FloatArray:
    """R_{d_w1 d_w2}, which equals (laplacian b / 2) A."""
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    return endomorphism_from_curvature(cd.Rm, cd.ginv)[W1, W2]


def _bracket_closure(basis: list[FloatArray], rank_tol: float) -> list[FloatArray]:
    while True:
        brackets = [x @ y - y @ x for i, x in enumerate(basis) for y in basis[i + 1:]]
        grown = reduce_span(basis + brackets, rank_tol)
        if len(grown) == len(basis):
            return basis
        basis = grown


def infinitesimal_holonomy(
    spec: MetricSpec,
    point: Sequence[float],
    max_order: int = 1,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> EndoSpan:
    """
    Span of the curvature endomorphisms and their covariant derivatives up to
    max_order, closed under brackets. stabilized is true when the last order
    added no direction.
    """
    if not 0 <= max_order <= MAX_HOLONOMY_ORDER:
        raise ValueError(f"max_order must be between 0 and {MAX_HOLONOMY_ORDER}")
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=max_order >= 1)
    generators = _pair_endomorphisms(endomorphism_from_curvature(cd.Rm, cd.ginv))
    basis = _bracket_closure(reduce_span(generators, rank_tol), rank_tol)
    dims = [len(basis)]

    layers = []
    if max_order >= 1:
        layers.append(cd.nabla_R)
    if max_order >= 2:
        layers.append(nabla2_riemann(spec, point, cd))
    for layer in layers:
        flat = layer.reshape((-1,) + cd.Rm.shape)
        for block in flat:
            generators.extend(_pair_endomorphisms(endomorphism_from_curvature(block, cd.ginv)))
        basis = _bracket_closure(reduce_span(generators, rank_tol), rank_tol)
        dims.append(len(basis))

    stabilized = len(dims) < 2 or dims[-1] == dims[-2]
    logger.debug("Holonomy dims by order %s (stabilized=%s)", dims, stabilized)
    return EndoSpan(generators=generators, basis=basis, dims_by_order=dims, stabilized=stabilized)


def holonomy_checks(spec: MetricSpec, point: Sequence[float], generator: Optional[FloatArray] = None) -> dict[str, float]:
    """Skewness with respect to g, commutation with J and nilpotency of the generator."""
    g = metric_derivatives(spec, point).g
    A = standard_A(spec.n) if generator is None else generator
    J = standard_J(spec.n).matrix
    return {
        "skew": float(np.max(np.abs(A.T @ g + g @ A))),
        "commutes_J": float(np.max(np.abs(A @ J - J @ A))),
        "nilpotent": float(np.max(np.abs(A @ A))),
    }


# ---------------------------------------------------------------------------
# Invariant subspaces and normal form
# ---------------------------------------------------------------------------

def invariant_subspaces(spec: MetricSpec, point: Sequence[float]) -> dict:
    g = metric_derivatives(spec, point).g
    dim = spec.dim
    A = standard_A(spec.n)
    E = np.eye(dim)[:, [W1, W2, Z1, Z2]]
    E_perp = null_space(E.T @ g)
    image = A @ E
    outside = image[4:] if dim > 4 else np.zeros((0, 4))
    return {
        "E_dim": 4,
        "E_perp_dim": int(E_perp.shape[1]),
        "E_perp_basis": E_perp,
        "A_E_outside": float(np.max(np.abs(outside))) if outside.size else 0.0,
        "A_E_perp": float(np.max(np.abs(A @ E_perp))) if E_perp.size else 0.0,
    }


@dataclass
class NormalForm:
    sign: int
    raw: NDArray[np.complex128]
    normalized: NDArray[np.complex128]
    gram: NDArray[np.complex128]

    def checks(self) -> dict[str, float]:
        m, G = self.normalized, self.gram
        return {
            "trace": abs(complex(np.trace(m))),
            "square": float(np.max(np.abs(m @ m))),
            "su11": float(np.max(np.abs(m.conj().T @ G.T + G.T @ m))),
        }


def _complex_coordinates(v: FloatArray, basis: list[FloatArray], J: FloatArray) -> NDArray[np.complex128]:
    real_basis = np.stack([col for b in basis for col in (b, J @ b)], axis=1)
    coords, *_ = np.linalg.lstsq(real_basis, v, rcond=None)
    return coords[0::2] + 1j * coords[1::2]


def su11_normal_form(spec: MetricSpec, point: Sequence[float], zero_tol: float = 1e-14) -> NormalForm:
    """
    Matrix of A restricted to E in the basis W = d_w1 / sqrt|b|,
    Z = W - s sqrt|b| d_z1, with s the sign of b. The raw matrix is
    (s / |b|) [[i, i], [-i, -i]]; |b| A gives s [[i, i], [-i, -i]].
    """
    b = float(eval_profile_b(spec, point).value)
    if abs(b) < zero_tol:
        raise DegenerateBasis(f"b vanishes at {tuple(point[:2])}")
    s = 1 if b > 0 else -1
    root = np.sqrt(abs(b))
    dim = spec.dim
    J = standard_J(spec.n).matrix
    g = metric_derivatives(spec, point).g
    W = np.zeros(dim)
    W[W1] = 1.0 / root
    Z = W.copy()
    Z[Z1] = -s * root
    basis = [W, Z]
    A = standard_A(spec.n)
    raw = np.stack([_complex_coordinates(A @ v, basis, J) for v in basis], axis=1)
    gram = np.array([[x @ g @ y + 1j * (x @ g @ J @ y) for y in basis] for x in basis])
    return NormalForm(sign=s, raw=raw, normalized=abs(b) * raw, gram=gram)
