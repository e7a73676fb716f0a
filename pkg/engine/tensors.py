"""
Pointwise tensor values and the derivative arrays they are built from.

Index conventions used throughout the engine:
  dg[e, a, b]          = d_e g_ab
  gamma[k, i, j]       = Christoffel symbol, nabla_{d_i} d_j = gamma[k, i, j] d_k
  Rm[a, b, c, d]       = g(R(d_a, d_b) d_c, d_d)
  nabla T[e, ...]      = (nabla_{d_e} T)[...]
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .jets import Jet2

Variance = Literal["upper", "lower"]
FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class TensorValue:
    """Components of a tensor at one point, with explicit index variance."""

    components: FloatArray
    variance: tuple[Variance, ...]

    def __post_init__(self) -> None:
        comps = np.asarray(self.components, dtype=float)
        if comps.ndim != len(self.variance):
            raise ValueError(f"rank {comps.ndim} does not match variance {self.variance}")
        if comps.ndim and len(set(comps.shape)) != 1:
            raise ValueError(f"all axes must have the same dimension, got {comps.shape}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variance", tuple(self.variance))

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.rank else 0

    def __getitem__(self, key):
        return self.components[key]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def lower(self, slot: int, metric: FloatArray) -> "TensorValue":
        if self.variance[slot] != "upper":
            raise ValueError(f"index {slot} is already lower")
        moved = np.tensordot(metric, self.components, axes=([1], [slot]))
        comps = np.moveaxis(moved, 0, slot)
        var = list(self.variance)
        var[slot] = "lower"
        return TensorValue(comps, tuple(var))

    def raise_index(self, slot: int, inverse_metric: FloatArray) -> "TensorValue":
        if self.variance[slot] != "lower":
            raise ValueError(f"index {slot} is already upper")
        moved = np.tensordot(inverse_metric, self.components, axes=([1], [slot]))
        comps = np.moveaxis(moved, 0, slot)
        var = list(self.variance)
        var[slot] = "upper"
        return TensorValue(comps, tuple(var))


@dataclass(frozen=True)
class MetricDerivatives:
    """
    A metric and its coordinate derivatives up to order three at one point.

    ginv is optional; when absent it is taken from numpy's inverse.
    """

    g: FloatArray
    dg: FloatArray
    d2g: FloatArray
    d3g: FloatArray
    ginv: Optional[FloatArray] = None

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def inverse(self) -> FloatArray:
        return self.ginv if self.ginv is not None else np.linalg.inv(self.g)


def embed_base_derivatives(jet: Jet2, dim: int) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """
    Spread a tensor-valued jet in (w1, w2) into full coordinate derivative
    arrays. Coordinates 0 and 1 are w1 and w2; every other direction has
    zero derivative.
    """
    shape = jet.shape
    d1 = np.zeros((dim,) + shape)
    d2 = np.zeros((dim, dim) + shape)
    d3 = np.zeros((dim, dim, dim) + shape)
    d1[:2] = jet.gradient()
    d2[:2, :2] = jet.hessian()
    d3[:2, :2, :2] = jet.third()
    return np.array(jet.value), d1, d2, d3


def covariant_derivative(
    tensor: FloatArray,
    partials: FloatArray,
    gamma: FloatArray,
    variance: Sequence[Variance],
) -> FloatArray:
    """
    nabla_e T from the partials d_e T and connection coefficients.

    gamma need not be symmetric: gamma[k, e, l] is the d_k component of
    nabla_{d_e} d_l, so passing gamma - S gives the canonical connection.
    """
    out = np.array(partials, dtype=float, copy=True)
    rank = tensor.ndim
    for slot, kind in enumerate(variance):
        if kind == "upper":
            contrib = np.tensordot(gamma, tensor, axes=([2], [slot]))
            out += np.moveaxis(contrib, 0, slot + 1)
        else:
            contrib = np.tensordot(tensor, gamma, axes=([slot], [0]))
            out -= np.moveaxis(contrib, [rank - 1, rank], [0, slot + 1])
    return out


def endomorphism_from_curvature(Rm: FloatArray, ginv: FloatArray) -> FloatArray:
    """End[a, b] is the matrix of R(d_a, d_b): End[a, b, k, c] = (R_ab d_c)^k."""
    return np.einsum("kd,abcd->abkc", ginv, Rm)
