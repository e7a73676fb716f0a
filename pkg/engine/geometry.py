"""
Pointwise tensor calculus on derivative arrays.

Everything here works from a MetricDerivatives bundle (g and its partials up
to order three), so the same code serves the complex-wave family, whose
derivatives come from jets, and plane waves, whose derivatives are analytic.

Pipeline:
  Christoffel (both index positions) and their first/second partials
  Riemann (0,4) and its partials, Ricci, scalar curvature
  nabla R, second Bianchi cyclic sum
  scalar invariant catalog, Jacobi operators
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from models.spec import MetricSpec
from .metric_family import (
    W1, W2, Z1, Z2, coupling_jets, eval_profile_b, metric_components,
    metric_derivatives, recurrence_form, x_index, y_index,
)
from .tensors import MetricDerivatives, TensorValue, covariant_derivative

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
DEFAULT_FD_STEP = 1e-5

INVARIANT_CATALOG: dict[int, tuple[str, ...]] = {
    0: ("kretschmann", "ricci_square", "scalar_curvature", "riemann_cubic"),
    1: ("nabla_riemann_square", "nabla_riemann_cross", "riemann_nabla_square"),
    2: ("nabla2_riemann_square", "box_riemann_dot_riemann"),
}


@dataclass(frozen=True)
class CurvatureData:
    g: FloatArray
    ginv: FloatArray
    gamma_low: FloatArray
    gamma: FloatArray
    Rm: FloatArray
    dRm: Optional[FloatArray] = None
    nabla_R: Optional[FloatArray] = None

    @property
    def dim(self) -> int:
        return self.g.shape[0]


# ---------------------------------------------------------------------------
# Christoffel symbols and curvature
# ---------------------------------------------------------------------------

def christoffel_arrays(md: MetricDerivatives) -> tuple[FloatArray, FloatArray]:
    """(gamma_low[k, m, n], gamma[l, m, n]) with gamma_low = g(nabla_m d_n, d_k)."""
    dg = md.dg
    gamma_low = 0.5 * (
        np.einsum("mkn->kmn", dg) + np.einsum("nkm->kmn", dg) - dg
    )
    gamma = np.einsum("lk,kmn->lmn", md.inverse(), gamma_low)
    return gamma_low, gamma


def _christoffel_partials(md: MetricDerivatives, gamma_low: FloatArray):
    d2g, d3g = md.d2g, md.d3g
    ginv = md.inverse()
    d_gamma_low = 0.5 * (
        np.einsum("emkn->ekmn", d2g) + np.einsum("enkm->ekmn", d2g) - d2g
    )
    d2_gamma_low = 0.5 * (
        np.einsum("femkn->fekmn", d3g) + np.einsum("fenkm->fekmn", d3g) - d3g
    )
    d_ginv = -np.einsum("ia,eab,bj->eij", ginv, md.dg, ginv)
    d_gamma = (
        np.einsum("elk,kmn->elmn", d_ginv, gamma_low)
        + np.einsum("lk,ekmn->elmn", ginv, d_gamma_low)
    )
    return d_gamma_low, d2_gamma_low, d_gamma


def curvature_data(md: MetricDerivatives, with_derivative: bool = True) -> CurvatureData:
    ginv = md.inverse()
    gamma_low, gamma = christoffel_arrays(md)
    d_gamma_low, d2_gamma_low, d_gamma = _christoffel_partials(md, gamma_low)

    r_low = (
        np.einsum("mans->asmn", d_gamma_low)
        - np.einsum("nams->asmn", d_gamma_low)
        - np.einsum("rma,rns->asmn", gamma_low, gamma)
        + np.einsum("rna,rms->asmn", gamma_low, gamma)
    )
    Rm = np.einsum("dcab->abcd", r_low)
    if not with_derivative:
        return CurvatureData(md.g, ginv, gamma_low, gamma, Rm)

    d_r_low = (
        np.einsum("emans->easmn", d2_gamma_low)
        - np.einsum("enams->easmn", d2_gamma_low)
        - np.einsum("erma,rns->easmn", d_gamma_low, gamma)
        - np.einsum("rma,erns->easmn", gamma_low, d_gamma)
        + np.einsum("erna,rms->easmn", d_gamma_low, gamma)
        + np.einsum("rna,erms->easmn", gamma_low, d_gamma)
    )
    dRm = np.einsum("edcab->eabcd", d_r_low)
    nabla_R = covariant_derivative(Rm, dRm, gamma, ("lower",) * 4)
    return CurvatureData(md.g, ginv, gamma_low, gamma, Rm, dRm, nabla_R)


def ricci_from(cd: CurvatureData) -> FloatArray:
    return np.einsum("ad,abcd->bc", cd.ginv, cd.Rm)


def raise_all(tensor: FloatArray, ginv: FloatArray) -> FloatArray:
    out = tensor
    for slot in range(tensor.ndim):
        out = np.moveaxis(np.tensordot(ginv, out, axes=([1], [slot])), 0, slot)
    return out


def riemann_symmetry_residual(Rm: FloatArray) -> dict[str, float]:
    return {
        "antisymmetry_first_pair": float(np.max(np.abs(Rm + np.einsum("bacd->abcd", Rm)))),
        "antisymmetry_second_pair": float(np.max(np.abs(Rm + np.einsum("abdc->abcd", Rm)))),
        "pair_exchange": float(np.max(np.abs(Rm - np.einsum("cdab->abcd", Rm)))),
        "first_bianchi": float(np.max(np.abs(
            Rm + np.einsum("bcad->abcd", Rm) + np.einsum("cabd->abcd", Rm)
        ))),
    }


def second_bianchi_residual(nabla_R: FloatArray) -> float:
    cyclic = nabla_R + np.einsum("abecd->eabcd", nabla_R) + np.einsum("beacd->eabcd", nabla_R)
    return float(np.max(np.abs(cyclic)))


def christoffel_finite_difference(metric_at, point: Sequence[float], step: float = DEFAULT_FD_STEP) -> FloatArray:
    """Christoffel symbols from central differences of a metric callable."""
    point = np.asarray(point, dtype=float)
    dim = point.size
    dg = np.zeros((dim, dim, dim))
    for e in range(dim):
        shift = np.zeros(dim)
        shift[e] = step
        dg[e] = (metric_at(point + shift) - metric_at(point - shift)) / (2.0 * step)
    g = metric_at(point)
    zeros = np.zeros((dim,) * 4)
    md = MetricDerivatives(g=g, dg=dg, d2g=zeros, d3g=np.zeros((dim,) * 5))
    return christoffel_arrays(md)[1]


# ---------------------------------------------------------------------------
# Invariants and Jacobi operators
# ---------------------------------------------------------------------------

def scalar_invariants_from(
    cd: CurvatureData,
    order: int,
    nabla2_R: Optional[FloatArray] = None,
) -> dict[str, float]:
    """Invariant catalog up to the requested derivative order of R."""
    if order not in INVARIANT_CATALOG:
        raise ValueError(f"order must be one of {sorted(INVARIANT_CATALOG)}")
    ginv = cd.ginv
    Rm = cd.Rm
    r_up = raise_all(Rm, ginv)
    ric = ricci_from(cd)
    ric_up = ginv @ ric @ ginv
    mixed = np.einsum("abkl,kc,ld->abcd", Rm, ginv, ginv)
    out = {
        "kretschmann": float(np.sum(Rm * r_up)),
        "ricci_square": float(np.sum(ric * ric_up)),
        "scalar_curvature": float(np.sum(ginv * ric)),
        "riemann_cubic": float(np.einsum("abcd,cdef,efab->", mixed, mixed, mixed)),
    }
    if order >= 1:
        if cd.nabla_R is None:
            raise ValueError("order-1 invariants need nabla R")
        n_up = raise_all(cd.nabla_R, ginv)
        vec = np.einsum("abcd,eabcd->e", r_up, cd.nabla_R)
        out["nabla_riemann_square"] = float(np.sum(cd.nabla_R * n_up))
        out["nabla_riemann_cross"] = float(np.einsum("eabcd,aebcd->", cd.nabla_R, n_up))
        out["riemann_nabla_square"] = float(vec @ ginv @ vec)
    if order >= 2:
        if nabla2_R is None:
            raise ValueError("order-2 invariants need the second covariant derivative of R")
        out["nabla2_riemann_square"] = float(np.sum(nabla2_R * raise_all(nabla2_R, ginv)))
        out["box_riemann_dot_riemann"] = float(np.einsum("fe,feabcd,abcd->", ginv, nabla2_R, r_up))
    return out


def jacobi_matrix(cd: CurvatureData, X: Sequence[float]) -> FloatArray:
    """Matrix of Y -> R(Y, X) X; column index is Y."""
    X = np.asarray(X, dtype=float)
    return np.einsum("ed,yabd,a,b->ey", cd.ginv, cd.Rm, X, X)


# ---------------------------------------------------------------------------
# Spec-level operations for the complex-wave family
# ---------------------------------------------------------------------------

def christoffel(spec: MetricSpec, point: Sequence[float]) -> TensorValue:
    _, gamma = christoffel_arrays(metric_derivatives(spec, point))
    return TensorValue(gamma, ("upper", "lower", "lower"))


def riemann(spec: MetricSpec, point: Sequence[float]) -> TensorValue:
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    return TensorValue(cd.Rm, ("lower",) * 4)


def ricci(spec: MetricSpec, point: Sequence[float]) -> TensorValue:
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    return TensorValue(ricci_from(cd), ("lower", "lower"))


def nabla_riemann(spec: MetricSpec, point: Sequence[float]) -> TensorValue:
    cd = curvature_data(metric_derivatives(spec, point))
    return TensorValue(cd.nabla_R, ("lower",) * 5)


def full_recurrence_form(spec: MetricSpec, point: Sequence[float]) -> tuple[FloatArray, FloatArray]:
    """The recurrence 1-form and its partials embedded in all coordinates."""
    theta2, dtheta2 = recurrence_form(point)
    theta = np.zeros(spec.dim)
    dtheta = np.zeros((spec.dim, spec.dim))
    theta[:2] = theta2
    dtheta[:2, :2] = dtheta2
    return theta, dtheta


def nabla2_riemann(spec: MetricSpec, point: Sequence[float], cd: Optional[CurvatureData] = None) -> FloatArray:
    """
    Second covariant derivative of R for the complex family.

    Symmetric profiles have nabla R = 0 and so nabla^2 R = 0. The singular
    profile is recurrent, nabla R = 4 theta (x) R, which differentiates to
    nabla^2 R = 4 nabla theta (x) R + 4 theta (x) nabla R.
    """
    cd = cd or curvature_data(metric_derivatives(spec, point))
    dim = spec.dim
    if spec.profile.variant != "singular":
        return np.zeros((dim,) * 6)
    theta, dtheta = full_recurrence_form(spec, point)
    nabla_theta = covariant_derivative(theta, dtheta, cd.gamma, ("lower",))
    return 4.0 * np.einsum("fe,abcd->feabcd", nabla_theta, cd.Rm) + 4.0 * np.einsum(
        "e,fabcd->feabcd", theta, cd.nabla_R
    )


def scalar_invariants(spec: MetricSpec, point: Sequence[float], order: int) -> dict[str, float]:
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=order >= 1)
    nabla2 = nabla2_riemann(spec, point, cd) if order >= 2 else None
    return scalar_invariants_from(cd, order, nabla2)


def jacobi_operator(spec: MetricSpec, point: Sequence[float], X: Sequence[float]) -> TensorValue:
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    return TensorValue(jacobi_matrix(cd, X), ("upper", "lower"))


def christoffel_closed_form(spec: MetricSpec, point: Sequence[float]) -> dict[tuple[int, int, int], float]:
    """
    Nonzero Christoffel symbols gamma[k, i, j] (i <= j) of the family for
    holomorphic couplings, written out from b, r_a, s_a and their first
    partials. Every entry not listed vanishes.
    """
    b = eval_profile_b(spec, point)
    b1, b2 = float(b.derivative(1, 0)), float(b.derivative(0, 1))
    low_w1 = {(W1, W1): 0.5 * b1, (W1, W2): 0.5 * b2, (W2, W2): -0.5 * b1}
    low_w2 = {(W1, W1): -0.5 * b2, (W1, W2): 0.5 * b1, (W2, W2): 0.5 * b2}
    out: dict[tuple[int, int, int], float] = {}

    def put(k: int, pair: tuple[int, int], value: float) -> None:
        out[(k,) + pair] = out.get((k,) + pair, 0.0) + value

    for pair in low_w1:
        put(Z1, pair, low_w1[pair])
        put(Z2, pair, low_w2[pair])
    for a, ((r, s), eps) in enumerate(zip(coupling_jets(spec, point), spec.epsilons)):
        rv, sv = float(r.value), float(s.value)
        r1, r2 = float(r.derivative(1, 0)), float(r.derivative(0, 1))
        s1, s2 = float(s.derivative(1, 0)), float(s.derivative(0, 1))
        low_x = {(W1, W1): r1, (W1, W2): 0.5 * (r2 + s1), (W2, W2): s2}
        low_y = {(W1, W1): -s1, (W1, W2): 0.5 * (r1 - s2), (W2, W2): r2}
        for pair in low_x:
            put(x_index(a), pair, eps * low_x[pair])
            put(y_index(a), pair, eps * low_y[pair])
            put(Z1, pair, -eps * rv * low_x[pair] + eps * sv * low_y[pair])
            put(Z2, pair, -eps * sv * low_x[pair] - eps * rv * low_y[pair])
    return out


def christoffel_closed_form_residual(spec: MetricSpec, point: Sequence[float]) -> float:
    gamma = christoffel(spec, point).components
    expected = np.zeros_like(gamma)
    for (k, i, j), value in christoffel_closed_form(spec, point).items():
        expected[k, i, j] = expected[k, j, i] = value
    return float(np.max(np.abs(gamma - expected)))


def christoffel_fd_residual(spec: MetricSpec, point: Sequence[float], step: float = DEFAULT_FD_STEP) -> float:
    gamma = christoffel(spec, point).components
    fd = christoffel_finite_difference(lambda p: metric_components(spec, p).components, point, step)
    return float(np.max(np.abs(gamma - fd)))
