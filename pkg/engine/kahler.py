"""
Complex structure, homogeneous structure tensor and the identities they satisfy.

Conventions:
  J[k, i]      J d_i = J[k, i] d_k
  omega[i, j]  g(d_i, J d_j)
  S[k, i, j]   (S_{d_i} d_j)^k, so the canonical connection has
               coefficients gamma - S

The structure tensor is

  S_X Y = g(X, Y) xi - g(Y, xi) X - g(X, JY) J xi + g(JY, xi) JX

with the null vector field xi = -(w1 d_z1 + w2 d_z2) / rho^2 and
theta = g(., xi).
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from models.spec import MetricSpec
from .errors import InvalidPointError
from .geometry import CurvatureData, curvature_data
from .jets import Jet2, cauchy_riemann_residual as _cr_residual
from .metric_family import W1, W2, Z1, Z2, coupling_jets, metric_derivatives, x_index, y_index
from .tensors import MetricDerivatives, covariant_derivative

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class ComplexStructureJ:
    matrix: FloatArray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def square_residual(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix + np.eye(self.dim))))

    def hermitian_residual(self, g: FloatArray) -> float:
        """max |g(J., J.) - g(., .)|."""
        return float(np.max(np.abs(self.matrix.T @ g @ self.matrix - g)))

    def kahler_form(self, g: FloatArray) -> FloatArray:
        return g @ self.matrix


def standard_J(n: int) -> ComplexStructureJ:
    if n < 0:
        raise ValueError("n must be >= 0")
    dim = 2 * n + 4
    J = np.zeros((dim, dim))
    pairs = [(W1, W2), (Z1, Z2)] + [(x_index(a), y_index(a)) for a in range(n)]
    for re, im in pairs:
        J[im, re] = 1.0
        J[re, im] = -1.0
    return ComplexStructureJ(J)


@dataclass(frozen=True)
class HomStructure:
    """xi, theta and S at one point, with first partials."""

    xi: FloatArray
    dxi: FloatArray          # dxi[e, k]
    theta: FloatArray
    dtheta: FloatArray       # dtheta[e, j]
    S: FloatArray
    dS: FloatArray           # dS[e, k, i, j]
    J: FloatArray

    @property
    def zeta(self) -> FloatArray:
        return np.zeros_like(self.xi)

    @property
    def theta_J(self) -> FloatArray:
        return self.theta @ self.J


# ---------------------------------------------------------------------------
# xi, theta and S
# ---------------------------------------------------------------------------

def _xi_jets(point: Sequence[float]) -> tuple[Jet2, Jet2]:
    if point[W1] == 0.0 and point[W2] == 0.0:
        raise InvalidPointError("xi is undefined at rho = 0")
    w1 = Jet2.lift(point, 0)
    w2 = Jet2.lift(point, 1)
    inv = (w1 * w1 + w2 * w2).reciprocal()
    return -(w1 * inv), -(w2 * inv)


def xi_and_theta(spec: MetricSpec, point: Sequence[float]) -> tuple[FloatArray, FloatArray]:
    xi1, xi2 = _xi_jets(point)
    xi = np.zeros(spec.dim)
    xi[Z1], xi[Z2] = xi1.value, xi2.value
    g = metric_derivatives(spec, point).g
    return xi, g @ xi


def _structure_tensor(g: FloatArray, dg: FloatArray, J: FloatArray, xi, dxi, theta, dtheta):
    dim = g.shape[0]
    eye = np.eye(dim)
    omega = g @ J
    d_omega = np.einsum("eim,mj->eij", dg, J)
    jxi = J @ xi
    djxi = dxi @ J.T
    theta_j = theta @ J
    dtheta_j = dtheta @ J

    S = (
        np.einsum("ij,k->kij", g, xi)
        - np.einsum("j,ki->kij", theta, eye)
        - np.einsum("ij,k->kij", omega, jxi)
        + np.einsum("j,ki->kij", theta_j, J)
    )
    dS = (
        np.einsum("eij,k->ekij", dg, xi)
        + np.einsum("ij,ek->ekij", g, dxi)
        - np.einsum("ej,ki->ekij", dtheta, eye)
        - np.einsum("eij,k->ekij", d_omega, jxi)
        - np.einsum("ij,ek->ekij", omega, djxi)
        + np.einsum("ej,ki->ekij", dtheta_j, J)
    )
    return S, dS


def hom_structure(spec: MetricSpec, point: Sequence[float], md: Optional[MetricDerivatives] = None) -> HomStructure:
    md = md or metric_derivatives(spec, point)
    dim = spec.dim
    xi1, xi2 = _xi_jets(point)
    xi = np.zeros(dim)
    dxi = np.zeros((dim, dim))
    xi[Z1], xi[Z2] = xi1.value, xi2.value
    dxi[:2, Z1] = xi1.gradient()
    dxi[:2, Z2] = xi2.gradient()
    theta = md.g @ xi
    dtheta = np.einsum("ejk,k->ej", md.dg, xi) + dxi @ md.g
    J = standard_J(spec.n).matrix
    S, dS = _structure_tensor(md.g, md.dg, J, xi, dxi, theta, dtheta)
    return HomStructure(xi=xi, dxi=dxi, theta=theta, dtheta=dtheta, S=S, dS=dS, J=J)


def build_S(spec: MetricSpec, point: Sequence[float]) -> FloatArray:
    return hom_structure(spec, point).S


def lower_S(S: FloatArray, g: FloatArray) -> FloatArray:
    """S_low[i, j, l] = g(S_{d_i} d_j, d_l)."""
    return np.einsum("lk,kij->ijl", g, S)


def s_antisymmetry_residual(S: FloatArray, g: FloatArray) -> float:
    low = lower_S(S, g)
    return float(np.max(np.abs(low + np.einsum("ilj->ijl", low))))


def isotropy_residuals(hs: HomStructure) -> dict[str, float]:
    return {
        "xi_null": abs(float(hs.theta @ hs.xi)),
        "theta_J_xi": abs(float(hs.theta_J @ hs.xi)),
        "zeta": float(np.max(np.abs(hs.zeta))),
    }


# ---------------------------------------------------------------------------
# Kahler form and Cauchy-Riemann
# ---------------------------------------------------------------------------

def kahler_form(spec: MetricSpec, point: Sequence[float]) -> FloatArray:
    g = metric_derivatives(spec, point).g
    return standard_J(spec.n).kahler_form(g)


def d_omega(spec: MetricSpec, point: Sequence[float]) -> FloatArray:
    """(d omega)[e, i, j] = d_e omega_ij + d_i omega_je + d_j omega_ei."""
    md = metric_derivatives(spec, point)
    J = standard_J(spec.n).matrix
    dw = np.einsum("eim,mj->eij", md.dg, J)
    return dw + np.einsum("ije->eij", dw) + np.einsum("jei->eij", dw)


def cauchy_riemann_residual(spec: MetricSpec, point: Sequence[float]) -> float:
    residuals = [_cr_residual(r, s) for r, s in coupling_jets(spec, point)]
    return max(residuals, default=0.0)


def class_residual(spec: MetricSpec, point: Sequence[float]) -> tuple[float, FloatArray, float]:
    """
    Residual of the lowered S against the strongly degenerate ansatz

      g(X,Y) t(Z) - g(X,Z) t(Y) + g(X,JY) t(JZ) - g(X,JZ) t(JY)

    with t read off S by trace(S_. Y) = -D t(Y). Returns the residual, the
    extracted form and its distance from theta.
    """
    md = metric_derivatives(spec, point)
    hs = hom_structure(spec, point, md)
    g = md.g
    low = lower_S(hs.S, g)
    theta_ext = -np.einsum("kkj->j", hs.S) / spec.dim
    theta_ext_j = theta_ext @ hs.J
    omega = g @ hs.J
    expected = (
        np.einsum("ij,l->ijl", g, theta_ext)
        - np.einsum("il,j->ijl", g, theta_ext)
        + np.einsum("ij,l->ijl", omega, theta_ext_j)
        - np.einsum("il,j->ijl", omega, theta_ext_j)
    )
    residual = float(np.max(np.abs(low - expected)))
    return residual, theta_ext, float(np.max(np.abs(theta_ext - hs.theta)))


# ---------------------------------------------------------------------------
# Canonical connection
# ---------------------------------------------------------------------------

def canonical_gamma(cd: CurvatureData, hs: HomStructure) -> FloatArray:
    return cd.gamma - hs.S


def ambrose_singer_residuals(spec: MetricSpec, point: Sequence[float]) -> dict[str, float]:
    """Residuals of the canonical connection acting on g, R, S, J, xi and theta."""
    md = metric_derivatives(spec, point)
    cd = curvature_data(md)
    hs = hom_structure(spec, point, md)
    gamma_t = canonical_gamma(cd, hs)
    dim = spec.dim

    def size(tensor: FloatArray) -> float:
        return float(np.max(np.abs(tensor)))

    return {
        "nabla_g": size(covariant_derivative(md.g, md.dg, gamma_t, ("lower", "lower"))),
        "nabla_R": size(covariant_derivative(cd.Rm, cd.dRm, gamma_t, ("lower",) * 4)),
        "nabla_S": size(covariant_derivative(hs.S, hs.dS, gamma_t, ("upper", "lower", "lower"))),
        "nabla_J": size(covariant_derivative(hs.J, np.zeros((dim, dim, dim)), gamma_t, ("upper", "lower"))),
        "nabla_xi": size(covariant_derivative(hs.xi, hs.dxi, gamma_t, ("upper",))),
        "nabla_theta": size(covariant_derivative(hs.theta, hs.dtheta, gamma_t, ("lower",))),
    }


def levi_civita_J_residual(spec: MetricSpec, point: Sequence[float]) -> float:
    """max |nabla J| for the Levi-Civita connection."""
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    J = standard_J(spec.n).matrix
    dim = spec.dim
    nabla_J = covariant_derivative(J, np.zeros((dim, dim, dim)), cd.gamma, ("upper", "lower"))
    return float(np.max(np.abs(nabla_J)))


# ---------------------------------------------------------------------------
# Recurrence identities
# ---------------------------------------------------------------------------

def _cyclic_wedge(form: FloatArray, Rm: FloatArray) -> FloatArray:
    t = np.einsum("x,yzcd->xyzcd", form, Rm)
    return t + np.einsum("zxycd->xyzcd", t) + np.einsum("yzxcd->xyzcd", t)


def lemma_identities(spec: MetricSpec, point: Sequence[float]) -> dict[str, float]:
    """
    theta parallel up to its quadratic terms, the cyclic theta ^ R identities,
    recurrence of R with factor 4 and closedness of theta.
    """
    md = metric_derivatives(spec, point)
    cd = curvature_data(md)
    hs = hom_structure(spec, point, md)
    theta, theta_j = hs.theta, hs.theta_J
    nabla_theta = covariant_derivative(theta, hs.dtheta, cd.gamma, ("lower",))
    quadratic = np.outer(theta, theta) - np.outer(theta_j, theta_j)
    recurrence = cd.nabla_R - 4.0 * np.einsum("e,abcd->eabcd", theta, cd.Rm)

    def size(tensor: FloatArray) -> float:
        return float(np.max(np.abs(tensor)))

    return {
        "nabla_theta_quadratic": size(nabla_theta - quadratic),
        "theta_wedge_R": size(_cyclic_wedge(theta, cd.Rm)),
        "theta_J_wedge_R": size(_cyclic_wedge(theta_j, cd.Rm)),
        "recurrence": size(recurrence),
        "d_theta": size(hs.dtheta - hs.dtheta.T),
    }


# ---------------------------------------------------------------------------
# Walker distribution
# ---------------------------------------------------------------------------

def walker_residual(spec: MetricSpec, point: Sequence[float]) -> float:
    """Null and parallel defect of span{d_z1, d_z2}."""
    cd = curvature_data(metric_derivatives(spec, point), with_derivative=False)
    z = [Z1, Z2]
    others = [k for k in range(spec.dim) if k not in z]
    gram = cd.g[np.ix_(z, z)]
    leak = cd.gamma[np.ix_(others, range(spec.dim), z)]
    return max(float(np.max(np.abs(gram))), float(np.max(np.abs(leak))) if leak.size else 0.0)


def walker_check(spec: MetricSpec, points: Iterable[Sequence[float]], tol: float = 1e-11) -> bool:
    worst = max((walker_residual(spec, p) for p in points), default=0.0)
    logger.debug("Walker residual %.3e", worst)
    return worst <= tol
