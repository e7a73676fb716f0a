"""
The complex-wave metric family and its Cahen-Wallach analog.

Coordinates are ordered (w1, w2, z1, z2, x1, y1, ..., xn, yn). Every metric
coefficient depends only on (w1, w2), so the whole metric is one Jet2 of
shape (D, D) and all derivative arrays follow from it.

Profiles:
  singular   b = b0 / (4 rho^2)   (Laplacian b0 / rho^4)
  cw_analog  b = b0 rho^2 / 4     (Laplacian b0)
  flat       b = 0
plus Re of the harmonic_extra polynomial in every case. The metric entry
g_ww adds sum eps_a |h_a|^2 to the profile so the curvature stays
b0 / (2 rho^4) (or b0 / 2) whatever the couplings.
"""
import logging
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from models.spec import MetricConvention, MetricSpec
from .errors import InvalidPointError
from .jets import Jet2, complex_poly_eval, real_poly_eval
from .tensors import MetricDerivatives, TensorValue, embed_base_derivatives

logger = logging.getLogger(__name__)

W1, W2, Z1, Z2 = 0, 1, 2, 3
DEFAULT_RHO_MIN = 1e-6
DEFAULT_CONVENTION: MetricConvention = "full"


def x_index(a: int) -> int:
    """Coordinate index of x^a, a counted from 0."""
    return 4 + 2 * a


def y_index(a: int) -> int:
    return 5 + 2 * a


def coordinate_labels(n: int) -> list[str]:
    labels = ["w1", "w2", "z1", "z2"]
    for a in range(1, n + 1):
        labels += [f"x{a}", f"y{a}"]
    return labels


def make_point(spec: MetricSpec, w1: float, w2: float, rest: Optional[Sequence[float]] = None) -> NDArray[np.float64]:
    point = np.zeros(spec.dim)
    point[W1], point[W2] = w1, w2
    if rest is not None:
        point[2:] = rest
    return point


def random_point(
    spec: MetricSpec,
    rng: np.random.Generator,
    rho_range: tuple[float, float] = (0.5, 3.0),
) -> NDArray[np.float64]:
    """Sample with rho uniform in rho_range and the remaining coordinates in [-1, 1]."""
    rho = rng.uniform(*rho_range)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    rest = rng.uniform(-1.0, 1.0, size=spec.dim - 2)
    return make_point(spec, rho * np.cos(phi), rho * np.sin(phi), rest)


def _check_point(spec: MetricSpec, point: Sequence[float]) -> None:
    if len(point) != spec.dim:
        raise InvalidPointError(f"point has {len(point)} coordinates, expected {spec.dim}")
    if spec.profile.variant == "singular" and point[W1] == 0.0 and point[W2] == 0.0:
        raise InvalidPointError("w1 = w2 = 0 lies on the singular set")


# ---------------------------------------------------------------------------
# Profile and couplings
# ---------------------------------------------------------------------------

def walker_coefficient(spec: MetricSpec, point: Sequence[float]) -> Jet2:
    """The profile part of g_ww: canonical term plus Re of harmonic_extra."""
    _check_point(spec, point)
    w1 = Jet2.lift(point, 0)
    w2 = Jet2.lift(point, 1)
    rho2 = w1 * w1 + w2 * w2
    profile = spec.profile
    if profile.variant == "singular":
        b = rho2.reciprocal() * (profile.b0 / 4.0)
    elif profile.variant == "cw_analog":
        b = rho2 * (profile.b0 / 4.0)
    else:
        b = Jet2.constant(0.0)
    if profile.harmonic_extra:
        re, _ = complex_poly_eval(profile.harmonic_extra, point)
        b = b + re
    return b


def eval_profile_b(spec: MetricSpec, point: Sequence[float]) -> Jet2:
    """
    The coefficient g_ww = g_w1w1 = g_w2w2.

    The couplings shift the curvature by -2 sum eps_a |h_a'|^2, so g_ww carries
    sum eps_a |h_a|^2 on top of the profile and b - sum eps_a |h_a|^2 keeps the
    Laplacian of the profile.
    """
    b = walker_coefficient(spec, point)
    for (r, s), eps in zip(coupling_jets(spec, point), spec.epsilons):
        b = b + (r * r + s * s) * float(eps)
    return b


def laplacian_target(spec: MetricSpec, point: Sequence[float]) -> float:
    """Laplacian of the walker coefficient, twice R_w1w2w1w2 at the point."""
    rho2 = float(point[W1]) ** 2 + float(point[W2]) ** 2
    if spec.profile.variant == "singular":
        return spec.profile.b0 / rho2**2
    if spec.profile.variant == "cw_analog":
        return spec.profile.b0
    return 0.0


def coupling_jets(spec: MetricSpec, point: Sequence[float]) -> list[tuple[Jet2, Jet2]]:
    """(r_a, s_a) jets for every coupling."""
    out = []
    for coupling in spec.couplings:
        if coupling.is_split:
            out.append((real_poly_eval(coupling.r, point), real_poly_eval(coupling.s, point)))
        else:
            out.append(complex_poly_eval(coupling.coeffs, point))
    return out


def recurrence_form(point: Sequence[float]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    theta = -(w1 dw1 + w2 dw2) / rho^2 in the 2-dim base, with its partials.

    Returns (theta[2], dtheta[2, 2]) where dtheta[e, j] = d_e theta_j.
    """
    w1 = Jet2.lift(point, 0)
    w2 = Jet2.lift(point, 1)
    inv = (w1 * w1 + w2 * w2).reciprocal()
    t1 = -(w1 * inv)
    t2 = -(w2 * inv)
    theta = np.array([t1.value, t2.value], dtype=float)
    dtheta = np.array([
        [t1.derivative(1, 0), t2.derivative(1, 0)],
        [t1.derivative(0, 1), t2.derivative(0, 1)],
    ], dtype=float)
    return theta, dtheta


# ---------------------------------------------------------------------------
# Metric
# ---------------------------------------------------------------------------

def metric_jets(spec: MetricSpec, point: Sequence[float], convention: MetricConvention = DEFAULT_CONVENTION) -> Jet2:
    """
    The metric as a (D, D) jet.

    "full" stores the coefficient of each symmetric product as the matrix
    entry (g_w1z1 = 1); "half" stores half of it on both sides of the
    diagonal (g_w1z1 = 1/2).
    """
    b = eval_profile_b(spec, point)
    off = 1.0 if convention == "full" else 0.5
    entries: dict[tuple[int, int], object] = {
        (W1, W1): b,
        (W2, W2): b,
    }
    for i, j in ((W1, Z1), (W2, Z2)):
        entries[(i, j)] = entries[(j, i)] = off
    for a, ((r, s), eps) in enumerate(zip(coupling_jets(spec, point), spec.epsilons)):
        xa, ya = x_index(a), y_index(a)
        for (i, j), val in (
            ((xa, W1), r * off),
            ((ya, W2), r * off),
            ((xa, W2), s * off),
            ((ya, W1), -s * off),
        ):
            entries[(i, j)] = entries[(j, i)] = val
        entries[(xa, xa)] = float(eps)
        entries[(ya, ya)] = float(eps)
    return Jet2.from_entries((spec.dim, spec.dim), entries)


def metric_components(
    spec: MetricSpec,
    point: Sequence[float],
    convention: MetricConvention = DEFAULT_CONVENTION,
) -> TensorValue:
    return TensorValue(metric_jets(spec, point, convention).value, ("lower", "lower"))


def inverse_metric(spec: MetricSpec, point: Sequence[float]) -> TensorValue:
    """Closed-form inverse with B = -b + sum eps_a (r_a^2 + s_a^2)."""
    b = float(eval_profile_b(spec, point).value)
    ginv = np.zeros((spec.dim, spec.dim))
    big_b = -b
    for i, j in ((W1, Z1), (W2, Z2)):
        ginv[i, j] = ginv[j, i] = 1.0
    for a, ((r, s), eps) in enumerate(zip(coupling_jets(spec, point), spec.epsilons)):
        rv, sv = float(r.value), float(s.value)
        big_b += eps * (rv * rv + sv * sv)
        xa, ya = x_index(a), y_index(a)
        for (i, j), val in (
            ((Z1, xa), -eps * rv),
            ((Z1, ya), eps * sv),
            ((Z2, xa), -eps * sv),
            ((Z2, ya), -eps * rv),
        ):
            ginv[i, j] = ginv[j, i] = val
        ginv[xa, xa] = ginv[ya, ya] = float(eps)
    ginv[Z1, Z1] = ginv[Z2, Z2] = big_b
    return TensorValue(ginv, ("upper", "upper"))


def metric_derivatives(spec: MetricSpec, point: Sequence[float]) -> MetricDerivatives:
    g, dg, d2g, d3g = embed_base_derivatives(metric_jets(spec, point), spec.dim)
    return MetricDerivatives(g=g, dg=dg, d2g=d2g, d3g=d3g, ginv=inverse_metric(spec, point).components)


def metric_convention_resolution(spec: MetricSpec, point: Sequence[float]) -> dict:
    """
    Multiply each reading of the metric against the closed-form inverse.
    The convention whose product is the identity is the one the closed form
    belongs to.
    """
    ginv = inverse_metric(spec, point).components
    eye = np.eye(spec.dim)
    residuals = {}
    for convention in ("full", "half"):
        g = metric_jets(spec, point, convention).value
        residuals[convention] = float(np.max(np.abs(g @ ginv - eye)))
    chosen = min(residuals, key=residuals.get)
    logger.debug("Metric convention residuals %s -> %s", residuals, chosen)
    return {"residuals": residuals, "chosen": chosen}


def hermitian_form(spec: MetricSpec, point: Sequence[float]) -> NDArray[np.complex128]:
    """
    The metric in complex coordinates (w, z, z^a) as a Hermitian matrix h,
    with g = 2 Re h and g(X, JY) = 2 Im h on real vectors.
    """
    b = float(eval_profile_b(spec, point).value)
    size = spec.n + 2
    h = np.zeros((size, size), dtype=complex)
    h[0, 0] = b / 2.0
    h[0, 1] = h[1, 0] = 0.5
    for a, ((r, s), eps) in enumerate(zip(coupling_jets(spec, point), spec.epsilons)):
        ha = complex(float(r.value), -float(s.value))
        h[0, 2 + a] = ha / 2.0
        h[2 + a, 0] = ha.conjugate() / 2.0
        h[2 + a, 2 + a] = eps / 2.0
    return h


def real_to_complex(spec: MetricSpec, vector: Sequence[float]) -> NDArray[np.complex128]:
    """Complex coordinates (w, z, z^a) of a real tangent vector."""
    v = np.asarray(vector, dtype=float)
    out = np.empty(spec.n + 2, dtype=complex)
    out[0] = complex(v[W1], v[W2])
    out[1] = complex(v[Z1], v[Z2])
    for a in range(spec.n):
        out[2 + a] = complex(v[x_index(a)], v[y_index(a)])
    return out


def is_flat(spec: MetricSpec) -> bool:
    return spec.profile.b0 == 0.0


def hermitian_pairing(spec: MetricSpec, point: Sequence[float], X: Sequence[float], Y: Sequence[float]) -> complex:
    """h(X, Y) = X^T H conj(Y) for real tangent vectors X, Y."""
    H = hermitian_form(spec, point)
    return complex(real_to_complex(spec, X) @ H @ np.conj(real_to_complex(spec, Y)))
