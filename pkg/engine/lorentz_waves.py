"""
Plane waves in coordinates (u, v, x1, ..., xn):

  g = 2 du dv + x^T A(u) x du^2 + sum eps_a dxa^2

Every derivative array is analytic in x and comes from order-3 jets of the
profile in u, so the generic tensor pipeline applies unchanged.

Killing fields built from oscillator solutions f'' = eps A f,

  X_f = f_a d_xa - eps_a f'_a x^a d_v,

span a Heisenberg algebra with [X_f, X_h] = -W(f, h) d_v, W the symplectic
Wronskian sum eps_a (f_a h'_a - f'_a h_a).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from models.spec import MetricSpec, PlaneWaveSpec, ProfileKind, WaveProfile
from .errors import InvalidPointError
from .geometry import curvature_data, ricci_from, scalar_invariants_from
from .integrator import (
    DEFAULT_METHOD, DEFAULT_TOL, ComplexWaveGeometry, GeodesicState, Trajectory, integrate_geodesic,
)
from .jets import Jet2
from .metric_family import DEFAULT_RHO_MIN, make_point, metric_derivatives
from .tensors import MetricDerivatives, covariant_derivative

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
U_IDX, V_IDX = 0, 1


def wave_x_index(a: int) -> int:
    return 2 + a


def wave_labels(n: int) -> list[str]:
    return ["u", "v"] + [f"x{a}" for a in range(1, n + 1)]


# ---------------------------------------------------------------------------
# Profile and metric
# ---------------------------------------------------------------------------

def profile_jet(profile: WaveProfile, u: float) -> Jet2:
    """A(u) as an (n, n) jet in u (the first jet variable)."""
    uj = Jet2.lift((u, 0.0), 0)
    mats = [np.asarray(m, dtype=float) for m in profile.matrices]
    if profile.kind == "constant":
        return Jet2.constant(mats[0])
    if profile.kind == "scale_invariant":
        if u == 0.0:
            raise InvalidPointError("scale-invariant profile is singular at u = 0")
        scalar = (uj * uj).reciprocal()
        return Jet2(np.multiply.outer(mats[0], scalar.coeffs))
    coeffs = np.zeros(mats[0].shape + (uj.coeffs.shape[-1],))
    for k, m in enumerate(mats):
        coeffs = coeffs + np.multiply.outer(m, (uj ** k).coeffs)
    return Jet2(coeffs)


def profile_derivatives(spec: PlaneWaveSpec, u: float) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """(A, A', A'', A''') at u."""
    jet = profile_jet(spec.profile, u)
    return jet.value, jet.derivative(1, 0), jet.derivative(2, 0), jet.derivative(3, 0)


def plane_wave_metric(spec: PlaneWaveSpec, point: Sequence[float]) -> FloatArray:
    point = np.asarray(point, dtype=float)
    A = profile_derivatives(spec, point[U_IDX])[0]
    x = point[2:]
    g = np.zeros((spec.dim, spec.dim))
    g[U_IDX, V_IDX] = g[V_IDX, U_IDX] = 1.0
    g[U_IDX, U_IDX] = x @ A @ x
    for a, eps in enumerate(spec.signs):
        g[wave_x_index(a), wave_x_index(a)] = float(eps)
    return g


def wave_derivatives(spec: PlaneWaveSpec, point: Sequence[float]) -> MetricDerivatives:
    """g and its partials to order three; only the g_uu entry varies."""
    point = np.asarray(point, dtype=float)
    A, A1, A2, A3 = profile_derivatives(spec, point[U_IDX])
    x = point[2:]
    dim = spec.dim
    xs = [wave_x_index(a) for a in range(spec.n)]
    g = plane_wave_metric(spec, point)
    ginv = np.zeros((dim, dim))
    ginv[U_IDX, V_IDX] = ginv[V_IDX, U_IDX] = 1.0
    ginv[V_IDX, V_IDX] = -g[U_IDX, U_IDX]
    for a, eps in enumerate(spec.signs):
        ginv[xs[a], xs[a]] = float(eps)

    h1 = np.zeros(dim)
    h1[U_IDX] = x @ A1 @ x
    h1[xs] = 2.0 * A @ x

    h2 = np.zeros((dim, dim))
    h2[U_IDX, U_IDX] = x @ A2 @ x
    h2[U_IDX, xs] = h2[xs, U_IDX] = 2.0 * A1 @ x
    h2[np.ix_(xs, xs)] = 2.0 * A

    h3 = np.zeros((dim, dim, dim))
    h3[U_IDX, U_IDX, U_IDX] = x @ A3 @ x
    ux = 2.0 * A2 @ x
    h3[U_IDX, U_IDX, xs] = h3[U_IDX, xs, U_IDX] = h3[xs, U_IDX, U_IDX] = ux
    uxx = 2.0 * A1
    h3[np.ix_([U_IDX], xs, xs)] = uxx[None]
    h3[np.ix_(xs, [U_IDX], xs)] = uxx[:, None, :]
    h3[np.ix_(xs, xs, [U_IDX])] = uxx[:, :, None]

    dg = np.zeros((dim,) * 3)
    d2g = np.zeros((dim,) * 4)
    d3g = np.zeros((dim,) * 5)
    dg[..., U_IDX, U_IDX] = h1
    d2g[..., U_IDX, U_IDX] = h2
    d3g[..., U_IDX, U_IDX] = h3
    return MetricDerivatives(g=g, dg=dg, d2g=d2g, d3g=d3g, ginv=ginv)


class PlaneWaveGeometry:
    def __init__(self, spec: PlaneWaveSpec):
        self.spec = spec
        self.dim = spec.dim
        self.labels = wave_labels(spec.n)

    def metric_at(self, x: FloatArray) -> FloatArray:
        return plane_wave_metric(self.spec, x)

    def christoffel_at(self, x: FloatArray) -> FloatArray:
        md = wave_derivatives(self.spec, x)
        gamma_low = 0.5 * (
            np.einsum("mkn->kmn", md.dg) + np.einsum("nkm->kmn", md.dg) - md.dg
        )
        return np.einsum("lk,kmn->lmn", md.ginv, gamma_low)

    def guard(self, x: FloatArray) -> Optional[float]:
        if self.spec.profile.kind != "scale_invariant":
            return None
        return abs(float(x[U_IDX]))


def wave_geodesic(
    spec: PlaneWaveSpec,
    init: GeodesicState,
    t_end: float,
    tol: float = DEFAULT_TOL,
    rho_min: float = DEFAULT_RHO_MIN,
) -> Trajectory:
    return integrate_geodesic(PlaneWaveGeometry(spec), init, t_end, tol, rho_min)


# ---------------------------------------------------------------------------
# Killing fields
# ---------------------------------------------------------------------------

@dataclass
class KillingField:
    """A vector field given by its components and their Jacobian at a point."""

    name: str
    spec: PlaneWaveSpec
    oscillator: Optional[object] = None      # dense solution of (f, f') or None
    kind: str = "oscillator"

    def _f(self, u: float) -> tuple[FloatArray, FloatArray, FloatArray]:
        n = self.spec.n
        y = self.oscillator(u)
        f, fp = y[:n], y[n:]
        eps = np.asarray(self.spec.signs, dtype=float)
        A = profile_derivatives(self.spec, u)[0]
        return f, fp, eps * (A @ f)

    def vector(self, point: Sequence[float]) -> FloatArray:
        point = np.asarray(point, dtype=float)
        X = np.zeros(self.spec.dim)
        if self.kind == "d_u":
            X[U_IDX] = 1.0
        elif self.kind == "d_v":
            X[V_IDX] = 1.0
        elif self.kind == "dilation":
            X[U_IDX], X[V_IDX] = point[U_IDX], -point[V_IDX]
        else:
            f, fp, _ = self._f(point[U_IDX])
            eps = np.asarray(self.spec.signs, dtype=float)
            X[2:] = f
            X[V_IDX] = -np.sum(eps * fp * point[2:])
        return X

    def jacobian(self, point: Sequence[float]) -> FloatArray:
        """dX[a, c] = d_a X^c."""
        point = np.asarray(point, dtype=float)
        dim = self.spec.dim
        dX = np.zeros((dim, dim))
        if self.kind == "dilation":
            dX[U_IDX, U_IDX], dX[V_IDX, V_IDX] = 1.0, -1.0
        elif self.kind == "oscillator":
            f, fp, fpp = self._f(point[U_IDX])
            eps = np.asarray(self.spec.signs, dtype=float)
            x = point[2:]
            dX[U_IDX, 2:] = fp
            dX[U_IDX, V_IDX] = -np.sum(eps * fpp * x)
            dX[2:, V_IDX] = -eps * fp
        return dX

    def initial_data(self, u: float) -> tuple[FloatArray, FloatArray]:
        f, fp, _ = self._f(u)
        return f, fp


def _solve_oscillator(spec: PlaneWaveSpec, f0, fp0, u0: float, u_span: tuple[float, float], tol: float):
    """Dense solution of f'' = eps A(u) f on u_span, integrated both ways from u0."""
    n = spec.n
    eps = np.asarray(spec.signs, dtype=float)
    y0 = np.concatenate([f0, fp0])

    def rhs(u, y):
        A = profile_derivatives(spec, u)[0]
        return np.concatenate([y[n:], eps * (A @ y[:n])])

    def solve(u_end: float):
        if u_end == u0:
            return None
        return solve_ivp(rhs, (u0, u_end), y0, method=DEFAULT_METHOD, rtol=tol, atol=tol, dense_output=True).sol

    backward, forward = solve(u_span[0]), solve(u_span[1])

    def dense(u: float) -> FloatArray:
        if forward is None or (backward is not None and u < u0):
            return backward(u)
        return forward(u)

    return dense


def oscillator_killing_fields(
    spec: PlaneWaveSpec,
    u_span: tuple[float, float] = (0.5, 2.0),
    u0: Optional[float] = None,
    tol: float = 1e-11,
) -> list[KillingField]:
    """
    2n fields from f(u0) = e_i, f'(u0) = 0 and f(u0) = 0, f'(u0) = e_i.
    u0 defaults to the left end of u_span and must lie inside it.
    """
    lo, hi = u_span
    u0 = lo if u0 is None else float(u0)
    if not lo < hi:
        raise ValueError(f"empty u span {u_span}")
    if not lo <= u0 <= hi:
        raise ValueError(f"u0 = {u0} lies outside {u_span}")
    n = spec.n
    fields = []
    for i in range(n):
        e = np.eye(n)[i]
        fields.append(KillingField(f"P{i + 1}", spec, _solve_oscillator(spec, e, np.zeros(n), u0, u_span, tol)))
    for i in range(n):
        e = np.eye(n)[i]
        fields.append(KillingField(f"Q{i + 1}", spec, _solve_oscillator(spec, np.zeros(n), e, u0, u_span, tol)))
    return fields


def extra_killing_fields(spec: PlaneWaveSpec) -> list[KillingField]:
    fields = [KillingField("d_v", spec, kind="d_v")]
    if spec.profile.kind == "constant":
        fields.append(KillingField("d_u", spec, kind="d_u"))
    elif spec.profile.kind == "scale_invariant":
        fields.append(KillingField("dilation", spec, kind="dilation"))
    return fields


def killing_residual(spec: PlaneWaveSpec, field: KillingField, point: Sequence[float]) -> float:
    """max |L_X g| with (L_X g)_ab = X^c d_c g_ab + g_cb d_a X^c + g_ac d_b X^c."""
    md = wave_derivatives(spec, point)
    X = field.vector(point)
    dX = field.jacobian(point)
    lie = np.einsum("c,cab->ab", X, md.dg) + dX @ md.g + md.g @ dX.T
    return float(np.max(np.abs(lie)))


def lie_bracket(X: KillingField, Y: KillingField, point: Sequence[float]) -> FloatArray:
    """[X, Y]^c = X^a d_a Y^c - Y^a d_a X^c."""
    return X.vector(point) @ Y.jacobian(point) - Y.vector(point) @ X.jacobian(point)


def wronskian(spec: PlaneWaveSpec, F: KillingField, H: KillingField, u: float) -> float:
    eps = np.asarray(spec.signs, dtype=float)
    f, fp = F.initial_data(u)
    h, hp = H.initial_data(u)
    return float(np.sum(eps * (f * hp - fp * h)))


def heisenberg_table(
    spec: PlaneWaveSpec,
    points: Sequence[Sequence[float]],
    fields: Optional[list[KillingField]] = None,
) -> dict:
    """
    Brackets of the oscillator fields at each point against -W d_v, the
    Wronskian matrix and its constancy in u.
    """
    fields = fields or oscillator_killing_fields(spec)
    size = len(fields)
    dv = np.zeros(spec.dim)
    dv[V_IDX] = 1.0
    W_ref = np.array([[wronskian(spec, F, H, points[0][U_IDX]) for H in fields] for F in fields])
    bracket_residual = 0.0
    drift = 0.0
    for p in points:
        W = np.array([[wronskian(spec, F, H, p[U_IDX]) for H in fields] for F in fields])
        drift = max(drift, float(np.max(np.abs(W - W_ref))))
        for i in range(size):
            for j in range(size):
                br = lie_bracket(fields[i], fields[j], p)
                bracket_residual = max(bracket_residual, float(np.max(np.abs(br + W[i, j] * dv))))
    return {
        "labels": [f.name for f in fields],
        "wronskian": W_ref,
        "bracket_residual": bracket_residual,
        "wronskian_drift": drift,
        "antisymmetry": float(np.max(np.abs(W_ref + W_ref.T))),
        "rank": int(np.linalg.matrix_rank(W_ref)),
    }


# ---------------------------------------------------------------------------
# Curvature, symmetry and the singular homogeneous structure
# ---------------------------------------------------------------------------

def wave_curvature_and_symmetry(spec: PlaneWaveSpec, point: Sequence[float]) -> dict:
    """
    The only curvature is Rm[u, a, b, u] = g(R(d_u, d_a) d_b, d_u) = -A_ab; the wave is locally
    symmetric exactly when A is constant, and Ricci flat when tr(eps A) = 0.
    """
    md = wave_derivatives(spec, point)
    cd = curvature_data(md)
    A = profile_derivatives(spec, point[U_IDX])[0]
    expected = np.zeros_like(cd.Rm)
    for a in range(spec.n):
        for b in range(spec.n):
            xa, xb = wave_x_index(a), wave_x_index(b)
            value = -A[a, b]
            expected[U_IDX, xa, xb, U_IDX] = value
            expected[xa, U_IDX, U_IDX, xb] = value
            expected[U_IDX, xa, U_IDX, xb] = -value
            expected[xa, U_IDX, xb, U_IDX] = -value
    ric = ricci_from(cd)
    eps = np.asarray(spec.signs, dtype=float)
    expected_ric = np.zeros_like(ric)
    expected_ric[U_IDX, U_IDX] = -float(np.sum(eps * np.diag(A)))
    invariants = scalar_invariants_from(cd, 1)
    return {
        "curvature_residual": float(np.max(np.abs(cd.Rm - expected))),
        "ricci_residual": float(np.max(np.abs(ric - expected_ric))),
        "ricci_uu": float(ric[U_IDX, U_IDX]),
        "nabla_R": float(np.max(np.abs(cd.nabla_R))),
        "invariants": invariants,
    }


def ssi_structure_check(spec: PlaneWaveSpec, point: Sequence[float]) -> dict[str, float]:
    """
    Linear-type structure S_X Y = g(X, Y) xi - g(xi, Y) X with
    xi = -(1/u) d_v on a scale-invariant wave; residuals of nabla - S
    acting on g, R, S and xi.
    """
    if spec.profile.kind != "scale_invariant":
        raise ValueError("the singular homogeneous structure needs a scale-invariant profile")
    point = np.asarray(point, dtype=float)
    u = float(point[U_IDX])
    if u == 0.0:
        raise InvalidPointError("xi is undefined at u = 0")
    md = wave_derivatives(spec, point)
    cd = curvature_data(md)
    dim = spec.dim
    eye = np.eye(dim)
    xi = np.zeros(dim)
    xi[V_IDX] = -1.0 / u
    dxi = np.zeros((dim, dim))
    dxi[U_IDX, V_IDX] = 1.0 / u**2
    theta = md.g @ xi
    dtheta = np.einsum("ejk,k->ej", md.dg, xi) + dxi @ md.g
    S = np.einsum("ij,k->kij", md.g, xi) - np.einsum("j,ki->kij", theta, eye)
    dS = (
        np.einsum("eij,k->ekij", md.dg, xi)
        + np.einsum("ij,ek->ekij", md.g, dxi)
        - np.einsum("ej,ki->ekij", dtheta, eye)
    )
    gamma_t = cd.gamma - S

    def size(t: FloatArray) -> float:
        return float(np.max(np.abs(t)))

    return {
        "xi_null": abs(float(theta @ xi)),
        "nabla_g": size(covariant_derivative(md.g, md.dg, gamma_t, ("lower", "lower"))),
        "nabla_R": size(covariant_derivative(cd.Rm, cd.dRm, gamma_t, ("lower",) * 4)),
        "nabla_S": size(covariant_derivative(S, dS, gamma_t, ("upper", "lower", "lower"))),
        "nabla_xi": size(covariant_derivative(xi, dxi, gamma_t, ("upper",))),
    }


# ---------------------------------------------------------------------------
# Model space comparison
# ---------------------------------------------------------------------------

def _model_spaces() -> list[tuple[str, object]]:
    return [
        ("cahen_wallach", PlaneWaveSpec(
            n=2, profile=WaveProfile(kind="constant", matrices=(((1.0, 0.0), (0.0, -1.0)),)),
            name="cahen_wallach",
        )),
        ("singular_scale_invariant_wave", PlaneWaveSpec(
            n=2, profile=WaveProfile(kind="scale_invariant", matrices=(((2.0, 0.0), (0.0, -2.0)),)),
            name="singular_scale_invariant_wave",
        )),
        ("cw_analog_complex_wave", MetricSpec(
            n=0, profile=ProfileKind(variant="cw_analog", b0=4.0), name="cw_analog_complex_wave",
        )),
        ("singular_complex_wave", MetricSpec(
            n=0, profile=ProfileKind(variant="singular", b0=4.0), name="singular_complex_wave",
        )),
    ]


def comparison_table(tol: float = 1e-8, t_end: float = 2.0) -> list[dict]:
    """
    One row per model space with computed columns: locally symmetric,
    geodesic smoke run reaching t_end, Ricci flat and VSI.
    """
    rows = []
    for name, spec in _model_spaces():
        if isinstance(spec, PlaneWaveSpec):
            point = np.array([1.0, 0.3] + [0.5] * spec.n)
            cd = curvature_data(wave_derivatives(spec, point))
            provider = PlaneWaveGeometry(spec)
            profile = spec.profile.kind
        else:
            point = make_point(spec, 1.0, 0.0, [0.2] * (spec.dim - 2))
            cd = curvature_data(metric_derivatives(spec, point))
            provider = ComplexWaveGeometry(spec)
            profile = spec.profile.variant
        start = np.array(point, dtype=float)
        velocity = np.zeros(spec.dim)
        velocity[0] = -1.0
        trajectory = integrate_geodesic(provider, GeodesicState(start, velocity), t_end, tol)
        invariants = scalar_invariants_from(cd, 1)
        rows.append({
            "space": name,
            "profile": profile,
            "symmetric": bool(np.max(np.abs(cd.nabla_R)) < 1e-9),
            "complete_smoke": trajectory.flag == "completed",
            "ricci_flat": bool(np.max(np.abs(ricci_from(cd))) < 1e-9),
            "vsi": bool(max(abs(v) for v in invariants.values()) < 1e-9),
        })
    return rows
