"""
The transvection algebra g = T_pM + hol of the singular complex wave at the
reference point p = (1, 0, ...), with b_p = b(p) and b0 the profile constant.

Basis order is [A, w1, w2, z1, z2, x1, y1, ..., xn, yn] and B = z2 - A.
Structure constants are exact sympy Rationals; float inputs are read through
their decimal string so 0.1 stays 1/10.

Brackets (everything not listed vanishes):

  [A, w1] = z2          [A, w2] = -z1
  [z1, w1] = z1         [z1, w2] = -z2 + 2A
  [z2, w1] = 3 z2 - 2A  [z2, w2] = -z1
  [w1, w2] = -2 b_p z2 + (2 b_p - b0 / 2) A
  [xa, ya] = -2 eps_a B
  [w1, xa] = -xa   [w1, ya] = -ya   [w2, xa] = -ya   [w2, ya] = xa
"""
import copy
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
import sympy
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from models.spec import MetricSpec
from .errors import DegenerateBasis
from .geometry import curvature_data
from .integrator import DEFAULT_METHOD, TrajectoryFlag
from .kahler import hom_structure
from .metric_family import W1, W2, Z1, Z2, laplacian_target, metric_derivatives
from .tensors import endomorphism_from_curvature

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
Number = Union[int, float, str, Fraction, sympy.Rational]

A_IDX, W1_IDX, W2_IDX, Z1_IDX, Z2_IDX = 0, 1, 2, 3, 4
BLOWUP_THRESHOLD = 1e8
DEFAULT_FLOAT_TOL = 1e-10


def exact(value: Number) -> sympy.Rational:
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return sympy.Rational(repr(value))
    return sympy.Rational(value)


def algebra_labels(n: int) -> list[str]:
    labels = ["A", "w1", "w2", "z1", "z2"]
    for a in range(1, n + 1):
        labels += [f"x{a}", f"y{a}"]
    return labels


def _x(a: int) -> int:
    return 5 + 2 * a


def _y(a: int) -> int:
    return 6 + 2 * a


@dataclass
class LieAlgebraG:
    """Finite-dimensional Lie algebra given by exact structure constants."""

    n: int
    b_p: sympy.Rational
    b0: sympy.Rational
    epsilons: tuple[int, ...]
    labels: list[str]
    # brackets[(i, j)] = {k: c^k_ij}, stored for i < j only
    brackets: dict[tuple[int, int], dict[int, sympy.Rational]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def lam(self) -> sympy.Rational:
        return 2 * self.b_p

    @property
    def mu(self) -> sympy.Rational:
        return self.b0 / 2

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis element {label!r}; expected one of {self.labels}")

    def set_bracket(self, i: int, j: int, value: dict[int, Number]) -> None:
        if i == j:
            raise ValueError("[e_i, e_i] is always zero")
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        cleaned = {k: sign * exact(c) for k, c in value.items() if exact(c) != 0}
        if cleaned:
            self.brackets[(i, j)] = cleaned
        else:
            self.brackets.pop((i, j), None)

    def structure(self, i: int, j: int) -> dict[int, sympy.Rational]:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def constant(self, i: int, j: int, k: int) -> sympy.Rational:
        return self.structure(i, j).get(k, sympy.Integer(0))

    def bracket(self, u: sympy.Matrix, v: sympy.Matrix) -> sympy.Matrix:
        out = sympy.zeros(self.dim, 1)
        for i in range(self.dim):
            if u[i] == 0:
                continue
            for j in range(self.dim):
                if v[j] == 0 or i == j:
                    continue
                for k, c in self.structure(i, j).items():
                    out[k] += u[i] * v[j] * c
        return out

    def basis_vector(self, i: int) -> sympy.Matrix:
        e = sympy.zeros(self.dim, 1)
        e[i] = 1
        return e

    def ad(self, u: sympy.Matrix) -> sympy.Matrix:
        return sympy.Matrix.hstack(*[self.bracket(u, self.basis_vector(j)) for j in range(self.dim)])

    def as_array(self) -> FloatArray:
        """c[k, i, j] as floats."""
        c = np.zeros((self.dim,) * 3)
        for (i, j), terms in self.brackets.items():
            for k, value in terms.items():
                c[k, i, j] = float(value)
                c[k, j, i] = -float(value)
        return c


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def build_algebra(
    n: int,
    b_p: Number,
    b0: Number,
    epsilons: Optional[Sequence[int]] = None,
) -> LieAlgebraG:
    b_p, b0 = exact(b_p), exact(b0)
    epsilons = tuple(epsilons) if epsilons is not None else (1,) * n
    if len(epsilons) != n:
        raise ValueError(f"expected {n} signs, got {len(epsilons)}")
    alg = LieAlgebraG(n=n, b_p=b_p, b0=b0, epsilons=epsilons, labels=algebra_labels(n))
    A, w1, w2, z1, z2 = A_IDX, W1_IDX, W2_IDX, Z1_IDX, Z2_IDX
    table = {
        (A, w1): {z2: 1},
        (A, w2): {z1: -1},
        (z1, w1): {z1: 1},
        (z1, w2): {z2: -1, A: 2},
        (z2, w1): {z2: 3, A: -2},
        (z2, w2): {z1: -1},
        (w1, w2): {z2: -2 * b_p, A: 2 * b_p - b0 / 2},
    }
    for a, eps in enumerate(epsilons):
        xa, ya = _x(a), _y(a)
        table[(xa, ya)] = {z2: -2 * eps, A: 2 * eps}
        table[(w1, xa)] = {xa: -1}
        table[(w1, ya)] = {ya: -1}
        table[(w2, xa)] = {ya: -1}
        table[(w2, ya)] = {xa: 1}
    for (i, j), value in table.items():
        alg.set_bracket(i, j, value)
    return alg


def mutate_bracket(alg: LieAlgebraG, i: Union[int, str], j: Union[int, str], k: Union[int, str]) -> LieAlgebraG:
    """Copy of alg with the sign of the single constant c^k_ij flipped."""
    i, j, k = (alg.index(x) if isinstance(x, str) else x for x in (i, j, k))
    out = copy.deepcopy(alg)
    terms = out.structure(i, j)
    if terms.get(k, 0) == 0:
        raise ValueError(f"c^{alg.labels[k]}_({alg.labels[i]},{alg.labels[j]}) is zero; flipping it changes nothing")
    terms[k] = -terms[k]
    out.set_bracket(i, j, terms)
    logger.info("Mutated [%s, %s] at %s", alg.labels[i], alg.labels[j], alg.labels[k])
    return out


def jacobi_residual(alg: LieAlgebraG) -> sympy.Rational:
    """Largest |cyclic sum| over all basis triples, computed exactly."""
    worst = sympy.Integer(0)
    dim = alg.dim
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                total: dict[int, sympy.Rational] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, coeff in alg.structure(a, b).items():
                        for l, inner in alg.structure(m, c).items():
                            total[l] = total.get(l, 0) + coeff * inner
                for value in total.values():
                    worst = max(worst, abs(value))
    return worst


def jacobi_check(alg: LieAlgebraG) -> float:
    return float(jacobi_residual(alg))


def jacobi_residual_float(c: FloatArray) -> float:
    cyclic = (
        np.einsum("mij,lmk->lijk", c, c)
        + np.einsum("mjk,lmi->lijk", c, c)
        + np.einsum("mki,lmj->lijk", c, c)
    )
    return float(np.max(np.abs(cyclic)))


# ---------------------------------------------------------------------------
# Structure diagnostics
# ---------------------------------------------------------------------------

def _span(vectors: Sequence[sympy.Matrix], dim: int) -> sympy.Matrix:
    if not vectors:
        return sympy.zeros(dim, 0)
    cols = sympy.Matrix.hstack(*vectors).columnspace()
    return sympy.Matrix.hstack(*cols) if cols else sympy.zeros(dim, 0)


def _bracket_space(alg: LieAlgebraG, U: sympy.Matrix, V: sympy.Matrix) -> sympy.Matrix:
    out = [alg.bracket(U[:, a], V[:, b]) for a in range(U.cols) for b in range(V.cols)]
    return _span([v for v in out if any(x != 0 for x in v)], alg.dim)


def _contains(space: sympy.Matrix, vectors: sympy.Matrix) -> bool:
    if vectors.cols == 0:
        return True
    if space.cols == 0:
        return all(x == 0 for x in vectors)
    return sympy.Matrix.hstack(space, vectors).rank() == space.rank()


def derived_series(alg: LieAlgebraG) -> list[int]:
    current = sympy.eye(alg.dim)
    dims = [alg.dim]
    while current.cols:
        nxt = _bracket_space(alg, current, current)
        if nxt.cols == current.cols:
            break
        dims.append(nxt.cols)
        current = nxt
    return dims


def lower_central_series(alg: LieAlgebraG) -> list[int]:
    whole = sympy.eye(alg.dim)
    current = whole
    dims = [alg.dim]
    while current.cols:
        nxt = _bracket_space(alg, whole, current)
        if nxt.cols == current.cols:
            break
        dims.append(nxt.cols)
        current = nxt
    return dims


def nilradical_basis(alg: LieAlgebraG) -> sympy.Matrix:
    """span{A, z1, z2, xa, ya}."""
    keep = [i for i in range(alg.dim) if i not in (W1_IDX, W2_IDX)]
    return sympy.Matrix.hstack(*[alg.basis_vector(i) for i in keep])


def heisenberg_basis(alg: LieAlgebraG) -> sympy.Matrix:
    B = alg.basis_vector(Z2_IDX) - alg.basis_vector(A_IDX)
    rest = [alg.basis_vector(i) for i in range(5, alg.dim)]
    return sympy.Matrix.hstack(B, *rest)


def _nilpotent_w_directions(alg: LieAlgebraG) -> list[dict]:
    """
    Real (alpha, beta) for which ad(alpha w1 + beta w2) is nilpotent. In a
    solvable algebra the diagonal of ad is blind to the nilradical part, so
    the nilradical is maximal exactly when only (0, 0) remains.
    """
    alpha, beta, lam = sympy.symbols("alpha beta lam", real=True)
    u = alpha * alg.basis_vector(W1_IDX) + beta * alg.basis_vector(W2_IDX)
    M = alg.ad(u)
    poly = sympy.Poly(sympy.expand(M.charpoly(lam).as_expr() - lam**alg.dim), lam)
    equations = [c for c in poly.all_coeffs() if c != 0]
    if not equations:
        return [{"alpha": None, "beta": None}]
    solutions = sympy.solve(equations, [alpha, beta], dict=True)
    return [{str(k): str(v) for k, v in sol.items()} for sol in solutions]


def structure_diagnostics(alg: LieAlgebraG) -> dict:
    derived = derived_series(alg)
    lower = lower_central_series(alg)
    dim = alg.dim
    whole = sympy.eye(dim)
    nil = nilradical_basis(alg)
    nn = _bracket_space(alg, nil, nil)
    heis = heisenberg_basis(alg)
    heis_center = heis[:, :1]

    is_ideal = _contains(nil, _bracket_space(alg, whole, nil))
    two_step = _bracket_space(alg, nil, nn).cols == 0
    contains_derived = _contains(nil, _bracket_space(alg, whole, whole))
    heisenberg_ok = _contains(heis_center, _bracket_space(alg, heis, heis)) and \
        _bracket_space(alg, heis_center, heis).cols == 0
    w_directions = _nilpotent_w_directions(alg)
    maximal = w_directions == [{"alpha": "0", "beta": "0"}] or w_directions == []

    return {
        "dim": dim,
        "derived_series": derived,
        "solvable": derived[-1] == 0,
        "derived_length": len(derived) - 1 if derived[-1] == 0 else None,
        "lower_central_series": lower,
        "nilpotent": lower[-1] == 0,
        "nilradical_dim": nil.cols,
        "nilradical_is_ideal": is_ideal,
        "nilradical_two_step": two_step,
        "nilradical_contains_derived": contains_derived,
        "nilradical_maximal": maximal,
        "heisenberg_dim": heis.cols,
        "heisenberg": heisenberg_ok,
    }


def export_algebra(alg: LieAlgebraG) -> dict:
    rows = []
    for (i, j) in sorted(alg.brackets):
        for k, value in sorted(alg.brackets[(i, j)].items()):
            rows.append({"i": alg.labels[i], "j": alg.labels[j], "k": alg.labels[k], "c": str(value)})
    return {
        "basis": list(alg.labels),
        "parameters": {"n": alg.n, "b_p": str(alg.b_p), "b0": str(alg.b0), "epsilons": list(alg.epsilons)},
        "brackets": rows,
    }


# ---------------------------------------------------------------------------
# Canonical connection curvature
# ---------------------------------------------------------------------------

@dataclass
class CanonicalCurvature:
    R: FloatArray              # R[a, b] as endomorphisms
    RS: FloatArray
    RS_predicted: FloatArray
    R_tilde: FloatArray
    R_tilde_predicted: FloatArray
    A_hat: FloatArray

    def residuals(self) -> dict[str, float]:
        return {
            "RS": float(np.max(np.abs(self.RS - self.RS_predicted))),
            "R_tilde": float(np.max(np.abs(self.R_tilde - self.R_tilde_predicted))),
        }

    def coefficients(self) -> FloatArray:
        """kappa[a, b] with R_tilde[a, b] = kappa[a, b] A_hat."""
        norm = float(np.sum(self.A_hat * self.A_hat))
        return np.einsum("abkc,kc->ab", self.R_tilde, self.A_hat) / norm


def canonical_curvature(spec: MetricSpec, point: Sequence[float]) -> CanonicalCurvature:
    """
    Curvature of the canonical connection, R_tilde = R - R^S with
    R^S_ab = [S_a, S_b] - S_{S_ab - S_ba}. R^S is checked against
    -2 omega (x) A_hat where A_hat Z = g(xi, JZ) xi + g(Z, xi) J xi.
    """
    md = metric_derivatives(spec, point)
    cd = curvature_data(md, with_derivative=False)
    hs = hom_structure(spec, point, md)
    S, J, g = hs.S, hs.J, md.g
    dim = spec.dim

    R = endomorphism_from_curvature(cd.Rm, cd.ginv)
    mats = np.moveaxis(S, 1, 0)                      # mats[a] = matrix of S_{d_a}
    commutators = np.einsum("akm,bmc->abkc", mats, mats) - np.einsum("bkm,amc->abkc", mats, mats)
    torsion = np.einsum("mab->abm", S) - np.einsum("mba->abm", S)
    RS = commutators - np.einsum("abm,mkc->abkc", torsion, mats)

    omega = g @ J
    A_hat = np.outer(hs.xi, hs.theta_J) + np.outer(J @ hs.xi, hs.theta)
    RS_predicted = -2.0 * np.einsum("ab,kc->abkc", omega, A_hat)
    R_tilde = R - RS

    laplacian = laplacian_target(spec, point)
    dw = np.zeros((dim, dim))
    dw[W1, W2], dw[W2, W1] = 1.0, -1.0
    A_std = np.zeros((dim, dim))
    A_std[Z2, W1], A_std[Z1, W2] = 1.0, -1.0
    R_tilde_predicted = 0.5 * laplacian * np.einsum("ab,kc->abkc", dw, A_std) + 2.0 * np.einsum(
        "ab,kc->abkc", omega, A_hat
    )
    return CanonicalCurvature(R, RS, RS_predicted, R_tilde, R_tilde_predicted, A_hat)


# ---------------------------------------------------------------------------
# The algebra recomputed from the geometry
# ---------------------------------------------------------------------------

@dataclass
class DerivedAlgebra:
    labels: list[str]
    constants: FloatArray            # c[k, i, j]
    hol_residual: float              # how far R_tilde is from the A_hat line

    def compare(self, alg: LieAlgebraG, tol: float = DEFAULT_FLOAT_TOL) -> list[dict]:
        """Per-pair differences against an exact algebra, mismatches only."""
        expected = alg.as_array()
        out = []
        for i in range(len(self.labels)):
            for j in range(i + 1, len(self.labels)):
                diff = self.constants[:, i, j] - expected[:, i, j]
                if np.max(np.abs(diff)) > tol:
                    out.append({
                        "pair": f"[{self.labels[i]},{self.labels[j]}]",
                        "derived": self.constants[:, i, j].tolist(),
                        "table": expected[:, i, j].tolist(),
                    })
        return out

    def jacobi(self) -> float:
        return jacobi_residual_float(self.constants)


def derive_algebra(spec: MetricSpec, point: Optional[Sequence[float]] = None) -> DerivedAlgebra:
    """
    Brackets from the structure tensor and the canonical curvature at p:
    [e, f] = S_e f - S_f e - R_tilde_ef and [A, e] = A_hat e, where R_tilde
    acts through its multiple of A_hat. Couplings are expected to vanish at p.
    """
    if point is None:
        point = np.zeros(spec.dim)
        point[W1] = 1.0
    cc = canonical_curvature(spec, point)
    hs = hom_structure(spec, point)
    dim = spec.dim
    size = dim + 1
    kappa = cc.coefficients()
    hol_residual = float(np.max(np.abs(cc.R_tilde - np.einsum("ab,kc->abkc", kappa, cc.A_hat))))

    c = np.zeros((size,) * 3)
    for i in range(dim):
        for j in range(dim):
            c[1:, i + 1, j + 1] = hs.S[:, i, j] - hs.S[:, j, i]
            c[0, i + 1, j + 1] = -kappa[i, j]
        c[1:, 0, i + 1] = cc.A_hat[:, i]
        c[1:, i + 1, 0] = -cc.A_hat[:, i]
    return DerivedAlgebra(labels=algebra_labels(spec.n), constants=c, hol_residual=hol_residual)


# ---------------------------------------------------------------------------
# K subalgebra and its geodesics
# ---------------------------------------------------------------------------

def _algebra_metric(alg: LieAlgebraG) -> FloatArray:
    """The metric at p on the T_pM part of g; A is left out of the inner product."""
    dim = alg.dim
    G = np.zeros((dim, dim))
    b = float(alg.b_p)
    G[W1_IDX, W1_IDX] = G[W2_IDX, W2_IDX] = b
    G[W1_IDX, Z1_IDX] = G[Z1_IDX, W1_IDX] = 1.0
    G[W2_IDX, Z2_IDX] = G[Z2_IDX, W2_IDX] = 1.0
    for a, eps in enumerate(alg.epsilons):
        G[_x(a), _x(a)] = G[_y(a), _y(a)] = float(eps)
    return G


@dataclass
class KSubalgebra:
    k: float
    sign: int
    U: FloatArray
    V: FloatArray
    gram: FloatArray
    bracket_coords: FloatArray       # [U, V] in (U, V) coordinates
    connection: FloatArray           # nabla[i, j] = coords of nabla_{e_i} e_j
    closure_residual: float

    def checks(self) -> dict[str, float]:
        s, k = self.sign, self.k
        gram_expected = np.diag([s, -s])
        bracket_expected = np.array([1.0 / k, -1.0 / k])
        nabla_expected = np.array([
            [[0.0, 1.0 / k], [1.0 / k, 0.0]],
            [[0.0, 1.0 / k], [1.0 / k, 0.0]],
        ])
        # nabla_UU = V/k, nabla_UV = U/k, nabla_VU = V/k, nabla_VV = U/k
        return {
            "closure": self.closure_residual,
            "gram": float(np.max(np.abs(self.gram - gram_expected))),
            "bracket": float(np.max(np.abs(self.bracket_coords - bracket_expected))),
            "connection": float(np.max(np.abs(self.connection - nabla_expected))),
        }


def k_subalgebra(alg: LieAlgebraG) -> KSubalgebra:
    """
    U = w1 / k, V = U - s k z1 with k = sqrt|b_p| and s its sign; the
    Levi-Civita connection of the left-invariant metric comes from the
    Koszul formula 2<nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>.
    """
    b = float(alg.b_p)
    if b == 0.0:
        raise DegenerateBasis("b_p = 0 gives no K subalgebra")
    k = float(np.sqrt(abs(b)))
    s = 1 if b > 0 else -1
    dim = alg.dim
    U = np.zeros(dim)
    U[W1_IDX] = 1.0 / k
    V = U.copy()
    V[Z1_IDX] = -s * k
    basis = np.stack([U, V], axis=1)
    c = alg.as_array()
    G = _algebra_metric(alg)

    def bracket(x, y):
        return np.einsum("kij,i,j->k", c, x, y)

    uv = bracket(U, V)
    coords, *_ = np.linalg.lstsq(basis, uv, rcond=None)
    closure = float(np.max(np.abs(basis @ coords - uv)))
    gram = basis.T @ G @ basis

    # brackets of the basis (U, V) in its own coordinates
    br = np.zeros((2, 2, 2))
    br[0, 1], br[1, 0] = coords, -coords
    eye = np.eye(2)

    def inner(a, b):
        return float(a @ gram @ b)

    koszul = np.zeros((2, 2, 2))
    for i in range(2):
        for j in range(2):
            for l in range(2):
                koszul[i, j, l] = 0.5 * (
                    inner(br[i, j], eye[l]) - inner(br[j, l], eye[i]) + inner(br[l, i], eye[j])
                )
    nabla = np.einsum("ml,ijl->ijm", np.linalg.inv(gram), koszul)
    logger.debug("K subalgebra for b_p=%s: [U,V]=%s", alg.b_p, coords)
    return KSubalgebra(k=k, sign=s, U=U, V=V, gram=gram, bracket_coords=coords, connection=nabla, closure_residual=closure)


@dataclass
class KGeodesic:
    t: FloatArray
    u: FloatArray
    v: FloatArray
    c: Optional[float]
    flag: TrajectoryFlag
    event_t: Optional[float] = None

    @property
    def x(self) -> FloatArray:
        return self.u + self.v

    @property
    def y(self) -> FloatArray:
        return self.u - self.v

    def closed_form(self, k: float) -> tuple[FloatArray, FloatArray]:
        """x = k / (t - c), y = y0 (1 - t / c); x stays 0 when it starts at 0."""
        y0 = self.y[0]
        if self.c is None:
            return np.zeros_like(self.t), np.full_like(self.t, y0)
        return k / (self.t - self.c), y0 * (1.0 - self.t / self.c)

    def fit_report(self, k: float, fraction: float = 0.9) -> dict[str, float]:
        """Worst relative errors over the first `fraction` of the interval before blow-up."""
        x_pred, y_pred = self.closed_form(k)
        horizon = self.t[-1] if self.event_t is None else self.event_t
        mask = np.abs(self.t) <= fraction * abs(horizon)
        if not mask.any():
            mask = np.ones_like(self.t, dtype=bool)

        def rel(actual, predicted):
            scale = np.maximum(np.abs(predicted), 1.0)
            return float(np.max(np.abs(actual - predicted) / scale))

        return {"x": rel(self.x[mask], x_pred[mask]), "y": rel(self.y[mask], y_pred[mask])}


def k_geodesic(
    b_p: float,
    init: tuple[float, float],
    t_end: float,
    tol: float = 1e-10,
) -> KGeodesic:
    """
    Integrate u' + (uv + v^2) / k = 0, v' + (uv + u^2) / k = 0, k = sqrt|b_p|,
    flagging BlowUp when |u + v| passes the blow-up threshold.
    """
    if b_p == 0:
        raise DegenerateBasis("b_p = 0 gives no K subalgebra")
    k = float(np.sqrt(abs(float(b_p))))
    u0, v0 = float(init[0]), float(init[1])

    def rhs(_t, y):
        u, v = y
        return [-(u * v + v * v) / k, -(u * v + u * u) / k]

    def escape(_t, y):
        return BLOWUP_THRESHOLD - abs(y[0] + y[1])
    escape.terminal = True

    sol = solve_ivp(rhs, (0.0, t_end), [u0, v0], method=DEFAULT_METHOD, rtol=tol, atol=tol, events=[escape])
    flag: TrajectoryFlag = "completed"
    event_t = None
    if sol.status == -1:
        flag = "StepUnderflow"
    elif sol.status == 1 and len(sol.t_events[0]):
        flag, event_t = "BlowUp", float(sol.t_events[0][0])
        logger.info("K geodesic blows up at t=%.9g", event_t)
    x0 = u0 + v0
    c = -k / x0 if x0 != 0.0 else None
    return KGeodesic(t=sol.t, u=sol.y[0], v=sol.y[1], c=c, flag=flag, event_t=event_t)


# ---------------------------------------------------------------------------
# Matrix representation
# ---------------------------------------------------------------------------

def matrix_rep(alg: LieAlgebraG, coords: Sequence[float]) -> NDArray[np.complex128]:
    """
    The tabulated upper-triangular complex matrix for the element with
    coordinates (t, w1, w2, z1, z2, x1, y1, ...) in the algebra basis.
    Includes the constant entry of the table, so it is affine in coords.
    """
    n = alg.n
    size = 2 * n + 5
    lam, mu = float(alg.lam), float(alg.mu)
    t, w1, w2, z1, z2 = (float(v) for v in coords[:5])
    xs = [float(coords[_x(a)]) for a in range(n)]
    ys = [float(coords[_y(a)]) for a in range(n)]
    M = np.zeros((size, size), dtype=complex)
    pen, last = size - 2, size - 1

    M[0, 0] = -2 * w1
    M[0, 1] = M[0, 2] = 2 * w2 + 2j * w1
    for a in range(n):
        M[0, 3 + 2 * a] = -4j * ys[a]
        M[0, 4 + 2 * a] = -4j * xs[a]
    M[0, pen] = 2 * t + (lam - mu) * w2 + 2j * (z1 - z2)
    M[0, last] = -4 + (mu - lam) * w1

    M[1, 1] = -w1 + 1j * w2
    M[1, pen] = z1 - 0.5j * mu * w2
    M[1, last] = 0.5j * mu * w1

    M[2, 2] = -w1 - 1j * w2
    M[2, pen] = z2 - 0.5j * mu * w2
    M[2, last] = z1 + 1j * z2 - 0.5j * mu * w1

    for a in range(n):
        rx, ry = 3 + 2 * a, 4 + 2 * a
        M[rx, rx] = -w1 + 1j * w2
        M[rx, pen] = xs[a]
        M[rx, last] = -1j * xs[a]
        M[ry, ry] = -w1 + 1j * w2
        M[ry, pen] = ys[a]
        M[ry, last] = 1j * ys[a]
    return M


def matrix_rep_linear(alg: LieAlgebraG, coords: Sequence[float]) -> NDArray[np.complex128]:
    return matrix_rep(alg, coords) - matrix_rep(alg, np.zeros(alg.dim))


def matrix_rep_check(alg: LieAlgebraG, tol: float = 1e-9, seed: int = 0) -> dict:
    """
    Compare commutators of the tabulated matrices with the bracket table.
    Reports matches and mismatches; nothing here is asserted.
    """
    dim = alg.dim
    images = [matrix_rep_linear(alg, np.eye(dim)[i]) for i in range(dim)]
    c = alg.as_array()
    rng = np.random.default_rng(seed)
    X, Y = rng.normal(size=dim), rng.normal(size=dim)
    linearity = max(
        float(np.max(np.abs(matrix_rep_linear(alg, 2 * X) - 2 * matrix_rep_linear(alg, X)))),
        float(np.max(np.abs(
            matrix_rep_linear(alg, X + Y) - matrix_rep_linear(alg, X) - matrix_rep_linear(alg, Y)
        ))),
    )
    iso = images[A_IDX]
    iso_ok = bool(abs(iso[0, dim - 2] - 2.0) < tol and np.count_nonzero(np.abs(iso) > tol) == 1)

    matches, anti_matches, mismatches = [], [], []
    for i in range(dim):
        for j in range(i + 1, dim):
            comm = images[i] @ images[j] - images[j] @ images[i]
            target = sum(c[k, i, j] * images[k] for k in range(dim))
            pair = f"[{alg.labels[i]},{alg.labels[j]}]"
            if np.max(np.abs(comm - target)) <= tol:
                matches.append(pair)
            elif np.max(np.abs(comm + target)) <= tol:
                anti_matches.append(pair)
            else:
                mismatches.append({"pair": pair, "residual": float(np.max(np.abs(comm - target)))})
    return {
        "size": dim,
        "linearity": linearity,
        "isotropy_entry": iso_ok,
        "matches": matches,
        "anti_matches": anti_matches,
        "mismatches": mismatches,
    }


