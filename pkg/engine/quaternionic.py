"""
Flat pseudo-quaternionic model and the flatness argument for strongly
degenerate structures of linear type.

Coordinates on R^{4n} are grouped in quaternionic blocks (1, i, j, k); the
first p blocks are positive, the last q negative. J1, J2, J3 act on each
block as left multiplication by i, j, k.

The two decisive steps are checked exactly:

  - nu * g(X, xi) = 0 for every X forces nu = 0 when xi != 0
  - the 2-forms F with theta ^ F = 0 and (theta o J_a) ^ F = 0 for
    a = 1, 2, 3 form the zero space

Kernel dimensions are ranks over the rationals (sympy DomainMatrix).
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import sympy
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation
from sympy.polys.matrices import DomainMatrix

from .errors import NonIsotropicXi
from .lie_model import exact

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# left multiplication on (1, i, j, k)
_LEFT = {
    "i": [(0, 1, 1), (1, 0, -1), (2, 3, 1), (3, 2, -1)],
    "j": [(0, 2, 1), (1, 3, -1), (2, 0, -1), (3, 1, 1)],
    "k": [(0, 3, 1), (1, 2, 1), (2, 1, -1), (3, 0, -1)],
}
CONSTRAINT_SETS = ("full", "theta_only", "theta_J1", "theta_zero")


def _left_block(unit: str) -> sympy.Matrix:
    L = sympy.zeros(4, 4)
    for src, dst, sign in _LEFT[unit]:
        L[dst, src] = sign
    return L


def _as_float(m: sympy.Matrix) -> FloatArray:
    return np.array(m.tolist(), dtype=float)


@dataclass
class QuaternionTriple:
    p: int
    q: int
    J: tuple[sympy.Matrix, sympy.Matrix, sympy.Matrix]
    metric: sympy.Matrix

    @property
    def dim(self) -> int:
        return 4 * (self.p + self.q)

    @property
    def signature(self) -> tuple[int, int]:
        return 4 * self.p, 4 * self.q

    def numeric(self) -> tuple[FloatArray, list[FloatArray]]:
        return _as_float(self.metric), [_as_float(j) for j in self.J]

    def kahler_forms(self) -> list[FloatArray]:
        """omega_a(X, Y) = g(X, J_a Y)."""
        g, Js = self.numeric()
        return [g @ j for j in Js]

    def residuals(self) -> dict[str, float]:
        g, (J1, J2, J3) = self.numeric()
        eye = np.eye(self.dim)
        out = {
            "square": max(float(np.max(np.abs(j @ j + eye))) for j in (J1, J2, J3)),
            "product": float(np.max(np.abs(J1 @ J2 - J3))),
            "triple": float(np.max(np.abs(J1 @ J2 @ J3 + eye))),
            "skew": max(float(np.max(np.abs(j.T @ g + g @ j))) for j in (J1, J2, J3)),
        }
        out["forms_antisymmetric"] = max(float(np.max(np.abs(w + w.T))) for w in self.kahler_forms())
        return out


def build_flat_model(p: int, q: int) -> QuaternionTriple:
    if p < 0 or q < 0 or p + q < 2:
        raise ValueError(f"need p, q >= 0 and p + q >= 2, got ({p}, {q})")
    n = p + q
    J = tuple(sympy.diag(*([_left_block(u)] * n)) for u in ("i", "j", "k"))
    metric = sympy.diag(*([1] * (4 * p) + [-1] * (4 * q)))
    return QuaternionTriple(p=p, q=q, J=J, metric=metric)


def cayley_rotation(k1, k2, k3) -> sympy.Matrix:
    """Rational SO(3) element (I - K)(I + K)^-1 for the skew matrix K of (k1, k2, k3)."""
    k1, k2, k3 = (exact(k) for k in (k1, k2, k3))
    K = sympy.Matrix([[0, -k3, k2], [k3, 0, -k1], [-k2, k1, 0]])
    eye = sympy.eye(3)
    return (eye - K) * (eye + K).inv()


def random_rotation(seed: Optional[int] = None) -> FloatArray:
    return Rotation.random(random_state=seed).as_matrix()


def rotate_triple(triple: QuaternionTriple, R) -> QuaternionTriple:
    """J'_a = sum_b R_ab J_b. Exact when R is a sympy matrix."""
    if isinstance(R, sympy.MatrixBase):
        J = tuple(sum((R[a, b] * triple.J[b] for b in range(3)), sympy.zeros(triple.dim)) for a in range(3))
    else:
        R = np.asarray(R, float)
        floats = [_as_float(j) for j in triple.J]
        J = tuple(sympy.Matrix(sum(R[a, b] * floats[b] for b in range(3))) for a in range(3))
    return QuaternionTriple(p=triple.p, q=triple.q, J=J, metric=triple.metric)


def omega_four_form(triple: QuaternionTriple) -> FloatArray:
    """Components (i<j<k<l) of sum_a omega_a ^ omega_a."""
    dim = triple.dim
    quads = list(itertools.combinations(range(dim), 4))
    out = np.zeros(len(quads))
    for w in triple.kahler_forms():
        for n, (i, j, k, l) in enumerate(quads):
            out[n] += 2.0 * (w[i, j] * w[k, l] - w[i, k] * w[j, l] + w[i, l] * w[j, k])
    return out


def omega_rotation_residual(triple: QuaternionTriple, seed: Optional[int] = None) -> float:
    rotated = rotate_triple(triple, random_rotation(seed))
    return float(np.max(np.abs(omega_four_form(rotated) - omega_four_form(triple))))


def isotropic_vector(p: int, q: int, seed: Optional[int] = None) -> list[int]:
    """Random nonzero integer null vector: a copy of a positive part, permuted and sign-flipped."""
    if p == 0 or q == 0:
        raise NonIsotropicXi(f"definite signature ({4 * p}, {4 * q}) has no null vectors")
    rng = np.random.default_rng(seed)
    m = 4 * min(p, q)
    a = np.zeros(m, dtype=int)
    while not a.any():
        a = rng.integers(-3, 4, size=m)
    xi = [0] * (4 * (p + q))
    xi[:m] = a.tolist()
    perm = rng.permutation(m)
    signs = rng.choice([-1, 1], size=m)
    for slot, (src, s) in enumerate(zip(perm, signs)):
        xi[4 * p + slot] = int(s * a[src])
    return xi


def default_xi(p: int, q: int) -> list[int]:
    """e1 + f1: first positive and first negative basis vectors."""
    if p == 0 or q == 0:
        raise NonIsotropicXi(f"definite signature ({4 * p}, {4 * q}) has no null vectors")
    xi = [0] * (4 * (p + q))
    xi[0] = xi[4 * p] = 1
    return xi


# ---------------------------------------------------------------------------
# Structure tensor of linear type
# ---------------------------------------------------------------------------

def check_isotropic(triple: QuaternionTriple, xi: Sequence) -> sympy.Matrix:
    v = sympy.Matrix([exact(x) for x in xi])
    if v.shape[0] != triple.dim:
        raise ValueError(f"xi has {v.shape[0]} components, model dimension is {triple.dim}")
    if not any(v):
        raise NonIsotropicXi("xi vanishes")
    norm = (v.T * triple.metric * v)[0, 0]
    if norm != 0:
        raise NonIsotropicXi(f"g(xi, xi) = {norm}")
    return v


def qk_structure_S(triple: QuaternionTriple, xi: Sequence) -> FloatArray:
    """
    S[k, i, j] = (S_{e_i} e_j)^k for

      S_X Y = g(X,Y) xi - g(Y,xi) X + sum_a (g(J_a Y, xi) J_a X - g(X, J_a Y) J_a xi)
    """
    check_isotropic(triple, xi)
    g, Js = triple.numeric()
    v = np.asarray([float(x) for x in xi])
    theta = g @ v
    dim = triple.dim
    eye = np.eye(dim)
    S = np.einsum("ij,k->kij", g, v) - np.einsum("j,ki->kij", theta, eye)
    for Ja in Js:
        S += np.einsum("j,ki->kij", theta @ Ja, Ja)
        S -= np.einsum("ij,k->kij", g @ Ja, Ja @ v)
    return S


def s_metric_skew_residual(S: FloatArray, g: FloatArray) -> float:
    """g(S_X Y, Z) + g(Y, S_X Z)."""
    low = np.einsum("kij,kl->ijl", S, g)
    return float(np.max(np.abs(low + np.swapaxes(low, 1, 2))))


def nabla_xi_rule(triple: QuaternionTriple, xi: Sequence) -> FloatArray:
    """Matrix of X -> g(X, xi) xi - sum_a g(X, J_a xi) J_a xi."""
    g, Js = triple.numeric()
    v = np.asarray([float(x) for x in xi], float)
    out = np.outer(v, g @ v)
    for Ja in Js:
        w = Ja @ v
        out -= np.outer(w, g @ w)
    return out


def nabla_xi_residual(triple: QuaternionTriple, xi: Sequence, samples: int = 100, seed: Optional[int] = None) -> float:
    S = qk_structure_S(triple, xi)
    v = np.asarray([float(x) for x in xi], float)
    rule = nabla_xi_rule(triple, xi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for X in rng.standard_normal((samples, triple.dim)):
        worst = max(worst, float(np.max(np.abs(np.einsum("kij,i,j->k", S, X, v) - rule @ X))))
    return worst


def _quadratic_rule(g: FloatArray, Js: list[FloatArray], Y: FloatArray, eta: FloatArray) -> FloatArray:
    """Q_Y(eta) = g(Y, eta) eta - sum_a g(Y, J_a eta) J_a eta."""
    out = (Y @ g @ eta) * eta
    for Ja in Js:
        w = Ja @ eta
        out = out - (Y @ g @ w) * w
    return out


def flat_commutator_residual(
    triple: QuaternionTriple,
    xi: Sequence,
    X: Sequence[float],
    Y: Sequence[float],
    step: float = 1e-3,
) -> float:
    """
    |[nabla_X, nabla_Y] xi| on the flat model for a field obeying
    nabla_Z xi = Q_Z(xi), with X and Y constant. The derivative of Q_Y along
    Q_X(xi) is a central difference, exact for a quadratic rule.
    """
    g, Js = triple.numeric()
    v = np.asarray([float(x) for x in xi], float)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)

    def second(outer, inner):
        d = _quadratic_rule(g, Js, inner, v)
        plus = _quadratic_rule(g, Js, outer, v + step * d)
        minus = _quadratic_rule(g, Js, outer, v - step * d)
        return (plus - minus) / (2.0 * step)

    comm = second(Y, X) - second(X, Y)
    scale = max(1.0, float(np.max(np.abs(v))) ** 3 * float(np.max(np.abs(X))) * float(np.max(np.abs(Y))))
    return float(np.max(np.abs(comm))) / scale


# ---------------------------------------------------------------------------
# Wedge kernel
# ---------------------------------------------------------------------------

@dataclass
class WedgeSystem:
    dim: int
    theta: list[sympy.Rational]
    constraints: list[list[sympy.Rational]] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return not any(self.theta)

    def constraint_rank(self) -> int:
        if not self.constraints:
            return 0
        return sympy.Matrix(self.constraints).rank()

    def matrix(self) -> sympy.Matrix:
        pairs = {pair: c for c, pair in enumerate(itertools.combinations(range(self.dim), 2))}
        rows = []
        for alpha in self.constraints:
            for i, j, k in itertools.combinations(range(self.dim), 3):
                row = [0] * len(pairs)
                row[pairs[(j, k)]] = alpha[i]
                row[pairs[(i, k)]] = -alpha[j]
                row[pairs[(i, j)]] = alpha[k]
                rows.append(row)
        return sympy.Matrix(rows) if rows else sympy.zeros(0, len(pairs))


def wedge_system(triple: QuaternionTriple, xi: Sequence, constraints: str = "full") -> WedgeSystem:
    """
    constraints selects the covectors: "full" (theta, theta o J_a), "theta_only",
    "theta_J1" (J2 and J3 dropped) or "theta_zero" (theta replaced by 0).
    """
    if constraints not in CONSTRAINT_SETS:
        raise ValueError(f"unknown constraint set {constraints!r}")
    v = sympy.Matrix([exact(x) for x in xi])
    theta = (v.T * triple.metric) if constraints != "theta_zero" else sympy.zeros(1, triple.dim)
    covectors = [theta]
    if constraints in ("full", "theta_zero"):
        covectors += [theta * j for j in triple.J]
    elif constraints == "theta_J1":
        covectors.append(theta * triple.J[0])
    system = WedgeSystem(
        dim=triple.dim,
        theta=list(theta),
        constraints=[list(c) for c in covectors if any(c)],
    )
    return system


def wedge_kernel_dimension(system: WedgeSystem) -> int:
    """Dimension of {F in Lambda^2 : alpha ^ F = 0 for every constraint alpha}."""
    unknowns = system.dim * (system.dim - 1) // 2
    if system.degenerate:
        logger.warning("Wedge system with theta = 0: kernel is all of Lambda^2")
    M = system.matrix()
    if M.shape[0] == 0:
        return unknowns
    rank = DomainMatrix.from_Matrix(M).to_field().rank()
    return unknowns - rank


# ---------------------------------------------------------------------------
# Flatness argument
# ---------------------------------------------------------------------------

def nu_q_forcing(triple: QuaternionTriple, xi: Sequence) -> dict:
    """Solutions nu of nu * g(X, xi) = 0 for all X."""
    v = sympy.Matrix([exact(x) for x in xi])
    theta = (triple.metric * v)
    solutions = theta.nullspace()
    return {"solution_dim": len(solutions), "forced_zero": len(solutions) == 0}


def hyper_kahler_variant(triple: QuaternionTriple, xi: Sequence) -> dict:
    """Ricci-flat case: nu_q = 0 from the start, only the wedge step remains."""
    check_isotropic(triple, xi)
    kernel = wedge_kernel_dimension(wedge_system(triple, xi, "full"))
    return {"nu_assumed_zero": True, "kernel_dim": kernel, "forces_flat": kernel == 0}


def flatness_report(p: int, q: int, xi: Optional[Sequence] = None, quaternionic: bool = True) -> dict:
    """
    Chains the flatness argument on the (p, q) model. With quaternionic
    False, J2 and J3 are dropped from the constraints.
    """
    triple = build_flat_model(p, q)
    xi = list(xi) if xi is not None else default_xi(p, q)
    check_isotropic(triple, xi)
    kernel_dims = {name: wedge_kernel_dimension(wedge_system(triple, xi, name)) for name in CONSTRAINT_SETS}
    decisive = kernel_dims["full"] if quaternionic else kernel_dims["theta_J1"]
    nu = nu_q_forcing(triple, xi)
    full_system = wedge_system(triple, xi, "full")
    report = {
        "signature": list(triple.signature),
        "xi": [int(x) if float(x).is_integer() else float(x) for x in xi],
        "quaternionic": quaternionic,
        "constraint_rank": full_system.constraint_rank(),
        "kernel_dims": kernel_dims,
        "nu_forced_zero": nu["forced_zero"],
        "forces_flat": bool(nu["forced_zero"] and decisive == 0),
        "hyper_kahler": hyper_kahler_variant(triple, xi),
    }
    logger.info(
        "Flatness (%d,%d): kernel dims %s, forces_flat=%s", p, q, kernel_dims, report["forces_flat"],
    )
    return report
