"""
Truncated Taylor jets in the two base variables (w1, w2).

A Jet2 stores the raw derivative values d^(i+j) f / dw1^i dw2^j at the
evaluation point for every i + j <= 3, in the slot order of SLOTS. The
leading axes of the coefficient array may carry a tensor shape, so a whole
metric matrix can be one Jet2 of shape (D, D).

Products use the Leibniz rule; reciprocal and square root are composed from
their univariate derivatives through the nilpotent part of the jet.
"""
from __future__ import annotations

from math import comb
from typing import Iterable, Literal, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import JetDomainError

MAX_ORDER = 3

SLOTS: tuple[tuple[int, int], ...] = (
    (0, 0),
    (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
)
SLOT_INDEX: dict[tuple[int, int], int] = {s: k for k, s in enumerate(SLOTS)}
N_SLOTS = len(SLOTS)
# Slots of total order <= 2, the ones still exact after one partial derivative
_LOWER_SLOTS = [SLOT_INDEX[s] for s in SLOTS if sum(s) < MAX_ORDER]

JetOp = Literal["add", "sub", "mul", "div", "pow_int", "sqrt"]
Scalar = Union[float, int, np.floating]


def _leibniz_tensor() -> NDArray[np.float64]:
    table = np.zeros((N_SLOTS, N_SLOTS, N_SLOTS))
    for r, (i, j) in enumerate(SLOTS):
        for k in range(i + 1):
            for l in range(j + 1):
                p = SLOT_INDEX[(k, l)]
                q = SLOT_INDEX[(i - k, j - l)]
                table[p, q, r] += comb(i, k) * comb(j, l)
    return table


_LEIBNIZ = _leibniz_tensor()


class Jet2:
    """Order-3 jet in (w1, w2), possibly tensor-valued."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None

    def __init__(self, coeffs: ArrayLike):
        arr = np.array(coeffs, dtype=float)
        if arr.shape[-1:] != (N_SLOTS,):
            raise ValueError(f"Jet2 needs a trailing axis of {N_SLOTS} slots, got {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value: ArrayLike) -> "Jet2":
        val = np.asarray(value, dtype=float)
        coeffs = np.zeros(val.shape + (N_SLOTS,))
        coeffs[..., 0] = val
        return cls(coeffs)

    @classmethod
    def lift(cls, point: Sequence[float], variable_index: int) -> "Jet2":
        if variable_index not in (0, 1):
            raise ValueError("only w1 (0) and w2 (1) can be lifted")
        coeffs = np.zeros(N_SLOTS)
        coeffs[0] = float(point[variable_index])
        coeffs[1 + variable_index] = 1.0
        return cls(coeffs)

    @classmethod
    def from_entries(cls, shape: tuple[int, ...], entries: dict[tuple[int, ...], "Jet2 | Scalar"]) -> "Jet2":
        """Assemble a tensor-valued jet from scalar jets placed at given indices."""
        coeffs = np.zeros(tuple(shape) + (N_SLOTS,))
        for index, entry in entries.items():
            if isinstance(entry, Jet2):
                coeffs[index] = entry.coeffs
            else:
                coeffs[index][0] = float(entry)
        return cls(coeffs)

    # ------------------------------------------------------------------
    # Read-off
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def value(self) -> NDArray[np.float64]:
        return self.coeffs[..., 0]

    def derivative(self, i: int, j: int) -> NDArray[np.float64]:
        return self.coeffs[..., SLOT_INDEX[(i, j)]]

    def gradient(self) -> NDArray[np.float64]:
        """First derivatives stacked on a new leading axis of length 2."""
        return np.stack([self.derivative(1, 0), self.derivative(0, 1)])

    def hessian(self) -> NDArray[np.float64]:
        h = np.empty((2, 2) + self.shape)
        h[0, 0] = self.derivative(2, 0)
        h[0, 1] = h[1, 0] = self.derivative(1, 1)
        h[1, 1] = self.derivative(0, 2)
        return h

    def third(self) -> NDArray[np.float64]:
        t = np.empty((2, 2, 2) + self.shape)
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    k = (a, b, c).count(0)
                    t[a, b, c] = self.derivative(k, 3 - k)
        return t

    def laplacian(self) -> NDArray[np.float64]:
        return self.derivative(2, 0) + self.derivative(0, 2)

    def partial(self, variable_index: int) -> "Jet2":
        """Derivative jet. Its order-3 slots are unknown and set to zero."""
        out = np.zeros_like(self.coeffs)
        for r, (i, j) in enumerate(SLOTS):
            if i + j == MAX_ORDER:
                continue
            src = (i + 1, j) if variable_index == 0 else (i, j + 1)
            out[..., r] = self.coeffs[..., SLOT_INDEX[src]]
        return Jet2(out)

    def __getitem__(self, key) -> "Jet2":
        return Jet2(self.coeffs[key])

    def __repr__(self) -> str:
        return f"Jet2(shape={self.shape}, value={self.value!r})"

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    @staticmethod
    def _coerce(other: "Jet2 | ArrayLike") -> NDArray[np.float64]:
        if isinstance(other, Jet2):
            return other.coeffs
        return Jet2.constant(other).coeffs

    def __add__(self, other):
        return Jet2(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet2(self.coeffs - self._coerce(other))

    def __rsub__(self, other):
        return Jet2(self._coerce(other) - self.coeffs)

    def __neg__(self):
        return Jet2(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet2) and np.ndim(other) == 0:
            return Jet2(self.coeffs * float(other))
        b = self._coerce(other)
        return Jet2(np.einsum("...p,...q,pqr->...r", self.coeffs, b, _LEIBNIZ))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2) and np.ndim(other) == 0:
            if float(other) == 0.0:
                raise JetDomainError("division by a zero constant")
            return Jet2(self.coeffs / float(other))
        return self * Jet2(self._coerce(other)).reciprocal()

    def __rtruediv__(self, other):
        return Jet2(self._coerce(other)) * self.reciprocal()

    def __pow__(self, exponent: int):
        if int(exponent) != exponent:
            raise ValueError("only integer powers are supported; use sqrt()")
        k = int(exponent)
        if k < 0:
            return self.reciprocal() ** (-k)
        result = Jet2.constant(np.ones(self.shape))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _compose(self, f0, f1, f2, f3) -> "Jet2":
        """f(self) from the derivatives f0..f3 of a univariate f at the value."""
        delta = Jet2(self.coeffs - Jet2.constant(self.value).coeffs)
        d2 = delta * delta
        d3 = d2 * delta
        out = (
            Jet2.constant(f0).coeffs
            + np.asarray(f1)[..., None] * delta.coeffs
            + (np.asarray(f2) / 2.0)[..., None] * d2.coeffs
            + (np.asarray(f3) / 6.0)[..., None] * d3.coeffs
        )
        return Jet2(out)

    def reciprocal(self) -> "Jet2":
        v = self.value
        if np.any(v == 0.0):
            raise JetDomainError("division by a jet with zero value")
        return self._compose(1.0 / v, -1.0 / v**2, 2.0 / v**3, -6.0 / v**4)

    def sqrt(self) -> "Jet2":
        v = self.value
        if np.any(v <= 0.0):
            raise JetDomainError("square root of a nonpositive jet")
        r = np.sqrt(v)
        return self._compose(r, 0.5 / r, -0.25 / (v * r), 0.375 / (v * v * r))


def jet_arith(op: JetOp, a: Jet2, b: "Jet2 | Scalar | None" = None) -> Jet2:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow_int":
        return a ** int(b)
    if op == "sqrt":
        return a.sqrt()
    raise ValueError(f"unknown jet operation: {op}")


def jet_lift(point: Sequence[float], variable_index: int) -> Jet2:
    return Jet2.lift(point, variable_index)


ComplexCoeff = Union[complex, tuple[float, float]]


def _as_complex(c: ComplexCoeff) -> complex:
    if isinstance(c, complex):
        return c
    if isinstance(c, (tuple, list)):
        return complex(float(c[0]), float(c[1]))
    return complex(float(c), 0.0)


def complex_poly_eval(coeffs: Iterable[ComplexCoeff], point: Sequence[float]) -> tuple[Jet2, Jet2]:
    """
    Jets of (Re h, -Im h) for h(w) = sum c_k w^k with w = w1 + i w2.

    The pair is the (r, s) coupling of the metric family.
    """
    w1 = Jet2.lift(point, 0)
    w2 = Jet2.lift(point, 1)
    re = Jet2.constant(0.0)
    im = Jet2.constant(0.0)
    for c in reversed([_as_complex(c) for c in coeffs]):
        re, im = re * w1 - im * w2 + c.real, re * w2 + im * w1 + c.imag
    return re, -im


def real_poly_eval(terms: Iterable[tuple[int, int, float]], point: Sequence[float]) -> Jet2:
    """Jet of sum c * w1^i * w2^j."""
    w1 = Jet2.lift(point, 0)
    w2 = Jet2.lift(point, 1)
    out = Jet2.constant(0.0)
    for i, j, c in terms:
        out = out + (w1 ** int(i)) * (w2 ** int(j)) * float(c)
    return out


def cauchy_riemann_residual(r: Jet2, s: Jet2) -> float:
    """
    Largest violation of ds/dw1 = dr/dw2 and ds/dw2 = -dr/dw1 over every
    jet slot that is still exact after differentiation.
    """
    first = s.partial(0) - r.partial(1)
    second = s.partial(1) + r.partial(0)
    res = np.concatenate([
        np.abs(first.coeffs[..., _LOWER_SLOTS]).ravel(),
        np.abs(second.coeffs[..., _LOWER_SLOTS]).ravel(),
    ])
    return float(res.max()) if res.size else 0.0
