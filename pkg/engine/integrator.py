"""
Curve-level numerics: geodesics, parallel transport and the frame curvature
along a geodesic running into the singular set.

All integration goes through scipy's adaptive Runge-Kutta 5(4) pair with
dense output. Reaching the singular set is an event, not an exception: the
returned Trajectory carries a flag and the event time.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Protocol, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import OdeSolution, solve_ivp
from scipy.interpolate import CubicHermiteSpline

from models.spec import MetricSpec
from .errors import BlowUp, InvalidPointError, SingularityReached, StepUnderflow
from .geometry import christoffel_arrays, curvature_data
from .metric_family import (
    DEFAULT_RHO_MIN, W1, W2, coordinate_labels, eval_profile_b,
    make_point, metric_components, metric_derivatives,
)
from .tensors import MetricDerivatives

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
TrajectoryFlag = Literal["completed", "SingularityReached", "BlowUp", "StepUnderflow"]

DEFAULT_TOL = 1e-10
DEFAULT_METHOD = "RK45"
DEFAULT_BLOWUP_NORM = 1e20
# A blow-up this close to the singular set (in units of rho_min) counts as arrival.
NEAR_SINGULAR_FACTOR = 1e3


class GeometryProvider(Protocol):
    """Anything that can hand the integrator a metric and its Christoffel symbols."""

    dim: int
    labels: list[str]

    def metric_at(self, x: FloatArray) -> FloatArray: ...

    def christoffel_at(self, x: FloatArray) -> FloatArray: ...

    def guard(self, x: FloatArray) -> Optional[float]:
        """Distance-like quantity that hits zero on the singular set, or None."""
        ...


class ComplexWaveGeometry:
    def __init__(self, spec: MetricSpec):
        self.spec = spec
        self.dim = spec.dim
        self.labels = coordinate_labels(spec.n)

    def metric_at(self, x: FloatArray) -> FloatArray:
        return metric_components(self.spec, x).components

    def christoffel_at(self, x: FloatArray) -> FloatArray:
        return christoffel_arrays(metric_derivatives(self.spec, x))[1]

    def derivatives_at(self, x: FloatArray) -> MetricDerivatives:
        return metric_derivatives(self.spec, x)

    def guard(self, x: FloatArray) -> Optional[float]:
        if self.spec.profile.variant != "singular":
            return None
        return float(np.hypot(x[W1], x[W2]))


@dataclass
class GeodesicState:
    position: FloatArray
    velocity: FloatArray
    t: float = 0.0


@dataclass
class FrameField:
    """Tangent vectors as columns of a (D, k) array."""
    vectors: FloatArray
    gram0: Optional[FloatArray] = None


@dataclass
class Trajectory:
    t: FloatArray
    positions: FloatArray
    velocities: FloatArray
    norm_drift: FloatArray
    flag: TrajectoryFlag
    labels: list[str]
    event_t: Optional[float] = None
    message: str = ""
    dense: Optional[OdeSolution] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)

    def state_at(self, t: float) -> tuple[FloatArray, FloatArray]:
        dim = self.positions.shape[1]
        if self.dense is not None:
            y = self.dense(t)
            return y[:dim], y[dim:]
        spline = CubicHermiteSpline(self.t, self.positions, self.velocities, axis=0)
        return spline(t), spline.derivative()(t)

    def or_raise(self) -> "Trajectory":
        """Raise the typed error matching the flag; return self if completed."""
        last = float(self.t[-1]) if len(self.t) else 0.0
        if self.flag == "SingularityReached":
            raise SingularityReached(self.event_t if self.event_t is not None else last)
        if self.flag == "BlowUp":
            raise BlowUp(self.event_t if self.event_t is not None else last)
        if self.flag == "StepUnderflow":
            raise StepUnderflow(last, self.message or "integrator could not meet tolerance")
        return self

    def to_rows(self) -> list[dict]:
        rows = []
        last = len(self.t) - 1
        for k in range(len(self.t)):
            row = {"t": repr(float(self.t[k]))}
            for label, value in zip(self.labels, self.positions[k]):
                row[label] = repr(float(value))
            row["norm_drift"] = repr(float(self.norm_drift[k]))
            row["flag"] = self.flag if k == last else "ok"
            rows.append(row)
        return rows

    @property
    def fieldnames(self) -> list[str]:
        return ["t"] + list(self.labels) + ["norm_drift", "flag"]


# ---------------------------------------------------------------------------
# Geodesics
# ---------------------------------------------------------------------------

def _norm_drift(provider: GeometryProvider, positions: FloatArray, velocities: FloatArray) -> FloatArray:
    """
    |g(v, v) - g(v, v)(0)| relative to the size of the summands of g(v, v).
    Near the singular set the individual summands grow without bound while
    their sum stays fixed, so an absolute drift is meaningless there.
    """
    q0 = None
    drift = np.zeros(len(positions))
    for k, (x, v) in enumerate(zip(positions, velocities)):
        terms = provider.metric_at(x) * np.outer(v, v)
        q = float(terms.sum())
        scale = max(1.0, float(np.abs(terms).sum()))
        if q0 is None:
            q0 = q
        drift[k] = abs(q - q0) / scale
    return drift


def _integrate(
    rhs: Callable[[float, FloatArray], FloatArray],
    y0: FloatArray,
    t_end: float,
    tol: float,
    events: list,
    t_eval: Optional[FloatArray] = None,
):
    return solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method=DEFAULT_METHOD,
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=events or None,
        t_eval=t_eval,
    )


def _event_flag(sol, names: list[TrajectoryFlag]) -> tuple[TrajectoryFlag, Optional[float]]:
    if sol.status == -1:
        return "StepUnderflow", None
    if sol.status == 1 and sol.t_events is not None:
        for name, times in zip(names, sol.t_events):
            if len(times):
                return name, float(times[0])
    return "completed", None


def integrate_geodesic(
    provider: GeometryProvider,
    init: GeodesicState,
    t_end: float,
    tol: float = DEFAULT_TOL,
    rho_min: float = DEFAULT_RHO_MIN,
    blowup_norm: float = DEFAULT_BLOWUP_NORM,
) -> Trajectory:
    dim = provider.dim
    y0 = np.concatenate([np.asarray(init.position, float), np.asarray(init.velocity, float)])

    def rhs(_t: float, y: FloatArray) -> FloatArray:
        x, v = y[:dim], y[dim:]
        gamma = provider.christoffel_at(x)
        return np.concatenate([v, -np.einsum("kij,i,j->k", gamma, v, v)])

    events, names = [], []
    if provider.guard(y0[:dim]) is not None:
        def singular(_t, y):
            return provider.guard(y[:dim]) - rho_min
        singular.terminal = True
        singular.direction = -1
        events.append(singular)
        names.append("SingularityReached")

    def escape(_t, y):
        return blowup_norm - float(np.max(np.abs(y)))
    escape.terminal = True
    escape.direction = -1
    events.append(escape)
    names.append("BlowUp")

    sol = _integrate(rhs, y0, t_end, tol, events)
    flag, event_t = _event_flag(sol, names)
    if flag == "BlowUp":
        distance = provider.guard(sol.y[:dim, -1])
        if distance is not None and distance <= NEAR_SINGULAR_FACTOR * rho_min:
            logger.debug("Blow-up at guard distance %.3g; treating as singular arrival", distance)
            flag = "SingularityReached"
    if flag == "StepUnderflow":
        logger.warning("Geodesic integration failed at t=%.6g: %s", sol.t[-1], sol.message)
    elif flag != "completed":
        logger.info("Geodesic stopped: %s at t=%.9g", flag, event_t)

    positions = sol.y[:dim].T
    velocities = sol.y[dim:].T
    return Trajectory(
        t=sol.t,
        positions=positions,
        velocities=velocities,
        norm_drift=_norm_drift(provider, positions, velocities),
        flag=flag,
        labels=list(provider.labels),
        event_t=event_t,
        message=sol.message,
        dense=sol.sol,
    )


def geodesic_integrate(
    spec: MetricSpec,
    init: GeodesicState,
    t_end: float,
    tol: float = DEFAULT_TOL,
    rho_min: float = DEFAULT_RHO_MIN,
) -> Trajectory:
    return integrate_geodesic(ComplexWaveGeometry(spec), init, t_end, tol, rho_min)


def singular_time(init: GeodesicState) -> Optional[float]:
    """
    The w-components of every geodesic are affine, w(t) = w(0) + t w'(0).
    Return the time the line passes through w = 0, if it does.
    """
    w0 = np.asarray(init.position[:2], float)
    wd = np.asarray(init.velocity[:2], float)
    speed2 = float(wd @ wd)
    if speed2 == 0.0:
        return None
    t_star = -float(w0 @ wd) / speed2
    if np.linalg.norm(w0 + t_star * wd) > 1e-12 * max(1.0, float(np.linalg.norm(w0))):
        return None
    return t_star


# ---------------------------------------------------------------------------
# Parallel transport
# ---------------------------------------------------------------------------

@dataclass
class TransportedFrame:
    t: FloatArray
    frames: FloatArray          # (N, D, k)
    positions: FloatArray
    gram: FloatArray            # (N, k, k)
    flag: TrajectoryFlag = "completed"

    def gram_drift(self) -> float:
        return float(np.max(np.abs(self.gram - self.gram[0]))) if len(self.gram) else 0.0


def _grams(provider: GeometryProvider, positions: FloatArray, frames: FloatArray) -> FloatArray:
    return np.stack([f.T @ provider.metric_at(x) @ f for x, f in zip(positions, frames)])


def parallel_transport(
    provider: GeometryProvider,
    trajectory: Trajectory,
    frame0: FrameField,
    tol: float = DEFAULT_TOL,
) -> TransportedFrame:
    """Transport frame0 along a recorded curve (geodesic or user curve with velocities)."""
    dim = provider.dim
    vectors = np.asarray(frame0.vectors, float)
    k = vectors.shape[1]
    t0, t1 = float(trajectory.t[0]), float(trajectory.t[-1])

    def rhs(t: float, e: FloatArray) -> FloatArray:
        x, v = trajectory.state_at(t)
        frame = e.reshape(dim, k)
        gamma = provider.christoffel_at(x)
        return (-np.einsum("lij,i,jc->lc", gamma, v, frame)).ravel()

    sol = solve_ivp(
        rhs, (t0, t1), vectors.ravel(), method=DEFAULT_METHOD,
        rtol=tol, atol=tol, t_eval=trajectory.t,
    )
    if sol.status == -1:
        logger.warning("Parallel transport failed at t=%.6g: %s", sol.t[-1], sol.message)
    frames = sol.y.T.reshape(-1, dim, k)
    positions = np.stack([trajectory.state_at(t)[0] for t in sol.t])
    return TransportedFrame(
        t=sol.t,
        frames=frames,
        positions=positions,
        gram=_grams(provider, positions, frames),
        flag="StepUnderflow" if sol.status == -1 else "completed",
    )


def transport_along_geodesic(
    provider: GeometryProvider,
    init: GeodesicState,
    frame0: FrameField,
    t_eval: FloatArray,
    tol: float = DEFAULT_TOL,
) -> TransportedFrame:
    """Integrate a geodesic and a parallel frame along it as one system."""
    dim = provider.dim
    vectors = np.asarray(frame0.vectors, float)
    k = vectors.shape[1]
    y0 = np.concatenate([np.asarray(init.position, float), np.asarray(init.velocity, float), vectors.ravel()])

    def rhs(_t: float, y: FloatArray) -> FloatArray:
        x, v = y[:dim], y[dim:2 * dim]
        frame = y[2 * dim:].reshape(dim, k)
        gamma = provider.christoffel_at(x)
        acc = -np.einsum("kij,i,j->k", gamma, v, v)
        de = -np.einsum("lij,i,jc->lc", gamma, v, frame)
        return np.concatenate([v, acc, de.ravel()])

    t_eval = np.asarray(t_eval, float)
    sol = solve_ivp(
        rhs, (0.0, float(t_eval[-1])), y0, method=DEFAULT_METHOD,
        rtol=tol, atol=tol, t_eval=t_eval,
    )
    if sol.status == -1:
        logger.warning("Frame transport failed at t=%.6g: %s", sol.t[-1], sol.message)
    positions = sol.y[:dim].T
    frames = sol.y[2 * dim:].T.reshape(-1, dim, k)
    return TransportedFrame(
        t=sol.t,
        frames=frames,
        positions=positions,
        gram=_grams(provider, positions, frames),
        flag="StepUnderflow" if sol.status == -1 else "completed",
    )


# ---------------------------------------------------------------------------
# Frame curvature along the incomplete geodesic
# ---------------------------------------------------------------------------

@dataclass
class FrameCurvatureSample:
    t: float
    value: float
    predicted: float

    @property
    def relative_error(self) -> float:
        return abs(self.value - self.predicted) / abs(self.predicted)


def incomplete_geodesic_start(spec: MetricSpec) -> GeodesicState:
    """gamma(0) = (1, 0, 0, ...), gamma'(0) = (-1, 0, 0, ...)."""
    velocity = np.zeros(spec.dim)
    velocity[W1] = -1.0
    return GeodesicState(position=make_point(spec, 1.0, 0.0), velocity=velocity)


def parallel_frame_curvature(
    spec: MetricSpec,
    t_samples: Sequence[float] = tuple(np.linspace(0.0, 0.9, 10)),
    tol: float = DEFAULT_TOL,
) -> list[FrameCurvatureSample]:
    """
    R(E1, E2, E1, E2) along gamma(t) = (1 - t, 0, ...) for the parallel frame
    with E_i(0) = d_wi / sqrt|b(0)|, against b0 / (2 b(0)^2) (1 - t)^-4.
    """
    init = incomplete_geodesic_start(spec)
    b_start = float(eval_profile_b(spec, init.position).value)
    if abs(b_start) < 1e-14:
        raise InvalidPointError("b vanishes at (1, 0); the frame d_wi / sqrt|b| is undefined")
    scale = 1.0 / np.sqrt(abs(b_start))
    vectors = np.zeros((spec.dim, 2))
    vectors[W1, 0] = scale
    vectors[W2, 1] = scale
    provider = ComplexWaveGeometry(spec)
    t_eval = np.asarray(sorted(t_samples), float)
    transported = transport_along_geodesic(provider, init, FrameField(vectors), t_eval, tol)
    out = []
    for t, x, frame in zip(transported.t, transported.positions, transported.frames):
        Rm = curvature_data(metric_derivatives(spec, x), with_derivative=False).Rm
        e1, e2 = frame[:, 0], frame[:, 1]
        value = float(np.einsum("abcd,a,b,c,d->", Rm, e1, e2, e1, e2))
        predicted = spec.profile.b0 / (2.0 * b_start**2) * (1.0 - t) ** -4
        out.append(FrameCurvatureSample(t=float(t), value=value, predicted=predicted))
    return out
