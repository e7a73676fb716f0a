"""
Verification suites.

Each suite turns engine residuals into CheckResult rows. Checks:
  metric:         Cauchy-Riemann hypothesis, Ricci flatness, curvature formula,
                  Riemann symmetries, second Bianchi, Christoffel cross-checks,
                  metric convention, Hermitian form, local symmetry (CW analog)
  kahler:         J^2 = -1, g Hermitian, d omega = 0, nabla J = 0
  ambrose_singer: canonical connection residuals, isotropy, structure class,
                  recurrence identities (singular profile only)
  vsi:            scalar invariants of order 0, 1, 2
  osserman:       Jacobi operators square to zero, reference Jacobi matrix
  walker:         null parallel distribution span{d_z1, d_z2}
  holonomy:       dimension, generator, invariant subspaces, su(1,1) normal form
  geodesic:       singular-set arrival, affine w, norm drift, frame curvature
  liealg:         Jacobi identity, structure, K subalgebra and K geodesics
  wave:           Killing fields, Heisenberg algebra, curvature, homogeneous structure
  quaternion:     quaternionic model, structure tensor, wedge kernel, flatness

A check listed in `requires` of another turns that other check into
`skipped` when it fails, so one broken hypothesis yields one failing check.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from config import Config
from engine import geometry, holonomy, kahler, lie_model, lorentz_waves, quaternionic
from engine.errors import DegenerateBasis, PwlabError
from engine.integrator import (
    ComplexWaveGeometry, GeodesicState, integrate_geodesic, parallel_frame_curvature,
    singular_time, transport_along_geodesic, FrameField,
)
from engine.metric_family import (
    W1, W2, Z1, Z2, hermitian_pairing, laplacian_target, make_point,
    metric_convention_resolution, metric_derivatives, random_point,
)
from models.report import CheckResult, SuiteReport
from models.spec import MetricSpec, PlaneWaveSpec

logger = logging.getLogger(__name__)

# geodesic families through the singular set: (start w, start w')
SINGULAR_FAMILIES = {
    "w1_family": ((1.0, 0.0), (-1.0, 0.0)),
    "w2_family": ((0.0, 1.0), (0.0, -1.0)),
}
WAVE_U_SPAN = (0.5, 2.0)
ORDER2_POINTS = 5
HOLONOMY_POINTS = 50


def _worst(bundles: Iterable[dict], key: str) -> float:
    return max((float(b[key]) for b in bundles if key in b), default=0.0)


def _drift_before(traj, horizon: float) -> float:
    mask = traj.t <= horizon
    return float(np.max(np.abs(traj.norm_drift[mask]))) if mask.any() else 0.0


class SuiteRunner:
    """
    Runs suites over deterministic sample points.

    Usage:
        runner = SuiteRunner(config)
        reports = runner.verify(spec)
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()

    # ------------------------------------------------------------------
    # Sampling and fan-out
    # ------------------------------------------------------------------

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, salt])

    def sample_points(self, spec: MetricSpec, count: Optional[int] = None) -> list[np.ndarray]:
        rng = self.rng()
        count = self.config.samples if count is None else count
        return [random_point(spec, rng, self.config.rho_range) for _ in range(count)]

    def _map(self, fn: Callable, items: Sequence) -> list:
        """Evaluate fn over items on the thread pool, results in submission order."""
        if self.config.threads <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            return list(pool.map(fn, items))

    def _gate(
        self,
        done: dict[str, CheckResult],
        suite: str,
        name: str,
        fn: Callable[[], CheckResult],
        requires: Sequence[str] = (),
    ) -> CheckResult:
        for req in requires:
            prior = done.get(req)
            if prior is not None and prior.status != "pass" and not prior.diagnostic:
                result = CheckResult.skipped(name, suite, f"requires {req}")
                done[name] = result
                logger.info("%s.%s: skipped (requires %s)", suite, name, req)
                return result
        try:
            result = fn()
        except PwlabError as exc:
            logger.exception("Check %s.%s raised", suite, name)
            result = CheckResult(name=name, suite=suite, message=str(exc))
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            logger.exception("Check %s.%s raised", suite, name)
            result = CheckResult(name=name, suite=suite, message=f"{type(exc).__name__}: {exc}")
        done[name] = result
        level = logging.INFO if result.passed or result.diagnostic else logging.WARNING
        logger.log(level, "%s.%s: %s (residual=%s, threshold=%s)",
                   suite, name, result.status, result.max_residual, result.threshold)
        return result

    # ==================================================================
    # verify: metric, kahler, ambrose_singer, vsi, osserman, walker
    # ==================================================================

    def _point_bundle(self, spec: MetricSpec, item: tuple) -> dict:
        index, point, X, Y = item
        md = metric_derivatives(spec, point)
        cd = geometry.curvature_data(md)
        out: dict[str, float] = {}

        out["cauchy_riemann"] = kahler.cauchy_riemann_residual(spec, point)
        out["ricci"] = float(np.max(np.abs(geometry.ricci_from(cd))))
        target = 0.5 * laplacian_target(spec, point)
        out["curvature_formula"] = abs(float(cd.Rm[W1, W2, W1, W2]) - target)
        out["symmetries"] = max(geometry.riemann_symmetry_residual(cd.Rm).values())
        out["second_bianchi"] = geometry.second_bianchi_residual(cd.nabla_R)
        out["christoffel_closed_form"] = geometry.christoffel_closed_form_residual(spec, point)
        out["christoffel_fd"] = geometry.christoffel_fd_residual(spec, point)
        out["convention"] = metric_convention_resolution(spec, point)["residuals"]["full"]
        out["nabla_R"] = float(np.max(np.abs(cd.nabla_R)))

        J = kahler.standard_J(spec.n)
        h = hermitian_pairing(spec, point, X, Y)
        out["hermitian_real"] = abs(float(X @ md.g @ Y) - 2.0 * h.real)
        out["hermitian_imag"] = abs(float(X @ md.g @ J.matrix @ Y) - 2.0 * h.imag)
        out["J_square"] = J.square_residual()
        out["J_hermitian"] = J.hermitian_residual(md.g)
        out["d_omega"] = float(np.max(np.abs(kahler.d_omega(spec, point))))
        out["levi_civita_J"] = kahler.levi_civita_J_residual(spec, point)

        nabla2 = geometry.nabla2_riemann(spec, point, cd) if index < ORDER2_POINTS else None
        invariants = geometry.scalar_invariants_from(cd, 2 if nabla2 is not None else 1, nabla2)
        out["invariants"] = max(abs(v) for v in invariants.values())

        M = geometry.jacobi_matrix(cd, X)
        out["jacobi_square"] = float(np.max(np.abs(M @ M)))
        out["walker"] = kahler.walker_residual(spec, point)

        if spec.profile.variant == "singular":
            for key, value in kahler.ambrose_singer_residuals(spec, point).items():
                out[f"as_{key}"] = value
            for key, value in kahler.lemma_identities(spec, point).items():
                out[f"lemma_{key}"] = value
            hs = kahler.hom_structure(spec, point, md)
            for key, value in kahler.isotropy_residuals(hs).items():
                out[f"iso_{key}"] = value
            residual, _, theta_gap = kahler.class_residual(spec, point)
            out["class"] = residual
            out["class_theta"] = theta_gap
            out["s_antisymmetry"] = kahler.s_antisymmetry_residual(hs.S, md.g)
        return out

    def verify(self, spec: MetricSpec) -> list[SuiteReport]:
        points = self.sample_points(spec)
        rng = self.rng(1)
        items = [
            (i, p, rng.standard_normal(spec.dim), rng.standard_normal(spec.dim))
            for i, p in enumerate(points)
        ]
        logger.info("Evaluating %d sample points (threads=%d)", len(items), self.config.threads)
        bundles = self._map(lambda item: self._point_bundle(spec, item), items)
        done: dict[str, CheckResult] = {}
        reference = make_point(spec, 1.0, 0.0)
        return [
            SuiteReport(name="metric", checks=self._check_metric(spec, bundles, reference, done)),
            SuiteReport(name="kahler", checks=self._check_kahler(bundles, done)),
            SuiteReport(name="ambrose_singer", checks=self._check_ambrose_singer(spec, bundles, reference, done)),
            SuiteReport(name="vsi", checks=self._check_vsi(bundles, done)),
            SuiteReport(name="osserman", checks=self._check_osserman(spec, bundles, reference, done)),
            SuiteReport(name="walker", checks=self._check_walker(bundles, done)),
        ]

    # ------------------------------------------------------------------
    # Metric
    # ------------------------------------------------------------------

    def _check_metric(self, spec: MetricSpec, bundles: list[dict], reference, done) -> list[CheckResult]:
        cfg = self.config
        suite = "metric"
        hyp = ("cauchy_riemann",)

        def residual(name: str, key: str, threshold: float, requires=hyp, **extra):
            return self._gate(
                done, suite, name,
                lambda: CheckResult.from_residual(name, suite, _worst(bundles, key), threshold, **extra),
                requires,
            )

        def reference_value() -> CheckResult:
            Rm = geometry.riemann(spec, reference).components
            expected = 0.5 * laplacian_target(spec, reference)
            return CheckResult.from_residual(
                "curvature_reference", suite, abs(float(Rm[W1, W2, W1, W2]) - expected), cfg.strict_tol,
                details={"value": float(Rm[W1, W2, W1, W2]), "expected": expected},
            )

        checks = [
            residual("cauchy_riemann", "cauchy_riemann", cfg.identity_tol, requires=()),
            residual("ricci_flat", "ricci", cfg.identity_tol),
            residual("curvature_formula", "curvature_formula", cfg.tol),
            self._gate(done, suite, "curvature_reference", reference_value, hyp),
            residual("riemann_symmetries", "symmetries", cfg.identity_tol, requires=()),
            residual("second_bianchi", "second_bianchi", cfg.identity_tol, requires=()),
            residual("christoffel_closed_form", "christoffel_closed_form", cfg.identity_tol),
            residual("christoffel_finite_difference", "christoffel_fd", 1e-6, requires=()),
            residual("metric_convention", "convention", cfg.identity_tol, requires=()),
            residual("hermitian_form_real", "hermitian_real", cfg.identity_tol, requires=()),
            residual("hermitian_form_imag", "hermitian_imag", cfg.identity_tol, requires=()),
        ]
        if spec.profile.variant in ("cw_analog", "flat"):
            checks.append(residual("locally_symmetric", "nabla_R", cfg.tol))
        return checks

    # ------------------------------------------------------------------
    # Kähler
    # ------------------------------------------------------------------

    def _check_kahler(self, bundles: list[dict], done) -> list[CheckResult]:
        cfg = self.config
        suite = "kahler"
        pairs = [
            ("J_square", "J_square", cfg.strict_tol, ()),
            ("J_hermitian", "J_hermitian", cfg.strict_tol, ()),
            ("d_omega", "d_omega", cfg.identity_tol, ("cauchy_riemann",)),
            ("levi_civita_J", "levi_civita_J", cfg.identity_tol, ("cauchy_riemann",)),
        ]
        return [
            self._gate(
                done, suite, name,
                lambda key=key, thr=thr, name=name: CheckResult.from_residual(name, suite, _worst(bundles, key), thr),
                req,
            )
            for name, key, thr, req in pairs
        ]

    # ------------------------------------------------------------------
    # Ambrose-Singer
    # ------------------------------------------------------------------

    def _check_ambrose_singer(self, spec: MetricSpec, bundles: list[dict], reference, done) -> list[CheckResult]:
        suite = "ambrose_singer"
        if spec.profile.variant != "singular":
            return [CheckResult.skipped("structure_tensor", suite, "the structure tensor exists for the singular profile only")]
        cfg = self.config
        hyp = ("cauchy_riemann", "levi_civita_J")
        keys = [
            ("nabla_g", "as_nabla_g"), ("nabla_R", "as_nabla_R"), ("nabla_S", "as_nabla_S"),
            ("nabla_J", "as_nabla_J"), ("nabla_xi", "as_nabla_xi"), ("nabla_theta", "as_nabla_theta"),
            ("xi_null", "iso_xi_null"), ("theta_J_xi", "iso_theta_J_xi"),
            ("s_antisymmetry", "s_antisymmetry"), ("structure_class", "class"),
            ("class_theta", "class_theta"),
            ("nabla_theta_quadratic", "lemma_nabla_theta_quadratic"),
            ("theta_wedge_R", "lemma_theta_wedge_R"), ("theta_J_wedge_R", "lemma_theta_J_wedge_R"),
            ("recurrence", "lemma_recurrence"), ("d_theta", "lemma_d_theta"),
        ]
        checks = [
            self._gate(
                done, suite, name,
                lambda key=key, name=name: CheckResult.from_residual(name, suite, _worst(bundles, key), cfg.identity_tol),
                hyp,
            )
            for name, key in keys
        ]
        return checks

    # ------------------------------------------------------------------
    # VSI, Osserman, Walker
    # ------------------------------------------------------------------

    def _check_vsi(self, bundles: list[dict], done) -> list[CheckResult]:
        suite = "vsi"
        return [self._gate(
            done, suite, "scalar_invariants",
            lambda: CheckResult.from_residual("scalar_invariants", suite, _worst(bundles, "invariants"),
                                              self.config.identity_tol,
                                              details={"order2_points": min(ORDER2_POINTS, len(bundles))}),
            ("cauchy_riemann",),
        )]

    def _check_osserman(self, spec: MetricSpec, bundles: list[dict], reference, done) -> list[CheckResult]:
        suite = "osserman"
        cfg = self.config

        def reference_matrix() -> CheckResult:
            X = np.zeros(spec.dim)
            X[W1] = 1.0
            M = geometry.jacobi_operator(spec, reference, X).components
            expected = np.zeros_like(M)
            expected[Z2, W2] = -0.5 * laplacian_target(spec, reference)
            return CheckResult.from_residual(
                "jacobi_reference", suite, float(np.max(np.abs(M - expected))), cfg.tol,
                details={"entry_z2_w2": float(M[Z2, W2]), "expected": float(expected[Z2, W2])},
            )

        return [
            self._gate(done, suite, "jacobi_nilpotent",
                       lambda: CheckResult.from_residual("jacobi_nilpotent", suite, _worst(bundles, "jacobi_square"), cfg.tol),
                       ("cauchy_riemann",)),
            self._gate(done, suite, "jacobi_reference", reference_matrix, ("cauchy_riemann",)),
        ]

    def _check_walker(self, bundles: list[dict], done) -> list[CheckResult]:
        suite = "walker"
        return [self._gate(
            done, suite, "null_parallel_distribution",
            lambda: CheckResult.from_residual("null_parallel_distribution", suite, _worst(bundles, "walker"), 1e-11),
        )]

    # ==================================================================
    # holonomy
    # ==================================================================

    def holonomy(self, spec: MetricSpec) -> tuple[list[SuiteReport], dict]:
        cfg = self.config
        suite = "holonomy"
        done: dict[str, CheckResult] = {}
        points = self.sample_points(spec, min(cfg.samples, HOLONOMY_POINTS))
        reference = make_point(spec, 1.0, 0.0)
        expected_dim = 0 if spec.profile.b0 == 0.0 else 1
        artifacts: dict = {}

        def span_dims() -> CheckResult:
            spans = self._map(lambda p: holonomy.infinitesimal_holonomy(spec, p, 1, cfg.rank_tol), points)
            dims = sorted({s.dim for s in spans})
            stabilized = all(s.stabilized for s in spans)
            return CheckResult.from_flag(
                "dimension", suite, dims == [expected_dim] and stabilized,
                details={"dims": dims, "expected": expected_dim, "stabilized": stabilized, "points": len(points)},
            )

        def order_two() -> CheckResult:
            span = holonomy.infinitesimal_holonomy(spec, reference, 2, cfg.rank_tol)
            return CheckResult.from_flag(
                "order_two", suite, span.dims_by_order == [expected_dim] * 3,
                details={"dims_by_order": span.dims_by_order},
            )

        def generator() -> CheckResult:
            R12 = holonomy.curvature_generator(spec, reference)
            A = holonomy.standard_A(spec.n)
            coeff = 0.5 * laplacian_target(spec, reference)
            return CheckResult.from_residual(
                "generator", suite, float(np.max(np.abs(R12 - coeff * A))), cfg.tol,
                details={"coefficient": coeff},
            )

        def algebraic() -> CheckResult:
            res = holonomy.holonomy_checks(spec, reference)
            return CheckResult.from_residual("skew_nilpotent_complex", suite, max(res.values()), cfg.strict_tol, details=res)

        def subspaces() -> CheckResult:
            rep = holonomy.invariant_subspaces(spec, reference)
            worst = max(rep["A_E_outside"], rep["A_E_perp"])
            ok = worst <= cfg.strict_tol and rep["E_perp_dim"] == 2 * spec.n
            return CheckResult(
                name="invariant_subspaces", suite=suite, max_residual=worst, threshold=cfg.strict_tol,
                passed=ok, status="pass" if ok else "fail",
                details={"E_dim": rep["E_dim"], "E_perp_dim": rep["E_perp_dim"]},
            )

        def normal_form() -> CheckResult:
            try:
                nf = holonomy.su11_normal_form(spec, reference)
            except DegenerateBasis as exc:
                return CheckResult.skipped("su11_normal_form", suite, str(exc))
            expected = nf.sign * np.array([[1j, 1j], [-1j, -1j]])
            res = nf.checks()
            res["matrix"] = float(np.max(np.abs(nf.normalized - expected)))
            res["gram"] = float(np.max(np.abs(nf.gram - np.diag([nf.sign, -nf.sign]))))
            artifacts["normal_form"] = {
                "sign": nf.sign,
                "raw": [[[z.real, z.imag] for z in row] for row in nf.raw],
                "normalized": [[[z.real, z.imag] for z in row] for row in nf.normalized],
                "gram": [[[z.real, z.imag] for z in row] for row in nf.gram],
            }
            return CheckResult.from_residual("su11_normal_form", suite, max(res.values()), cfg.tol, details=res)

        checks = [
            self._gate(done, suite, "dimension", span_dims),
            self._gate(done, suite, "order_two", order_two),
            self._gate(done, suite, "generator", generator),
            self._gate(done, suite, "skew_nilpotent_complex", algebraic),
            self._gate(done, suite, "invariant_subspaces", subspaces),
        ]
        if expected_dim:
            checks.append(self._gate(done, suite, "su11_normal_form", normal_form))
        return [SuiteReport(name=suite, checks=checks)], artifacts

    # ==================================================================
    # geodesic
    # ==================================================================

    def geodesics(self, spec: MetricSpec) -> tuple[list[SuiteReport], dict]:
        cfg = self.config
        suite = "geodesic"
        done: dict[str, CheckResult] = {}
        provider = ComplexWaveGeometry(spec)
        artifacts: dict = {"trajectories": {}, "frame_curvature": []}
        checks: list[CheckResult] = []

        def affine_residual(traj, init: GeodesicState) -> float:
            w = traj.positions[:, :2]
            line = init.position[:2] + np.outer(traj.t, init.velocity[:2])
            return float(np.max(np.abs(w - line)))

        if spec.profile.variant == "singular":
            for name, (w0, wd) in SINGULAR_FAMILIES.items():
                position = make_point(spec, *w0)
                velocity = make_point(spec, *wd)
                init = GeodesicState(position, velocity)
                traj = integrate_geodesic(provider, init, cfg.geodesic_t_end, cfg.tol, cfg.rho_min)
                artifacts["trajectories"][name] = traj
                t_star = singular_time(init)

                def arrival(traj=traj, t_star=t_star, name=name) -> CheckResult:
                    event = traj.event_t if traj.event_t is not None else math.inf
                    residual = abs(event - t_star) if t_star is not None else math.inf
                    ok = traj.flag == "SingularityReached" and residual <= 2.0 * cfg.rho_min
                    return CheckResult(
                        name=f"{name}_singular", suite=suite, max_residual=residual, threshold=2.0 * cfg.rho_min,
                        passed=ok, status="pass" if ok else "fail",
                        details={"flag": traj.flag, "event_t": traj.event_t, "t_star": t_star},
                    )

                checks.append(self._gate(done, suite, f"{name}_singular", arrival))
                checks.append(self._gate(
                    done, suite, f"{name}_affine_w",
                    lambda traj=traj, init=init, name=name: CheckResult.from_residual(
                        f"{name}_affine_w", suite, affine_residual(traj, init), 1e-6),
                ))
                checks.append(self._gate(
                    done, suite, f"{name}_norm_drift",
                    lambda traj=traj, name=name, t_star=t_star: CheckResult.from_residual(
                        f"{name}_norm_drift", suite, _drift_before(traj, 0.9 * (t_star or traj.t[-1])), 1e-6),
                ))

            def frame_curvature() -> CheckResult:
                samples = parallel_frame_curvature(spec, tol=cfg.tol)
                artifacts["frame_curvature"] = samples
                worst = max(s.relative_error for s in samples)
                return CheckResult.from_residual(
                    "frame_curvature", suite, worst, cfg.frame_curvature_tol,
                    details={"t": [s.t for s in samples], "value": [s.value for s in samples]},
                )

            checks.append(self._gate(done, suite, "frame_curvature", frame_curvature))
        else:
            position = make_point(spec, 1.0, 0.0, [0.2] * (spec.dim - 2))
            velocity = make_point(spec, -1.0, 0.5)
            init = GeodesicState(position, velocity)
            traj = integrate_geodesic(provider, init, cfg.smoke_t_end, cfg.tol, cfg.rho_min)
            artifacts["trajectories"]["smoke"] = traj
            checks.append(self._gate(
                done, suite, "complete_smoke",
                lambda: CheckResult.from_flag(
                    "complete_smoke", suite, traj.flag == "completed" and abs(traj.t[-1] - cfg.smoke_t_end) < 1e-9,
                    details={"flag": traj.flag, "t_end": float(traj.t[-1])},
                ),
            ))
            checks.append(self._gate(
                done, suite, "smoke_affine_w",
                lambda: CheckResult.from_residual("smoke_affine_w", suite, affine_residual(traj, init), 1e-6),
            ))

        def walker_transport() -> CheckResult:
            start = make_point(spec, 1.0, 0.0)
            velocity = make_point(spec, -0.5, 0.0)
            frame = np.zeros((spec.dim, 2))
            frame[Z1, 0] = frame[Z2, 1] = 1.0
            tf = transport_along_geodesic(provider, GeodesicState(start, velocity), FrameField(frame),
                                          np.linspace(0.0, 1.0, 11), cfg.tol)
            others = [k for k in range(spec.dim) if k not in (Z1, Z2)]
            leak = float(np.max(np.abs(tf.frames[:, others, :])))
            return CheckResult.from_residual("walker_transport", suite, leak, cfg.identity_tol,
                                             details={"gram_drift": tf.gram_drift()})

        checks.append(self._gate(done, suite, "walker_transport", walker_transport))
        return [SuiteReport(name=suite, checks=checks)], artifacts

    # ==================================================================
    # liealg
    # ==================================================================

    def liealg(
        self,
        n: int,
        b_p,
        b0,
        epsilons: Optional[Sequence[int]] = None,
        mutate: Optional[tuple[str, str, str]] = None,
        spec: Optional[MetricSpec] = None,
    ) -> tuple[list[SuiteReport], dict]:
        cfg = self.config
        suite = "liealg"
        done: dict[str, CheckResult] = {}
        alg = lie_model.build_algebra(n, b_p, b0, epsilons)
        if mutate is not None:
            alg = lie_model.mutate_bracket(alg, *mutate)
        artifacts: dict = {"algebra": lie_model.export_algebra(alg)}

        def jacobi() -> CheckResult:
            residual = lie_model.jacobi_residual(alg)
            return CheckResult.from_residual("jacobi_exact", suite, float(residual), 0.0,
                                             details={"exact": str(residual)})

        def structure() -> CheckResult:
            diag = lie_model.structure_diagnostics(alg)
            artifacts["structure"] = diag
            ok = (
                diag["solvable"] and diag["derived_length"] is not None and diag["derived_length"] <= 3
                and not diag["nilpotent"] and diag["nilradical_is_ideal"] and diag["nilradical_two_step"]
                and diag["nilradical_contains_derived"] and diag["nilradical_maximal"] and diag["heisenberg"]
            )
            return CheckResult.from_flag("structure", suite, ok, details=diag)

        def k_sub() -> CheckResult:
            res = lie_model.k_subalgebra(alg).checks()
            return CheckResult.from_residual("k_subalgebra", suite, max(res.values()), cfg.strict_tol, details=res)

        def k_geodesics() -> CheckResult:
            k = math.sqrt(abs(float(alg.b_p)))
            forward = lie_model.k_geodesic(float(alg.b_p), (1.0, 0.0), 2.0 * k, cfg.tol)
            blowing = lie_model.k_geodesic(float(alg.b_p), (-1.0, 0.0), 2.0 * k, cfg.tol)
            artifacts["k_geodesic"] = {"k": k, "forward": forward, "blowing": blowing}
            fits = {
                "forward_x": forward.fit_report(k)["x"],
                "blowing_x": blowing.fit_report(k)["x"],
            }
            flags_ok = forward.flag == "completed" and blowing.flag == "BlowUp"
            event_ok = blowing.event_t is not None and blowing.event_t <= k
            worst = max(fits.values())
            ok = flags_ok and event_ok and worst <= 1e-6
            return CheckResult(
                name="k_geodesic", suite=suite, max_residual=worst, threshold=1e-6, passed=ok,
                status="pass" if ok else "fail",
                details={**fits, "blowing_flag": blowing.flag, "blowing_event_t": blowing.event_t, "c": blowing.c},
            )

        def derived() -> CheckResult:
            d = lie_model.derive_algebra(spec)
            mismatches = d.compare(alg)
            worst = max(d.hol_residual, d.jacobi())
            ok = not mismatches and worst <= cfg.identity_tol
            return CheckResult(
                name="derived_from_geometry", suite=suite, max_residual=worst, threshold=cfg.identity_tol,
                passed=ok, status="pass" if ok else "fail", details={"mismatches": mismatches},
            )

        def matrix_table() -> CheckResult:
            rep = lie_model.matrix_rep_check(alg, seed=cfg.seed)
            return CheckResult(
                name="matrix_table", suite=suite, max_residual=rep["linearity"], passed=not rep["mismatches"],
                status="pass" if not rep["mismatches"] else "fail", diagnostic=True, details=rep,
            )

        checks = [
            self._gate(done, suite, "jacobi_exact", jacobi),
            self._gate(done, suite, "structure", structure, ("jacobi_exact",)),
            self._gate(done, suite, "k_subalgebra", k_sub, ("jacobi_exact",)),
            self._gate(done, suite, "k_geodesic", k_geodesics),
        ]
        if spec is not None:
            checks.append(self._gate(done, suite, "derived_from_geometry", derived, ("jacobi_exact",)))
        checks.append(self._gate(done, suite, "matrix_table", matrix_table))
        return [SuiteReport(name=suite, checks=checks)], artifacts

    # ==================================================================
    # wave
    # ==================================================================

    def wave_points(self, spec: PlaneWaveSpec, count: Optional[int] = None) -> list[np.ndarray]:
        rng = self.rng(2)
        count = self.config.samples if count is None else count
        pts = []
        for _ in range(count):
            u = rng.uniform(*WAVE_U_SPAN)
            rest = rng.uniform(-1.0, 1.0, size=spec.dim - 1)
            pts.append(np.concatenate([[u], rest]))
        return pts

    def wave(self, spec: PlaneWaveSpec) -> tuple[list[SuiteReport], dict]:
        cfg = self.config
        suite = "wave"
        done: dict[str, CheckResult] = {}
        points = self.wave_points(spec, min(cfg.samples, 20))
        artifacts: dict = {}
        fields = lorentz_waves.oscillator_killing_fields(spec, WAVE_U_SPAN)
        extra = lorentz_waves.extra_killing_fields(spec)

        def killing() -> CheckResult:
            per_field = {
                f.name: max(lorentz_waves.killing_residual(spec, f, p) for p in points)
                for f in fields + extra
            }
            return CheckResult.from_residual("killing_fields", suite, max(per_field.values()), cfg.killing_tol,
                                             details=per_field)

        def translation_control() -> CheckResult:
            shifted = []
            for p in points:
                X = np.zeros(spec.dim)
                X[lorentz_waves.wave_x_index(0)] = 1.0
                md = lorentz_waves.wave_derivatives(spec, p)
                shifted.append(float(np.max(np.abs(np.einsum("c,cab->ab", X, md.dg)))))
            worst = max(shifted)
            return CheckResult(
                name="translation_control", suite=suite, max_residual=worst, threshold=0.1,
                passed=worst >= 0.1, status="pass" if worst >= 0.1 else "fail", diagnostic=True,
                details={"field": "d_x1"},
            )

        def heisenberg() -> CheckResult:
            table = lorentz_waves.heisenberg_table(spec, points, fields)
            n = spec.n
            eps = np.diag(np.asarray(spec.signs, dtype=float))
            expected = np.block([[np.zeros((n, n)), eps], [-eps, np.zeros((n, n))]])
            res = {
                "bracket": table["bracket_residual"],
                "wronskian_drift": table["wronskian_drift"],
                "wronskian_initial": float(np.max(np.abs(table["wronskian"] - expected))),
            }
            ok = res["bracket"] <= cfg.killing_tol and res["wronskian_drift"] <= cfg.identity_tol \
                and res["wronskian_initial"] <= cfg.identity_tol and table["rank"] == 2 * n
            artifacts["wronskian"] = table["wronskian"].tolist()
            return CheckResult(
                name="heisenberg", suite=suite, max_residual=max(res.values()), threshold=cfg.killing_tol,
                passed=ok, status="pass" if ok else "fail", details={**res, "rank": table["rank"]},
            )

        reports = self._map(lambda p: lorentz_waves.wave_curvature_and_symmetry(spec, p), points)

        def curvature() -> CheckResult:
            worst = max(max(r["curvature_residual"], r["ricci_residual"]) for r in reports)
            return CheckResult.from_residual("curvature", suite, worst, cfg.tol)

        def symmetry() -> CheckResult:
            constant = spec.profile.kind == "constant" or (
                spec.profile.kind == "polynomial" and not np.any(np.asarray(spec.profile.matrices[1:]))
            )
            worst = max(r["nabla_R"] for r in reports)
            ok = worst <= cfg.tol if constant else worst > cfg.tol
            return CheckResult(
                name="locally_symmetric", suite=suite, max_residual=worst, threshold=cfg.tol, passed=ok,
                status="pass" if ok else "fail", details={"expect_symmetric": constant},
            )

        def vsi() -> CheckResult:
            worst = max(max(abs(v) for v in r["invariants"].values()) for r in reports)
            return CheckResult.from_residual("vsi", suite, worst, cfg.identity_tol)

        def ssi() -> CheckResult:
            res_list = [lorentz_waves.ssi_structure_check(spec, p) for p in points]
            res = {k: max(r[k] for r in res_list) for k in res_list[0]}
            return CheckResult.from_residual("homogeneous_structure", suite, max(res.values()), cfg.identity_tol,
                                             details=res)

        def smoke() -> CheckResult:
            provider = lorentz_waves.PlaneWaveGeometry(spec)
            if spec.profile.kind == "scale_invariant":
                start = np.array([1.0, 0.0] + [0.5] * spec.n)
                velocity = np.zeros(spec.dim)
                velocity[lorentz_waves.U_IDX] = -1.0
                traj = integrate_geodesic(provider, GeodesicState(start, velocity), cfg.geodesic_t_end,
                                          cfg.tol, cfg.rho_min)
                artifacts["trajectory"] = traj
                ok = traj.flag == "SingularityReached"
                return CheckResult.from_flag("incomplete_smoke", suite, ok,
                                             details={"flag": traj.flag, "event_t": traj.event_t})
            start = np.array([0.0, 0.0] + [0.5] * spec.n)
            velocity = np.zeros(spec.dim)
            velocity[lorentz_waves.U_IDX] = 0.1
            velocity[lorentz_waves.V_IDX] = 1.0
            traj = integrate_geodesic(provider, GeodesicState(start, velocity), cfg.smoke_t_end, cfg.tol,
                                      cfg.rho_min)
            artifacts["trajectory"] = traj
            return CheckResult.from_flag("complete_smoke", suite, traj.flag == "completed",
                                         details={"flag": traj.flag, "t_end": float(traj.t[-1])})

        checks = [
            self._gate(done, suite, "killing_fields", killing),
            self._gate(done, suite, "translation_control", translation_control),
            self._gate(done, suite, "heisenberg", heisenberg, ("killing_fields",)),
            self._gate(done, suite, "curvature", curvature),
            self._gate(done, suite, "locally_symmetric", symmetry),
            self._gate(done, suite, "vsi", vsi),
        ]
        if spec.profile.kind == "scale_invariant":
            checks.append(self._gate(done, suite, "homogeneous_structure", ssi))
        if spec.profile.kind in ("constant", "scale_invariant"):
            checks.append(self._gate(done, suite, "smoke", smoke))
        return [SuiteReport(name=suite, checks=checks)], artifacts

    # ==================================================================
    # quaternion
    # ==================================================================

    def quaternion(self, p: int, q: int, xi: Optional[Sequence[int]] = None) -> tuple[list[SuiteReport], dict]:
        cfg = self.config
        suite = "quaternion"
        done: dict[str, CheckResult] = {}
        triple = quaternionic.build_flat_model(p, q)
        xi = list(xi) if xi is not None else quaternionic.default_xi(p, q)
        quaternionic.check_isotropic(triple, xi)
        dim = triple.dim
        artifacts: dict = {}

        def model() -> CheckResult:
            res = triple.residuals()
            res["omega_rotation"] = quaternionic.omega_rotation_residual(triple, seed=cfg.seed)
            return CheckResult.from_residual("quaternionic_model", suite, max(res.values()), cfg.identity_tol, details=res)

        def structure() -> CheckResult:
            g, _ = triple.numeric()
            S = quaternionic.qk_structure_S(triple, xi)
            v = np.asarray(xi, dtype=float)
            rng = self.rng(3)
            comm = max(
                quaternionic.flat_commutator_residual(triple, xi, rng.standard_normal(dim), rng.standard_normal(dim))
                for _ in range(10)
            )
            res = {
                "metric_skew": quaternionic.s_metric_skew_residual(S, g),
                "S_xi_xi": float(np.max(np.abs(np.einsum("kij,i,j->k", S, v, v)))),
                "nabla_xi_rule": quaternionic.nabla_xi_residual(triple, xi, seed=cfg.seed),
                "flat_commutator": comm,
            }
            return CheckResult.from_residual("structure_tensor", suite, max(res.values()), cfg.identity_tol, details=res)

        def flatness() -> CheckResult:
            report = quaternionic.flatness_report(p, q, xi)
            control = quaternionic.flatness_report(p, q, xi, quaternionic=False)
            artifacts["flatness"] = report
            artifacts["control"] = control
            dims = report["kernel_dims"]
            expected = {
                "full": 0,
                "theta_only": dim - 1,
                "theta_J1": 1,
                "theta_zero": dim * (dim - 1) // 2,
            }
            ok = (
                dims == expected and report["constraint_rank"] == 4 and report["forces_flat"]
                and report["hyper_kahler"]["forces_flat"] and not control["forces_flat"]
            )
            return CheckResult.from_flag(
                "flatness", suite, ok,
                details={"kernel_dims": dims, "expected": expected, "forces_flat": report["forces_flat"],
                         "control_forces_flat": control["forces_flat"]},
            )

        def rotation_invariance() -> CheckResult:
            rotated = quaternionic.rotate_triple(triple, quaternionic.cayley_rotation(1, 2, 3))
            scaled = [3 * x for x in xi]
            dims = [
                quaternionic.wedge_kernel_dimension(quaternionic.wedge_system(rotated, xi, "full")),
                quaternionic.wedge_kernel_dimension(quaternionic.wedge_system(triple, scaled, "full")),
            ]
            return CheckResult.from_flag("kernel_invariance", suite, dims == [0, 0], details={"dims": dims})

        checks = [
            self._gate(done, suite, "quaternionic_model", model),
            self._gate(done, suite, "structure_tensor", structure, ("quaternionic_model",)),
            self._gate(done, suite, "flatness", flatness, ("quaternionic_model",)),
            self._gate(done, suite, "kernel_invariance", rotation_invariance, ("quaternionic_model",)),
        ]
        return [SuiteReport(name=suite, checks=checks)], artifacts
