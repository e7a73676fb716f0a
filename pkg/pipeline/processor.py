"""
Command orchestrator.

SuiteProcessor loads a spec, runs the suites for one CLI command and writes
the results:

  1. Load and validate the spec file (SpecError on any problem)
  2. Run the command's suites through SuiteRunner
  3. Assemble the ReportDoc and compute its summary
  4. Write <command>_report.json plus the command's CSV files

Reports carry the spec echo, seed and sample count but no timing, so two
runs with the same inputs write byte-identical files.
"""
import json
import logging
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from config import TOOL_VERSION, Config
from engine.errors import SpecError
from engine.integrator import geodesic_integrate, incomplete_geodesic_start, parallel_frame_curvature
from engine.metric_family import coupling_jets, eval_profile_b, make_point
from models.report import ReportDoc, SuiteReport
from models.spec import MetricSpec, PlaneWaveSpec
from .csv_manager import CSVManager
from .spec_io import AnySpec, load_spec, spec_echo
from .suites import SuiteRunner

logger = logging.getLogger(__name__)

VERIFY_SUITES = ("metric", "kahler", "ambrose_singer", "vsi", "osserman", "walker")
PLOT_T_SAMPLES = tuple(float(t) for t in np.linspace(0.0, 0.9, 19))


class SuiteProcessor:
    """
    Runs one command end to end.

    Usage:
        processor = SuiteProcessor(config)
        doc = processor.verify()
        processor.write_report(doc)
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.runner = SuiteRunner(self.config)
        self.csv = CSVManager()

    # ------------------------------------------------------------------
    # Spec loading
    # ------------------------------------------------------------------

    def load(self, path: Optional[Path] = None) -> AnySpec:
        path = Path(path) if path is not None else self.config.spec_path
        spec = load_spec(path)
        logger.info("Loaded spec %s (%s)", path.name, spec.name or type(spec).__name__)
        return spec

    def _metric_spec(self, path: Optional[Path]) -> MetricSpec:
        spec = self.load(path)
        if not isinstance(spec, MetricSpec):
            raise SpecError("this command needs a complex-wave spec, got a plane wave")
        return spec

    def _wave_spec(self, path: Optional[Path]) -> PlaneWaveSpec:
        spec = self.load(path)
        if not isinstance(spec, PlaneWaveSpec):
            raise SpecError("the wave command needs a plane-wave spec (wave.* keys)")
        return spec

    def _doc(self, command: str, spec: Optional[AnySpec], suites: list[SuiteReport], artifacts: dict) -> ReportDoc:
        for report in suites:
            for check in report.checks:
                check.details = _plain(check.details)
        doc = ReportDoc(
            tool_version=TOOL_VERSION,
            command=command,
            spec=spec_echo(spec) if spec is not None else {},
            seed=self.config.seed,
            samples=self.config.samples,
            suites=suites,
            artifacts=_plain(artifacts),
        )
        doc.compute_summary()
        logger.info(
            "%s: %d checks, %d failed, %d skipped",
            command, doc.check_count, doc.failure_count, doc.skipped_count,
        )
        return doc

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def verify(self, spec_path: Optional[Path] = None, suite: Optional[str] = None) -> ReportDoc:
        if suite is not None and suite not in VERIFY_SUITES:
            raise SpecError(f"unknown suite {suite!r}; choose from {', '.join(VERIFY_SUITES)}")
        started = time.monotonic()
        logger.info("Step 1/3: Loading spec")
        spec = self._metric_spec(spec_path)
        logger.info("Step 2/3: Running suites (%d samples)", self.config.samples)
        reports = self.runner.verify(spec)
        if suite is not None:
            reports = [r for r in reports if r.name == suite]
        logger.info("Step 3/3: Writing report")
        doc = self._doc("verify", spec, reports, {})
        self.write_report(doc)
        logger.info("verify finished in %.2fs", time.monotonic() - started)
        return doc

    def holonomy(self, spec_path: Optional[Path] = None) -> ReportDoc:
        logger.info("Step 1/3: Loading spec")
        spec = self._metric_spec(spec_path)
        logger.info("Step 2/3: Computing holonomy")
        reports, artifacts = self.runner.holonomy(spec)
        logger.info("Step 3/3: Writing report")
        doc = self._doc("holonomy", spec, reports, artifacts)
        self.write_report(doc)
        return doc

    def geodesic(self, spec_path: Optional[Path] = None) -> ReportDoc:
        logger.info("Step 1/3: Loading spec")
        spec = self._metric_spec(spec_path)
        logger.info("Step 2/3: Integrating geodesics")
        reports, artifacts = self.runner.geodesics(spec)
        logger.info("Step 3/3: Writing report and trajectories")
        files = []
        for name, trajectory in artifacts.pop("trajectories").items():
            path = self.config.output_dir / f"geodesic_{name}.csv"
            self.csv.save_trajectory(path, trajectory)
            files.append(path.name)
        samples = artifacts.pop("frame_curvature")
        if samples:
            path = self.config.output_dir / "frame_curvature.csv"
            self.csv.save_frame_curvature(path, samples)
            files.append(path.name)
        doc = self._doc("geodesic", spec, reports, {"files": files})
        self.write_report(doc)
        return doc

    def liealg(
        self,
        spec_path: Optional[Path] = None,
        mutate: Optional[Sequence[str]] = None,
    ) -> ReportDoc:
        logger.info("Step 1/3: Loading spec")
        spec = self._metric_spec(spec_path)
        if spec.profile.variant != "singular":
            raise SpecError("the transvection algebra exists for the singular profile only")
        point = make_point(spec, 1.0, 0.0)
        b_p = float(eval_profile_b(spec, point).value)
        derivable = all(float(r.value) == 0.0 and float(s.value) == 0.0 for r, s in coupling_jets(spec, point))
        if not derivable:
            logger.warning("Couplings do not vanish at (1, 0); skipping the comparison with the geometry")
        logger.info("Step 2/3: Building algebra (n=%d, b_p=%r, b0=%r)", spec.n, b_p, spec.profile.b0)
        reports, artifacts = self.runner.liealg(
            spec.n, b_p, spec.profile.b0, spec.epsilons,
            mutate=tuple(mutate) if mutate else None,
            spec=spec if derivable else None,
        )
        logger.info("Step 3/3: Writing report, algebra and K geodesics")
        kg = artifacts.pop("k_geodesic", None)
        files = []
        if kg is not None:
            for name in ("forward", "blowing"):
                path = self.config.output_dir / f"k_geodesic_{name}.csv"
                self.csv.save_k_geodesic(path, kg[name], kg["k"])
                files.append(path.name)
        self._write_json(self.config.output_dir / "algebra.json", artifacts.pop("algebra"))
        files.append("algebra.json")
        artifacts["files"] = files
        doc = self._doc("liealg", spec, reports, artifacts)
        self.write_report(doc)
        return doc

    def wave(self, spec_path: Optional[Path] = None) -> ReportDoc:
        logger.info("Step 1/3: Loading spec")
        spec = self._wave_spec(spec_path)
        logger.info("Step 2/3: Running plane-wave suites")
        reports, artifacts = self.runner.wave(spec)
        logger.info("Step 3/3: Writing report")
        trajectory = artifacts.pop("trajectory", None)
        if trajectory is not None:
            path = self.config.output_dir / "wave_geodesic.csv"
            self.csv.save_trajectory(path, trajectory)
            artifacts["files"] = [path.name]
        doc = self._doc("wave", spec, reports, artifacts)
        self.write_report(doc)
        return doc

    def quaternion(self, p: int, q: int, xi: Optional[Sequence[int]] = None) -> ReportDoc:
        logger.info("Step 1/2: Running quaternionic model (%d, %d)", p, q)
        reports, artifacts = self.runner.quaternion(p, q, xi)
        logger.info("Step 2/2: Writing report")
        doc = self._doc("quaternion", None, reports, artifacts)
        self.write_report(doc)
        return doc

    def plotdata(self, spec_path: Optional[Path] = None, report_path: Optional[Path] = None) -> list[Path]:
        """
        Frame curvature samples and the incomplete geodesic trace. The spec
        comes from report_path's echo when given, else from spec_path.
        """
        if report_path is not None:
            report_path = Path(report_path)
            if not report_path.exists():
                raise SpecError(f"report file not found: {report_path}")
            echo = json.loads(report_path.read_text(encoding="utf-8")).get("spec") or {}
            try:
                spec = MetricSpec.model_validate(echo)
            except ValueError as exc:
                raise SpecError(f"report {report_path.name} does not echo a complex-wave spec") from exc
        else:
            spec = self._metric_spec(spec_path)
        if spec.profile.variant != "singular":
            raise SpecError("plot data follows the incomplete geodesic of a singular profile")

        logger.info("Step 1/2: Frame curvature along the incomplete geodesic")
        samples = parallel_frame_curvature(spec, PLOT_T_SAMPLES, self.config.tol)
        curvature_path = self.config.output_dir / "frame_curvature.csv"
        self.csv.save_frame_curvature(curvature_path, samples)

        logger.info("Step 2/2: Geodesic trace")
        trajectory = geodesic_integrate(
            spec, incomplete_geodesic_start(spec), self.config.geodesic_t_end, self.config.tol, self.config.rho_min,
        )
        trace_path = self.config.output_dir / "geodesic_trace.csv"
        self.csv.save_trajectory(trace_path, trajectory)
        return [curvature_path, trace_path]

    # ------------------------------------------------------------------
    # Output
    # ------------------------------------------------------------------

    def _write_json(self, path: Path, payload: dict) -> None:
        self.config.ensure_output_dir()
        indent = 2 if self.config.pretty_json else None
        path.write_text(json.dumps(payload, indent=indent, default=_jsonable) + "\n", encoding="utf-8")
        logger.debug("Wrote %s", path)

    def write_report(self, doc: ReportDoc) -> Path:
        path = self.config.output_dir / f"{doc.command}_report.json"
        self._write_json(path, json.loads(doc.model_dump_json()))
        logger.info("Saved report: %s", path)
        return path


def _plain(payload: dict) -> dict:
    return json.loads(json.dumps(payload, default=_jsonable))


def _jsonable(value):
    """Fallback for numpy and sympy scalars left in artifact dictionaries."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return str(value)
