"""
Integration tests for the suite runner and the command orchestrator.
"""
import json

import numpy as np
import pytest

from config import DEFAULT_SPECS_DIR
from engine.metric_family import make_point
from pipeline import CSVManager, SuiteProcessor, SuiteRunner


@pytest.fixture
def processor(test_config):
    return SuiteProcessor(test_config)


@pytest.mark.integration
class TestVerify:
    """verify over the bundled complex-wave specs."""

    @pytest.mark.parametrize("name", ["singular_n0", "singular_n1", "singular_n2", "cw_analog_n1", "flat_n1"])
    def test_bundled_specs_pass(self, processor, name):
        doc = processor.verify(DEFAULT_SPECS_DIR / f"{name}.cfg")
        assert doc.failures == []
        assert doc.passed
        assert (processor.config.output_dir / "verify_report.json").exists()

    def test_broken_cauchy_riemann_fails_once(self, processor):
        """Test a non-holomorphic coupling yields the one hypothesis failure."""
        doc = processor.verify(DEFAULT_SPECS_DIR / "broken_cr.cfg")
        assert doc.failures == ["metric.cauchy_riemann"]
        assert doc.skipped_count > 0
        metric = next(s for s in doc.suites if s.name == "metric")
        ricci = next(c for c in metric.checks if c.name == "ricci_flat")
        assert ricci.status == "skipped"

    def test_single_suite(self, processor):
        doc = processor.verify(DEFAULT_SPECS_DIR / "singular_n0.cfg", suite="walker")
        assert [s.name for s in doc.suites] == ["walker"]

    def test_same_seed_same_bytes(self, test_config, temp_dir):
        """Test two runs with the same inputs write identical reports."""
        outputs = []
        for label in ("a", "b"):
            test_config.output_dir = temp_dir / label
            doc = SuiteProcessor(test_config).verify(DEFAULT_SPECS_DIR / "singular_n1.cfg")
            outputs.append((temp_dir / label / "verify_report.json").read_bytes())
            assert doc.seed == test_config.seed
        assert outputs[0] == outputs[1]

    def test_report_echoes_spec(self, processor):
        processor.verify(DEFAULT_SPECS_DIR / "singular_n2.cfg")
        report = json.loads((processor.config.output_dir / "verify_report.json").read_text())
        assert report["spec"]["n"] == 2
        assert report["samples"] == processor.config.samples
        assert report["passed"]


@pytest.mark.integration
class TestOtherCommands:
    """holonomy, geodesic, liealg, wave, quaternion and plotdata."""

    def test_holonomy(self, processor):
        doc = processor.holonomy(DEFAULT_SPECS_DIR / "singular_n2.cfg")
        assert doc.passed
        assert doc.artifacts["normal_form"]["sign"] in (1, -1)

    def test_flat_holonomy_is_trivial(self, processor):
        doc = processor.holonomy(DEFAULT_SPECS_DIR / "flat_n1.cfg")
        names = [c.name for c in doc.suites[0].checks]
        assert "su11_normal_form" not in names
        assert doc.suites[0].checks[0].details["expected"] == 0

    def test_geodesic_writes_trajectories(self, processor):
        doc = processor.geodesic(DEFAULT_SPECS_DIR / "singular_n0.cfg")
        assert doc.passed
        out = processor.config.output_dir
        for name in ("geodesic_w1_family.csv", "geodesic_w2_family.csv", "frame_curvature.csv"):
            assert (out / name).exists()
        rows = CSVManager().load_dicts(out / "geodesic_w1_family.csv")
        assert rows[-1]["flag"] == "SingularityReached"

    @pytest.mark.parametrize("name", ["singular_n0", "singular_n1", "singular_n2", "cw_analog_n1"])
    def test_holonomy_bundled_specs(self, processor, name):
        """Test every curved bundled spec has a one-dimensional holonomy span."""
        doc = processor.holonomy(DEFAULT_SPECS_DIR / f"{name}.cfg")
        assert doc.failures == []
        dimension = next(c for c in doc.suites[0].checks if c.name == "dimension")
        assert dimension.details["dims"] == [1]

    @pytest.mark.parametrize("name", ["singular_n1", "singular_n2"])
    def test_geodesic_bundled_singular_specs(self, processor, name):
        doc = processor.geodesic(DEFAULT_SPECS_DIR / f"{name}.cfg")
        assert doc.failures == []
        statuses = {c.name: c.status for c in doc.suites[0].checks}
        assert statuses["frame_curvature"] == "pass"
        for family in ("w1_family", "w2_family"):
            rows = CSVManager().load_dicts(processor.config.output_dir / f"geodesic_{family}.csv")
            assert rows[-1]["flag"] == "SingularityReached"

    @pytest.mark.parametrize("name", ["cw_analog_n1", "flat_n1"])
    def test_geodesic_bundled_complete_specs(self, processor, name):
        doc = processor.geodesic(DEFAULT_SPECS_DIR / f"{name}.cfg")
        assert doc.failures == []
        rows = CSVManager().load_dicts(processor.config.output_dir / "geodesic_smoke.csv")
        assert rows[-1]["flag"] == "completed"

    def test_liealg(self, processor):
        doc = processor.liealg(DEFAULT_SPECS_DIR / "singular_n1.cfg")
        assert doc.passed
        algebra = json.loads((processor.config.output_dir / "algebra.json").read_text())
        assert len(algebra["basis"]) == 7
        assert algebra["parameters"]["n"] == 1
        assert (processor.config.output_dir / "k_geodesic_blowing.csv").exists()

    def test_mutated_bracket_fails_jacobi_only(self, processor):
        """Test a flipped structure constant breaks Jacobi and skips the dependent checks."""
        doc = processor.liealg(DEFAULT_SPECS_DIR / "singular_n0.cfg", ["z1", "w2", "z2"])
        assert doc.failures == ["liealg.jacobi_exact"]
        statuses = {c.name: c.status for c in doc.suites[0].checks}
        assert statuses["structure"] == "skipped"
        assert statuses["k_subalgebra"] == "skipped"

    @pytest.mark.parametrize("name", ["wave_cw", "wave_ssi"])
    def test_wave(self, processor, name):
        doc = processor.wave(DEFAULT_SPECS_DIR / f"{name}.cfg")
        assert doc.passed
        assert (processor.config.output_dir / "wave_geodesic.csv").exists()

    def test_quaternion(self, processor):
        doc = processor.quaternion(1, 1)
        assert doc.passed
        assert doc.artifacts["flatness"]["forces_flat"]
        assert not doc.artifacts["control"]["forces_flat"]

    def test_plotdata_from_report(self, processor):
        processor.verify(DEFAULT_SPECS_DIR / "singular_n0.cfg", suite="walker")
        paths = processor.plotdata(report_path=processor.config.output_dir / "verify_report.json")
        assert [p.name for p in paths] == ["frame_curvature.csv", "geodesic_trace.csv"]
        rows = CSVManager().load_dicts(paths[0])
        assert len(rows) == 19


@pytest.mark.integration
class TestSuiteRunner:
    """Sampling is deterministic and independent of the thread count."""

    def test_threads_do_not_change_results(self, test_config, singular_n1):
        single = SuiteRunner(test_config).verify(singular_n1)
        test_config.threads = 4
        pooled = SuiteRunner(test_config).verify(singular_n1)
        assert [r.model_dump() for r in single] == [r.model_dump() for r in pooled]

    def test_sample_points_repeat(self, test_config, singular_n2):
        runner = SuiteRunner(test_config)
        first = runner.sample_points(singular_n2, 3)
        second = runner.sample_points(singular_n2, 3)
        assert all((a == b).all() for a, b in zip(first, second))

    def test_curvature_formula_residual_is_absolute(self, test_config, singular_n0, monkeypatch):
        """Test a shift in the curvature target shows up unscaled near the singular set."""
        import pipeline.suites as suites

        original = suites.laplacian_target
        monkeypatch.setattr(suites, "laplacian_target", lambda spec, point: original(spec, point) + 1e-8)
        point = make_point(singular_n0, 0.25, 0.0)
        X = np.array([0.3, -1.1, 0.4, 0.7])
        bundle = SuiteRunner(test_config)._point_bundle(singular_n0, (10**6, point, X, X))
        assert bundle["curvature_formula"] == pytest.approx(5e-9, rel=1e-2)
        assert bundle["curvature_formula"] > test_config.tol

    def test_jacobi_square_within_absolute_tolerance(self, test_config, singular_n2):
        point = make_point(singular_n2, 0.3, 0.4, [0.5, -0.5, 0.2, 0.1])
        X = np.linspace(-1.0, 1.0, singular_n2.dim)
        bundle = SuiteRunner(test_config)._point_bundle(singular_n2, (10**6, point, X, X))
        assert bundle["jacobi_square"] <= test_config.tol
        assert bundle["curvature_formula"] <= test_config.tol
