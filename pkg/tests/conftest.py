"""
Pytest configuration and shared fixtures for the pwlab test suite.
"""
import os
import shutil
import tempfile
from pathlib import Path
from typing import Generator

import numpy as np
import pytest

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
os.chdir(PROJECT_ROOT)

SPECS_DIR = PROJECT_ROOT / "defaults" / "specs"


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Provide a temporary directory for test files."""
    tmp_path = tempfile.mkdtemp(prefix="pwlab_test_")
    yield Path(tmp_path)
    shutil.rmtree(tmp_path, ignore_errors=True)


@pytest.fixture
def test_config(temp_dir: Path) -> "Config":
    """Provide a small, single-threaded configuration writing into temp_dir."""
    from config import Config

    config = Config()
    config.samples = 12
    config.seed = 7
    config.threads = 1
    config.smoke_t_end = 20.0
    config.output_dir = temp_dir / "output"
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def singular_n0():
    """Singular profile, n = 0, b0 = 4 (the bundled default)."""
    from models.spec import MetricSpec, ProfileKind
    return MetricSpec(n=0, profile=ProfileKind(variant="singular", b0=4.0), name="singular_n0")


@pytest.fixture
def singular_n1():
    """Singular profile with one holomorphic coupling h = w^2 - 1 + 0.5 i w^3."""
    from models.spec import Coupling, MetricSpec, ProfileKind
    return MetricSpec(
        n=1,
        epsilons=(1,),
        profile=ProfileKind(variant="singular", b0=4.0),
        couplings=(Coupling(coeffs=((-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.5))),),
        name="singular_n1",
    )


@pytest.fixture
def singular_n2():
    """Mixed signs, negative b0, two couplings and a harmonic addition to b."""
    from models.spec import Coupling, MetricSpec, ProfileKind
    return MetricSpec(
        n=2,
        epsilons=(1, -1),
        profile=ProfileKind(variant="singular", b0=-2.0, harmonic_extra=((0.0, 0.0), (0.3, -0.2))),
        couplings=(
            Coupling(coeffs=((0.5, 0.0), (0.0, 1.0))),
            Coupling(coeffs=((0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 1.0))),
        ),
        name="singular_n2",
    )


@pytest.fixture
def cw_analog_n1():
    from models.spec import Coupling, MetricSpec, ProfileKind
    return MetricSpec(
        n=1,
        epsilons=(1,),
        profile=ProfileKind(variant="cw_analog", b0=4.0),
        couplings=(Coupling(coeffs=((0.5, 0.0), (0.0, 1.0))),),
        name="cw_analog_n1",
    )


@pytest.fixture
def broken_cr():
    """r = s = w1: not the real/imaginary pair of a holomorphic function."""
    from models.spec import Coupling, MetricSpec, ProfileKind
    return MetricSpec(
        n=1,
        epsilons=(1,),
        profile=ProfileKind(variant="singular", b0=4.0),
        couplings=(Coupling(r=((1, 0, 1.0),), s=((1, 0, 1.0),)),),
        name="broken_cr",
    )


@pytest.fixture
def cahen_wallach():
    from models.spec import PlaneWaveSpec, WaveProfile
    return PlaneWaveSpec(
        n=2, profile=WaveProfile(kind="constant", matrices=(((1.0, 0.0), (0.0, -1.0)),)), name="wave_cw",
    )


@pytest.fixture
def scale_invariant_wave():
    from models.spec import PlaneWaveSpec, WaveProfile
    return PlaneWaveSpec(
        n=2, profile=WaveProfile(kind="scale_invariant", matrices=(((2.0, 0.0), (0.0, -2.0)),)), name="wave_ssi",
    )


# Configure pytest markers
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow tests")
