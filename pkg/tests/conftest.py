import pathlib

import pytest

from longwire import DeviceProfile, Geometry, MeasurementConfig

DOCS_DIR = pathlib.Path(__file__).resolve().parent.parent / "docs"


@pytest.fixture
def profile():
    return DeviceProfile()


@pytest.fixture
def quiet_profile():
    """No Gaussian noise, no drift; only counter quantization remains."""
    return DeviceProfile(noise_sigma=0.0, drift_rate=0.0, drift_bound=0.0)


@pytest.fixture
def cfg13():
    return MeasurementConfig(log2_ticks=13)


@pytest.fixture
def cfg21():
    return MeasurementConfig(log2_ticks=21)


@pytest.fixture
def geom22():
    return Geometry(v_t=2, v_r=2, d=1)


@pytest.fixture
def docs_dir():
    return DOCS_DIR
