import json

import numpy as np
import pytest

from quasikit.cauchy import ExtrapolationSchedule
from quasikit.maps import Identity, JoukowskiExterior, Side, TaylorInterior
from quasikit.series import FourierBoundaryData


@pytest.fixture
def unit_disk():
    yield Identity()


@pytest.fixture
def unit_disk_exterior():
    yield Identity(side=Side.EXTERIOR)


@pytest.fixture
def ellipse():
    yield JoukowskiExterior(t=0.5)


@pytest.fixture
def quadratic():
    yield TaylorInterior(coeffs=(1, 0.2))


@pytest.fixture
def trig_polynomial():
    # degree 8, fixed coefficients
    yield FourierBoundaryData.from_modes({n: complex(1, 0.5 * n) / (1 + n * n) for n in range(-8, 9) if n})


@pytest.fixture
def schedule():
    yield ExtrapolationSchedule()


@pytest.fixture
def ellipse_points(ellipse):
    theta = 2 * np.pi * (np.arange(10) + 0.25) / 10
    domain = ellipse.value(2.0 * np.exp(1j * theta))
    complement = ellipse.value(0.85 * np.exp(1j * theta))
    yield domain, complement


@pytest.fixture
def config_file(tmp_path):
    def write(**config):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        return path

    yield write
