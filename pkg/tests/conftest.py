import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(90817243)


def random_angles(rng, n=1):
    from spingauge import EulerAngles

    rows = np.column_stack([
        rng.uniform(-2 * np.pi, 2 * np.pi, n),
        rng.uniform(0.0, np.pi, n),
        rng.uniform(-2 * np.pi, 2 * np.pi, n),
    ])
    return [EulerAngles(*row) for row in rows]


def random_fiducial(rng, spin):
    from spingauge import make_fiducial

    raw = rng.normal(size=spin.dim) + 1j * rng.normal(size=spin.dim)
    return make_fiducial(spin, raw)
