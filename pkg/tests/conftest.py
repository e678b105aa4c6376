import math

import pytest

from chiralwgm import wgm

MHZ = 2.0 * math.pi * 1e6

#: silica microresonator used throughout the mode tests
SILICA = dict(n0=1.45, R=20e-6, m=206)


@pytest.fixture(scope="session")
def silica_mode():
    return wgm.solve_resonance(wgm.ModeSpec(**SILICA))


@pytest.fixture(scope="session")
def silica_overlaps(silica_mode):
    return wgm.overlaps_at(silica_mode, wgm.surface_radius(silica_mode))
