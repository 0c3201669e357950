import numpy as np
import pytest

from quadagg import gallery
from quadagg.cones import spectral_context


@pytest.fixture(scope="session")
def quartic():
    return gallery.nested_quartic_triple()


@pytest.fixture(scope="session")
def quartic_ctx(quartic):
    return spectral_context(quartic)


@pytest.fixture(scope="session")
def modified():
    return gallery.modified_nested_quartic_triple()


@pytest.fixture(scope="session")
def cubic():
    return gallery.smooth_cubic_triple()


@pytest.fixture(scope="session")
def half_disk():
    return gallery.half_disk_triple()


@pytest.fixture(scope="session")
def split():
    return gallery.split_region_triple()


@pytest.fixture(scope="session")
def split_ctx(split):
    return spectral_context(split)


@pytest.fixture(scope="session")
def segment():
    return gallery.segment_triple()


@pytest.fixture(scope="session")
def full_line():
    return gallery.full_line_triple()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
