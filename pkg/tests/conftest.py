import numpy as np
import pytest

from ristrack import (AntennaGains, CarrierSpec, PolarPoint, RisLayout,
                      build_geometry)


@pytest.fixture(scope="session")
def geom():
    """Default full surface, shared across tests (read-only)."""
    return build_geometry(RisLayout())


@pytest.fixture(scope="session")
def tx():
    return PolarPoint(2.0, -30.0)


@pytest.fixture(scope="session")
def carrier():
    return CarrierSpec()


@pytest.fixture(scope="session")
def gains():
    return AntennaGains()


@pytest.fixture
def tiny_geom():
    """Single module of 3x4 elements (12 total), cheap enough for
    brute-force enumeration."""
    return build_geometry(RisLayout(modules_x=1, modules_y=1,
                                    elems_per_module_x=3,
                                    elems_per_module_y=4))


def single_element_geometry(width=0.02, height=0.02):
    """A 1x1 surface whose only element sits exactly at the origin."""
    return build_geometry(RisLayout(modules_x=1, modules_y=1,
                                    elems_per_module_x=1,
                                    elems_per_module_y=1,
                                    module_width=width,
                                    module_height=height))


@pytest.fixture
def one_elem_geom():
    g = single_element_geometry()
    assert np.allclose(g.element_positions, 0.0)
    return g
