"""Shared fixtures: one instance per corpus space, plus normalizing sequences."""

import math

import pytest

from pretangent import (
    CantorSpace,
    HalfLine,
    LacunarySpace,
    NormalizingSequence,
    PlanarRays,
    PolynomialCurve,
)


@pytest.fixture(scope="session")
def half_line():
    return HalfLine()


@pytest.fixture(scope="session")
def cantor0():
    return CantorSpace(marked=0)


@pytest.fixture(scope="session")
def cantor1():
    return CantorSpace(marked=1)


@pytest.fixture(scope="session")
def lacunary():
    return LacunarySpace()


@pytest.fixture(scope="session")
def perp_rays():
    return PlanarRays(theta=math.pi / 2)


@pytest.fixture(scope="session")
def parabola():
    # F(t) = (t, t**2)
    return PolynomialCurve(coefficients=[[0, 1], [0, 0, 1]])


@pytest.fixture()
def r_geometric():
    return NormalizingSequence.geometric()


@pytest.fixture()
def r_power3():
    return NormalizingSequence.power_of_three()
