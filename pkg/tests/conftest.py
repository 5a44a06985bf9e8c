"""Shared fixtures: the two reference fields and their solved equilibria."""

import pytest

from loggas import Potential, solve_mrs


@pytest.fixture(scope="session")
def gue():
    return Potential((0.0, 0.0, 0.5))


@pytest.fixture(scope="session")
def quartic():
    return Potential((0.0, 0.0, 0.0, 0.0, 1.0))


@pytest.fixture(scope="session")
def gue_eq(gue):
    return solve_mrs(gue)


@pytest.fixture(scope="session")
def quartic_eq(quartic):
    return solve_mrs(quartic)
