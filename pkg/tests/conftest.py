import functools

import numpy as np
import pytest

from distrelax.measure import (AtomSpec, Constant, GeometricAtoms, MeasureSpec, PowerExponential,
                               PowerLaw, validate)
from distrelax.spectral import SpectralDensity

# ten atoms exactly: the tail tolerance sits just above the mass beyond n = 9
GEO10 = GeometricAtoms(0.5, 0.7, 0.3, 0.7, tail_tol=0.3 * 0.7 ** 10 / 0.3 * 1.0001)

SPECS = {
    "half": MeasureSpec(atoms=(AtomSpec(0.5, 1.0),)),
    "const": MeasureSpec(density=Constant(1.0)),
    "power_nu1": MeasureSpec(density=PowerLaw(1.0, 1.0)),
    "power_nu_half": MeasureSpec(density=PowerLaw(1.0, -0.5)),
    "powexp": MeasureSpec(density=PowerExponential(1.0, 0.0, 1.0)),
    "geo10": MeasureSpec(atoms=(GEO10,)),
    # atoms beta_n -> 0 and nu_n -> 1, beta_0 = nu_0 = 0.3
    "step": MeasureSpec(atoms=(GeometricAtoms(0.3, 0.5, 0.5, 0.5),
                               GeometricAtoms(0.3, 0.5, 0.5, 0.5, direction="toward1", start=1))),
    "mixed": MeasureSpec(atoms=(AtomSpec(0.3, 0.5),), density=PowerLaw(2.0, 2.0)),
}


@functools.lru_cache(maxsize=None)
def measure(name):
    return validate(SPECS[name])


@functools.lru_cache(maxsize=None)
def density(name, lam=1.0):
    d = SpectralDensity(measure(name), lam)
    d.table  # build once
    return d


@pytest.fixture(scope="session")
def get_measure():
    return measure


@pytest.fixture(scope="session")
def get_density():
    return density


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
