import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfcx

from distrelax.errors import DomainError
from distrelax.kernel import KernelAccessor
from distrelax.measure import AtomSpec, MeasureSpec, validate
from distrelax.mlf import relaxation_single_order
from distrelax.spectral import (SpectralDensity, check_complete_monotonicity, check_grid,
                                divided_difference_signs, numerical_laplace, solve_spectral,
                                spectral_density_eval)
from distrelax.stepping import richardson_refine, solve_stepping

from .conftest import density, measure

ALL = ["half", "const", "power_nu1", "power_nu_half", "powexp", "geo10", "step", "mixed"]


def test_single_atom_at_one():
    s = solve_spectral(measure("half"), 1.0, [1.0], density=density("half"))
    # E_{1/2}(-1) = e erfc(1) = erfcx(1)
    assert s.u[0] == pytest.approx(erfcx(1.0), rel=1e-12)
    assert erfcx(1.0) == pytest.approx(0.4275836, abs=1e-7)


@pytest.mark.parametrize("name", ALL)
def test_initial_value(name):
    s = solve_spectral(measure(name), 1.0, [0.0, 1e-300, 1e-30], density=density(name))
    assert s.u[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(s.u <= 1.0 + 1e-15)


@pytest.mark.parametrize("name", ALL)
def test_output_strictly_decreasing(name):
    s = solve_spectral(measure(name), 1.0, np.logspace(-4, 12, 80), density=density(name))
    assert np.all(np.diff(s.u) < 0) and np.all(s.u > 0) and np.all(s.u <= 1)


def test_phi_example():
    assert spectral_density_eval(measure("half"), 1.0, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("name", ALL)
def test_phi_non_negative_and_normalized(name):
    d = density(name)
    assert np.all(d(np.logspace(-12, 12, 2001)) >= 0)
    assert d.normalization() == pytest.approx(1.0, abs=1e-6)


def test_phi_single_atom_closed_form():
    # delta_{1/2}: A = 0, B = sqrt(r), phi = sqrt(r) / (pi r (1 + r))
    r = np.logspace(-6, 6, 50)
    assert np.allclose(density("half")(r), 1 / (math.pi * np.sqrt(r) * (1 + r)), rtol=1e-13, atol=0)


def test_constant_density_vs_stepping():
    m = measure("const")
    h, T = 0.0025, 10.0
    ref = richardson_refine(solve_stepping(m, 1.0, 2 * h, T), solve_stepping(m, 1.0, h, T))
    sel = ref.t >= 0.01 - 1e-12
    s = solve_spectral(m, 1.0, ref.t[sel], density=density("const"))
    assert np.max(np.abs(ref.u[sel] / s.u - 1)) <= 1e-3


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("lam", [0.3, 1.0, 4.0])
def test_single_atom_reduction(alpha, lam):
    m = validate(MeasureSpec(atoms=(AtomSpec(alpha, 1.0),)))
    t = np.logspace(-2, 2, 25)
    s = solve_spectral(m, lam, t)
    ref = relaxation_single_order(alpha, lam, t)
    assert np.max(np.abs(s.u / ref - 1)) <= 1e-6


def test_rate_ordering():
    t = np.logspace(-3, 10, 60)
    for name in ["const", "geo10", "mixed"]:
        lo = solve_spectral(measure(name), 0.5, t)
        hi = solve_spectral(measure(name), 2.0, t)
        assert np.all(lo.u > hi.u)


@pytest.mark.parametrize("name", ["half", "const"])
def test_complete_monotonicity(name):
    d = density(name)
    rep = check_complete_monotonicity(lambda g: solve_spectral(measure(name), 1.0, g, density=d),
                                      np.logspace(-2, 2, 60), max_order=4, density=d)
    assert rep.passed, rep.failures
    assert rep.phi_points == 10_000


def test_cm_check_flags_non_monotone():
    from distrelax.spectral import SolutionSeries
    t = np.linspace(0.1, 3, 40)
    bumpy = lambda g: SolutionSeries(g, np.exp(-g) * (1 + 0.05 * np.sin(6 * g)), "x", 1.0, 0.0)
    rep = check_complete_monotonicity(bumpy, t, max_order=3)
    assert not rep.passed and rep.failures


def test_divided_differences_of_exponential():
    t = np.linspace(0, 2, 21)
    for j in range(1, 5):
        d = divided_difference_signs(t, np.exp(-t), j)
        assert np.all(d > 0)


@pytest.mark.parametrize("name", ["half", "const", "geo10"])
def test_laplace_consistency(name):
    m = measure(name)
    p = np.array([0.1, 0.3, 1.0, 3.0, 10.0])
    num = numerical_laplace(lambda t: density(name).laplace(t)[0], p)
    K = KernelAccessor(m).laplace_symbol(p)
    assert np.max(np.abs(num / (K / (p * K + 1.0)) - 1)) <= 1e-3


def test_numerical_laplace_exponential():
    p = np.array([0.2, 1.0, 5.0])
    assert np.allclose(numerical_laplace(lambda t: np.exp(-t), p), 1 / (p + 1), rtol=1e-10)


def test_error_estimates_are_small():
    s = solve_spectral(measure("powexp"), 1.0, np.logspace(-2, 12, 30), density=density("powexp"))
    assert np.all(s.error < 1e-8 * s.u)


def test_grid_validation():
    with pytest.raises(DomainError):
        check_grid([1.0, 0.5])
    with pytest.raises(DomainError):
        check_grid([-1.0])
    with pytest.raises(DomainError):
        SpectralDensity(measure("half"), 0.0)
    with pytest.raises(DomainError):
        density("half")(-1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.1, 10.0), st.floats(1e-3, 1e3))
def test_single_atom_property(alpha, lam, t):
    m = validate(MeasureSpec(atoms=(AtomSpec(alpha, 1.0),)))
    u = solve_spectral(m, lam, [t]).u[0]
    assert u == pytest.approx(float(relaxation_single_order(alpha, lam, t)), rel=1e-6)


def test_extreme_times_single_atom():
    # the core is widened on demand so exp(-t r) stays resolved near r = 1/t
    t = np.logspace(50, 300, 11)
    s = solve_spectral(measure("half"), 1.0, t)
    assert np.max(np.abs(s.u / erfcx(np.sqrt(t)) - 1)) < 1e-12


def test_extreme_times_error_estimate():
    m = measure("geo10")
    d = SpectralDensity(m, 1.0)
    s = solve_spectral(m, 1.0, np.logspace(60, 120, 7), density=d)
    assert np.all(s.error < 1e-10 * s.u)
    assert d._left <= -math.log(1e120) - 20


def test_tiny_times_leading_term():
    # delta_{0.1}: 1 - u = lam t^0.1 / Gamma(1.1) + O(t^0.2)
    m = validate(MeasureSpec(atoms=(AtomSpec(0.1, 1.0),)))
    t = np.logspace(-200, -60, 8)
    s = solve_spectral(m, 1.0, t)
    assert np.allclose(1 - s.u, t ** 0.1 / math.gamma(1.1), rtol=1e-4)
