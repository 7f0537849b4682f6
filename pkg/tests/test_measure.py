import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from distrelax.errors import (AtomOutOfRange, EmptyMeasure, InfiniteMass, MassAtZeroOnly,
                              NonPositiveWeight)
from distrelax.measure import (AtomSpec, Constant, GeometricAtoms, MeasureSpec, PowerExponential,
                               PowerLaw, Tabulated, moment_gf, total_mass, validate)


def test_atom_at_one_rejected():
    with pytest.raises(AtomOutOfRange):
        validate(MeasureSpec(atoms=(AtomSpec(1.0, 1.0),)))


def test_single_atom_valid():
    m = validate(MeasureSpec(atoms=(AtomSpec(0.5, 1.0),)))
    assert total_mass(m) == 1.0
    assert m.locations.tolist() == [0.5]


def test_geometric_toward_zero():
    gen = GeometricAtoms(0.3, 0.5, 0.5, 0.5, tail_tol=1e-12)
    m = validate(MeasureSpec(atoms=(gen,)))
    assert 35 <= m.locations.size <= 45
    # sum 0.5 * 0.5**n over n >= 0 is 1
    assert total_mass(m) == pytest.approx(1.0, abs=1e-12)
    assert m.tail_bound < 1e-12
    assert np.all(np.diff(gen.materialize()[0]) < 0)


def test_geometric_toward_one_increasing():
    locs, wts, _ = GeometricAtoms(0.3, 0.5, 0.5, 0.5, direction="toward1").materialize()
    assert np.all(np.diff(locs) > 0) and locs[-1] < 1


@pytest.mark.parametrize("s", [0.2, 0.5, 0.9])
def test_tail_bound_dominates_discarded_mass(s):
    gen = GeometricAtoms(0.4, 0.8, 1.0, s, tail_tol=1e-6)
    _, wts, tail = gen.materialize()
    discarded = 1.0 / (1 - s) - math.fsum(wts)
    assert tail >= discarded * (1 - 1e-9)
    assert tail < 1e-6


def test_non_summable_generator():
    with pytest.raises(InfiniteMass):
        validate(MeasureSpec(atoms=(GeometricAtoms(0.3, 0.5, 1.0, 1.0),)))


@pytest.mark.parametrize("spec, err", [
    (MeasureSpec(atoms=(AtomSpec(0.5, 0.0),)), NonPositiveWeight),
    (MeasureSpec(atoms=(AtomSpec(0.5, -1.0),)), NonPositiveWeight),
    (MeasureSpec(atoms=(AtomSpec(-0.1, 1.0),)), AtomOutOfRange),
    (MeasureSpec(atoms=(AtomSpec(0.0, 1.0),)), MassAtZeroOnly),
    (MeasureSpec(atoms=(AtomSpec(0.0, 1.0), AtomSpec(0.5, 1.0))), AtomOutOfRange),
    (MeasureSpec(), EmptyMeasure),
    (MeasureSpec(atoms=(AtomSpec(0.5, math.inf),)), InfiniteMass),
])
def test_validation_errors(spec, err):
    with pytest.raises(err):
        validate(spec)


def test_error_codes_are_names():
    with pytest.raises(AtomOutOfRange) as info:
        validate({"atoms": [{"location": 1.0, "weight": 1.0}]})
    assert info.value.code == "AtomOutOfRange"


def test_total_mass_examples():
    assert total_mass(validate(MeasureSpec(atoms=(AtomSpec(0.5, 2.0),)))) == 2.0
    assert total_mass(validate(MeasureSpec(density=Constant(1.0)))) == pytest.approx(1.0, rel=1e-12)
    assert total_mass(validate(MeasureSpec(density=PowerLaw(1.0, 1.0)))) == pytest.approx(0.5, rel=1e-12)


def test_power_exponential_mass_against_quad():
    d = PowerExponential(1.0, 0.5, 0.2)
    ref, _ = integrate.quad(lambda a: a ** 0.5 * math.exp(-0.2 / a), 0, 1, epsabs=0, epsrel=1e-13)
    assert total_mass(validate(MeasureSpec(density=d))) == pytest.approx(ref, rel=1e-10)


def test_mass_additive():
    m = validate(MeasureSpec(atoms=(AtomSpec(0.2, 0.7), AtomSpec(0.6, 0.1)), density=PowerLaw(3.0, 2.0)))
    assert total_mass(m) == pytest.approx(0.8 + 1.0, rel=1e-12)
    assert total_mass(m) == pytest.approx(m.atom_mass() + m.density_mass(), rel=1e-12)


def test_coincident_atoms_merge():
    m = validate(MeasureSpec(atoms=(AtomSpec(0.4, 1.0), AtomSpec(0.4, 2.0))))
    assert m.locations.tolist() == [0.4] and m.weights.tolist() == [3.0]


def test_arrays_read_only():
    m = validate(MeasureSpec(atoms=(AtomSpec(0.4, 1.0),)))
    with pytest.raises(ValueError):
        m.locations[0] = 0.3


@pytest.mark.parametrize("z", [-3.0, 0.7, 5.0])
def test_moment_gf_examples(z):
    m = validate(MeasureSpec(atoms=(AtomSpec(0.35, 1.0),)))
    assert moment_gf(m, z) == pytest.approx(math.exp(0.35 * z), rel=1e-15)
    c = validate(MeasureSpec(density=Constant(1.0)))
    assert moment_gf(c, z) == pytest.approx(math.expm1(z) / z, rel=1e-11)


def test_moment_gf_at_zero_is_mass():
    m = validate(MeasureSpec(atoms=(AtomSpec(0.35, 0.4),), density=PowerLaw(1.0, -0.5)))
    assert moment_gf(m, 0.0) == pytest.approx(total_mass(m), rel=1e-12)


def test_tabulated_density():
    alpha = tuple(np.linspace(0, 1, 11))
    m = validate(MeasureSpec(density=Tabulated(alpha, tuple(2 * a for a in alpha))))
    assert total_mass(m) == pytest.approx(1.0, rel=1e-10)


def test_json_round_trip():
    spec = MeasureSpec(atoms=(AtomSpec(0.4, 1.0), GeometricAtoms(0.3, 0.5, 0.5, 0.5, direction="toward1")),
                       density=PowerExponential(1.0, 0.0, 1.0))
    again = MeasureSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec
    assert validate(again) == validate(spec)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 0.99), st.floats(0.01, 10.0)), min_size=1, max_size=6),
       st.floats(-20, 20), st.floats(0.01, 5))
def test_moment_gf_increasing(atoms, z, dz):
    m = validate(MeasureSpec(atoms=tuple(AtomSpec(a, w) for a, w in atoms)))
    assert moment_gf(m, z + dz) > moment_gf(m, z)
