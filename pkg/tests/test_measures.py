import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laplace_carleson.errors import DomainError, EmptyFamilyError
from laplace_carleson.measures import (Atomic, CarlesonBox, GridDensity, SquaresAtHeightOne,
                                       carleson_sup, load_measure, measure_from_json,
                                       scale_measure)


def brute_count(N, a, b):
    """Atoms n^2 + i in the box over [a, b]; they sit at height 1."""
    if b - a < 1:
        return 0
    return sum(1 for n in range(1, N + 1) if a <= n * n <= b)


def test_atom_in_unit_box():
    assert Atomic.point(0.5 + 0.5j).box_mass(CarlesonBox(0, 1)) == 1.0


def test_squares_box_examples():
    assert SquaresAtHeightOne(2).box_mass(CarlesonBox(0, 4)) == 2
    assert SquaresAtHeightOne(50).box_mass(CarlesonBox(2, 2.5)) == 0


def test_top_edge_and_sides_count():
    mu = Atomic.from_atoms([(0.0, 1.0, 1.0), (1.0, 1.0, 2.0), (0.5, 1.0 + 1e-12, 4.0)])
    assert mu.box_mass(CarlesonBox(0, 1)) == 3.0


@given(st.floats(-20, 12000), st.floats(0, 3000))
@settings(max_examples=300, deadline=None)
def test_squares_count_matches_brute_force(a, w):
    b = a + w
    if not b > a:
        return
    mu = SquaresAtHeightOne(100)
    assert mu.box_mass(CarlesonBox(a, b)) == brute_count(100, a, b)


def test_squares_measure_has_n_atoms():
    a = SquaresAtHeightOne(7).atoms()
    assert len(a) == 7
    assert np.array_equal(a.x, np.arange(1, 8) ** 2)
    assert np.all(a.y == 1)


atoms_st = st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 5), st.floats(0, 3)),
                    min_size=0, max_size=12)


@given(atoms_st, atoms_st, st.floats(-6, 6), st.floats(0.01, 8))
@settings(max_examples=100, deadline=None)
def test_box_mass_additive(a1, a2, lo, w):
    box = CarlesonBox(lo, lo + w)
    m1, m2 = Atomic.from_atoms(a1), Atomic.from_atoms(a2)
    assert (m1 + m2).box_mass(box) == pytest.approx(m1.box_mass(box) + m2.box_mass(box),
                                                    abs=1e-12)


@given(atoms_st, st.floats(-6, 6), st.floats(0.01, 8), st.floats(0, 3), st.floats(0, 3))
@settings(max_examples=100, deadline=None)
def test_box_mass_monotone(atoms, lo, w, left, right):
    mu = Atomic.from_atoms(atoms)
    inner = CarlesonBox(lo, lo + w)
    outer = CarlesonBox(lo - left, lo + w + right)
    assert mu.box_mass(inner) <= mu.box_mass(outer) + 1e-12


def test_squares_sup():
    r = carleson_sup(SquaresAtHeightOne(100), 0.5)
    assert r.sup_ratio == pytest.approx(2 / math.sqrt(3), abs=1e-9)
    assert (r.argmax.a, r.argmax.b) == (1.0, 4.0)
    assert r.exhaustive


def test_single_atom_sup_beta_one():
    r = carleson_sup(Atomic.point(0.5 + 0.5j), 1.0)
    assert r.sup_ratio == pytest.approx(2.0)
    assert (r.argmax.a, r.argmax.b) == (0.25, 0.75)


def test_empty_and_zero_mass_measures():
    assert carleson_sup(Atomic.from_atoms([]), 1.0).sup_ratio == 0.0
    assert carleson_sup(Atomic.from_atoms([(0, 1, 0.0)]), 0.5).sup_ratio == 0.0


def test_errors():
    with pytest.raises(ValueError):
        carleson_sup(Atomic.point(1j), 0.0)
    with pytest.raises(EmptyFamilyError):
        carleson_sup(Atomic.point(1j), 1.0, family="dyadic", k_range=(3, 2))
    with pytest.raises(DomainError):
        Atomic.from_atoms([(0, -1, 1)])
    with pytest.raises(ValueError):
        CarlesonBox(1, 1)


def test_scale_measure_examples():
    s = scale_measure(Atomic.point(1 + 1j), 2.0)
    assert complex(s.points[0]) == 2 + 2j
    mu = Atomic.point(1 + 1j)
    assert scale_measure(mu, 1.0) is mu
    g = GridDensity.lebesgue_box(0, 1, 0, 1, 4)
    with pytest.raises(DomainError):
        scale_measure(g, 2.0)


@given(atoms_st.filter(lambda a: any(m > 0 for *_, m in a)), st.floats(0.1, 10),
       st.sampled_from([0.5, 1.0, 2.0]))
@settings(max_examples=60, deadline=None)
def test_scale_law(atoms, c, beta):
    mu = Atomic.from_atoms(atoms)
    lhs = carleson_sup(scale_measure(mu, c), beta).sup_ratio
    assert lhs == pytest.approx(c ** -beta * carleson_sup(mu, beta).sup_ratio, rel=1e-9)


@given(atoms_st, st.sampled_from([0.5, 1.0, 2.0]))
@settings(max_examples=60, deadline=None)
def test_dyadic_comparability(atoms, beta):
    # every interval is covered by two dyadic intervals of length < 2|I|
    mu = Atomic.from_atoms(atoms)
    full = carleson_sup(mu, beta, family="exhaustive").sup_ratio
    dy = carleson_sup(mu, beta, family="dyadic").sup_ratio
    assert dy <= full * (1 + 1e-12) + 1e-300
    assert full <= 2 ** (1 + beta) * dy * (1 + 1e-12) + 1e-300


def test_dyadic_comparability_factor_two_is_needed():
    mu = Atomic.from_atoms([(-1e-3, 0.5, 1.0), (1e-3, 0.5, 1.0)])
    full = carleson_sup(mu, 0.5, family="exhaustive").sup_ratio
    dy = carleson_sup(mu, 0.5, family="dyadic").sup_ratio
    assert full / dy == pytest.approx(2.0)


@given(atoms_st.filter(lambda a: len(a) > 0), st.floats(0.25, 2.5))
@settings(max_examples=60, deadline=None)
def test_exhaustive_sup_dominates_random_intervals(atoms, beta):
    mu = Atomic.from_atoms(atoms)
    r = carleson_sup(mu, beta)
    g = np.random.default_rng(0)
    for _ in range(50):
        a = g.uniform(-7, 7)
        box = CarlesonBox(a, a + g.uniform(0.005, 10))
        assert mu.box_mass(box) / box.length ** beta <= r.sup_ratio * (1 + 1e-12)
    if r.argmax is not None:
        attained = mu.box_mass(r.argmax) / r.argmax.length ** beta
        assert attained == pytest.approx(r.sup_ratio, rel=1e-12)


def test_density_measure():
    g = GridDensity.lebesgue_box(0, 1, 0, 1, 32)
    assert g.total_mass() == pytest.approx(1.0)
    assert g.box_mass(CarlesonBox(0, 1)) == pytest.approx(1.0)
    r = carleson_sup(g, 2.0)
    assert r.method == "dyadic"
    assert 0.5 < r.sup_ratio <= 1.0 + 1e-12


def test_json_round_trip(tmp_path):
    for mu in (Atomic.from_atoms([(0, 1, 2), (3, 0.5, 1)]), SquaresAtHeightOne(5),
               GridDensity.lebesgue_box(0, 1, 0, 1, 4)):
        path = tmp_path / f"{mu.kind}.json"
        path.write_text(json.dumps(mu.to_json()))
        back = load_measure(path)
        assert back.total_mass() == pytest.approx(mu.total_mass())


def test_json_errors_name_the_field(tmp_path):
    with pytest.raises(ValueError, match="atom 0 is missing field 'mass'"):
        measure_from_json({"kind": "atomic", "atoms": [{"x": 0, "y": 1}]})
    with pytest.raises(ValueError, match="'kind'"):
        measure_from_json({"atoms": []})
    with pytest.raises(ValueError, match="'y'"):
        measure_from_json({"kind": "atomic", "atoms": [{"x": 0, "y": -1, "mass": 1}]})
    with pytest.raises(ValueError, match="'n'"):
        measure_from_json({"kind": "squares", "n": 0})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValueError, match="malformed"):
        load_measure(bad)
