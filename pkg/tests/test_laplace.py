import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laplace_carleson.errors import AliasingError, DomainError
from laplace_carleson.laplace import (boundary_convolution_check, laplace_field, laplace_filon,
                                      laplace_point, laplace_values)
from laplace_carleson.signals import ExpPoly, GridSpec, StepDyadic, zero_function


def test_indicator_at_i():
    want = (1 - math.exp(-2 * math.pi)) / (2 * math.pi)
    assert laplace_point(StepDyadic.indicator(), 1j) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("lam", [0.5 + 0.5j, -3 + 2j, 10 + 0.01j])
def test_kernel_modulus(lam):
    f = ExpPoly.kernel(lam)
    for z in (1j, 2 + 0.1j, -5 + 3j):
        want = 1 / (2 * math.pi * abs(z - lam.conjugate()))
        assert abs(laplace_point(f, z)) == pytest.approx(want, rel=1e-13)


def test_zero_function():
    z = np.array([1j, 3 + 0.2j])
    assert np.all(laplace_values(zero_function(), z) == 0)


def test_lower_half_plane_rejected():
    with pytest.raises(DomainError):
        laplace_point(StepDyadic.indicator(), 1.0)
    with pytest.raises(DomainError):
        laplace_point(StepDyadic.indicator(), -1j)


def test_small_z_series():
    f = StepDyadic((0, 0.5, 1), (1, 3))
    want = 0.5 + 1.5
    assert laplace_point(f, 1e-9j) == pytest.approx(want, rel=1e-8)


def test_field_entries_match_points():
    g = GridSpec.half_plane(2, 2, -1, 1, 0.5, 1.5, y_spacing="uniform")
    f = StepDyadic.indicator()
    F = laplace_field(f, g)
    for x in F.xs:
        for y in F.ys:
            assert F.at(complex(x, y)) == pytest.approx(laplace_point(f, complex(x, y)), rel=1e-13)


@pytest.mark.parametrize("lam", [0.5, 3.0])
@pytest.mark.parametrize("f", [StepDyadic((0, 0.5, 2), (1, -2)), ExpPoly(2.0, 1.0, 2)],
                         ids=lambda f: f.kind)
def test_field_dilation(f, lam):
    g = GridSpec.half_plane(6, 5, -2, 2, 0.1, 2, y_spacing="uniform")
    lhs = laplace_field(f.dilate(lam), g).values
    rhs = lam * laplace_field(f, g.scaled(lam)).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1, np.max(np.abs(rhs)))


def test_l1_bound_with_cancellation():
    f = StepDyadic((0, 1, 2), (1, -1))
    g = GridSpec.half_plane(41, 30, -5, 5, 1e-3, 3)
    F = laplace_field(f, g)
    assert np.max(np.abs(F.values)) <= 2.0
    ys = F.ys
    col = np.max(np.abs(F.values), axis=0)
    assert col[-1] < col[0]
    assert ys[-1] > ys[0]


@given(st.floats(0.1, 5), st.floats(-3, 3), st.integers(0, 3), st.floats(-4, 4), st.floats(1e-3, 3))
@settings(max_examples=100, deadline=None)
def test_exppoly_damped_l1_bound(a, b, k, x, y):
    f = ExpPoly(a, b, k)
    l1 = math.factorial(k) / (a + 2 * math.pi * y) ** (k + 1)
    assert abs(laplace_point(f, complex(x, y))) <= l1 * (1 + 1e-12)


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.lists(st.floats(-3, 3), min_size=3, max_size=3),
       st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=50, deadline=None)
def test_linearity(v1, v2, alpha, beta):
    bps = (0.0, 0.25, 1.0, 2.0)
    f, g = StepDyadic(bps, tuple(v1)), StepDyadic(bps, tuple(v2))
    h = StepDyadic(bps, tuple(alpha * a + beta * b for a, b in zip(v1, v2)))
    z = np.array([0.3 + 0.2j, -2 + 1j, 5 + 0.01j])
    lhs = laplace_values(h, z)
    rhs = alpha * laplace_values(f, z) + beta * laplace_values(g, z)
    assert np.max(np.abs(lhs - rhs)) < 1e-13 * (1 + np.max(np.abs(rhs)))


def test_filon_matches_closed_form():
    f = ExpPoly(2.0, 1.0, 1)
    z = np.array([1j, 3 + 0.5j, -10 + 0.2j])
    approx = laplace_filon(f, z, dt=1e-3)
    assert np.max(np.abs(approx - laplace_values(f, z))) < 1e-6


def test_boundary_check_indicator():
    g = GridSpec.real_line(2 ** 12, -32, 32)
    assert boundary_convolution_check(StepDyadic.indicator(), 1.0, g) < 1e-6


def test_boundary_check_exppoly():
    g = GridSpec.real_line(2 ** 12, -32, 32)
    assert boundary_convolution_check(ExpPoly(2 * math.pi), 0.5, g) < 1e-6


def test_boundary_check_zero():
    assert boundary_convolution_check(zero_function(), 1.0, GridSpec.real_line(64, -4, 4)) == 0.0


def test_boundary_check_reports_aliasing():
    # spacing 1 gives a t-range of 1, far short of the support
    g = GridSpec.real_line(64, -32, 32)
    with pytest.raises(AliasingError) as exc:
        boundary_convolution_check(StepDyadic((0, 8), (1,)), 1e-3, g)
    assert exc.value.bound > 1e-6


def test_cauchy_riemann_second_order():
    f = ExpPoly(1.0, 0.5)
    res = []
    for n in (33, 65, 129):
        g = GridSpec.half_plane(n, n, -1, 1, 0.5, 1.5, y_spacing="uniform", rule="trapezoid")
        res.append(laplace_field(f, g).cauchy_riemann_residual())
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders > 1.8)
    assert orders[-1] > orders[0]


def test_paley_wiener_monotone():
    f = StepDyadic.indicator()
    g = GridSpec.real_line(2 ** 18, -2000, 2000)
    xs, w = g.axis(0)
    prev = 0.0
    for y in (1.0, 0.3, 0.1, 0.03, 0.01):
        line = np.sum(w * np.abs(laplace_values(f, xs + 1j * y)) ** 2)
        exact = (1 - math.exp(-4 * math.pi * y)) / (4 * math.pi * y)
        assert line == pytest.approx(exact, rel=1e-3)
        assert line > prev
        prev = line
    assert prev < 1.0


def test_field_csv():
    g = GridSpec.half_plane(2, 3, -1, 1, 0.5, 1.5, y_spacing="uniform")
    buf = io.StringIO()
    laplace_field(StepDyadic.indicator(), g).to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "x,y,re,im"
    assert len(lines) == 7
