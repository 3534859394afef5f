import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laplace_carleson.errors import DivergentNormError, DomainError, GridMismatchError
from laplace_carleson.signals import (Annulus, BandLimited, CoeffSeries, ExpPoly, Gaussian,
                                      GridSpec, Indicator, NormValue, SpaceDescriptor,
                                      StepDyadic, convolve, function_from_json, lp_norm,
                                      sample, zero_function)


# ---------------------------------------------------------------------------
# lp_norm

def test_indicator_unit_interval_norm():
    nv = lp_norm(StepDyadic.indicator(), 4.0)
    assert nv.value == 1.0
    assert nv.abs_error_estimate == 0.0


@pytest.mark.parametrize("length", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("p,alpha", [(2.0, 0.0), (4.0, 1.5), (1.5, -0.5)])
def test_exppoly_gamma_closed_form(length, p, alpha):
    f = ExpPoly(math.pi * length)
    want = (math.gamma(alpha + 1) / (p * math.pi * length) ** (alpha + 1)) ** (1 / p)
    assert lp_norm(f, p, alpha).value == pytest.approx(want, rel=1e-13)


def test_gaussian_l2_norm():
    assert lp_norm(Gaussian((0.0,), 1.0), 2.0).value == pytest.approx(2 ** -0.25, rel=1e-14)


def test_divergent_weight_is_reported():
    with pytest.raises(DivergentNormError):
        lp_norm(ExpPoly(1.0), 2.0, alpha=-1.0)


def test_weighted_norm_needs_half_line():
    with pytest.raises(DomainError):
        lp_norm(Gaussian((0.0,), 1.0), 2.0, alpha=1.0)


def test_half_line_grid_for_line_function_is_rejected():
    with pytest.raises(DomainError):
        lp_norm(Gaussian((0.3,), 0.8), 2.0, grid=GridSpec.half_line(64, 0, 1), method="quadrature")


HALF_LINE_MEMBERS = [StepDyadic.indicator(), ExpPoly(2.0, 1.0, 2), ExpPoly(1.0),
                     StepDyadic((0, 0.5, 2), (1, -2)), Indicator(((0, 1), (2, 3.5)))]


@pytest.mark.parametrize("f", HALF_LINE_MEMBERS, ids=lambda f: f.kind)
@pytest.mark.parametrize("p,alpha", [(2.0, 0.0), (3.0, 0.5), (4.0, -0.5)])
def test_quadrature_matches_closed_form(f, p, alpha):
    exact = lp_norm(f, p, alpha).value
    quad = lp_norm(f, p, alpha, grid=GridSpec.half_line(2 ** 14, 0, 1), method="quadrature")
    assert quad.value == pytest.approx(exact, rel=1e-6)
    assert quad.abs_error_estimate < 1e-5 * exact


@pytest.mark.parametrize("f", [Gaussian((0.3,), 0.8), Gaussian((0.3, -0.2), 0.7)])
def test_line_and_plane_quadrature(f):
    exact = lp_norm(f, 3.0).value
    assert lp_norm(f, 3.0, method="quadrature").value == pytest.approx(exact, rel=1e-6)


def test_quadrature_refinement_converges_monotonically():
    f = ExpPoly(2.0, 1.0, 1)
    exact = lp_norm(f, 3.0, 0.5).value
    errs = [abs(lp_norm(f, 3.0, 0.5, grid=GridSpec.half_line(2 ** k, 0, 1),
                        method="quadrature").value - exact) for k in range(9, 14)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("lam", [0.25, 4.0])
@pytest.mark.parametrize("f", [StepDyadic((0, 0.5, 2), (1, -2)), ExpPoly(2.0, 1.0, 2),
                               Indicator(((0, 1),))], ids=lambda f: f.kind)
def test_dilation_scales_norm(f, lam):
    p = 3.0
    assert lp_norm(f.dilate(lam), p).value == pytest.approx(lam ** (1 / p) * lp_norm(f, p).value,
                                                            rel=1e-13)


# ---------------------------------------------------------------------------
# sample and convolve

def test_sample_indicator_nodes():
    g = GridSpec.half_line(3, 0.25, 1.25)
    assert np.allclose(sample(StepDyadic.indicator(), g), [1, 1, 0])


def test_sample_gaussian_at_zero():
    # periodic real-line grid: nodes -1, -0.5, 0, 0.5
    g = GridSpec.real_line(4, -1, 1)
    assert sample(Gaussian((0.0,), 1.0), g)[2] == 1.0


def test_bandlimited_sampling_is_deterministic():
    g = GridSpec.real_line(1024, -32, 32)
    a = sample(BandLimited(7), g)
    b = sample(BandLimited(7), g)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample(BandLimited(8), g))


def test_tent_function():
    g = GridSpec.real_line(2 ** 12, -4, 4)
    one = Indicator(((0, 1),))
    tent = convolve(one, one, g)
    assert tent.value_at(1.0).real == pytest.approx(1.0, abs=4e-3)
    assert tent.value_at(0.5).real == pytest.approx(0.5, abs=4e-3)


def test_gaussian_self_convolution():
    w = 0.5
    g = GridSpec.real_line(2 ** 12, -8, 8)
    f = Gaussian((0.0,), w)
    conv = convolve(f, f, g)
    x, _ = conv.grid.axis(0)
    # e^{-pi x^2/w^2} * e^{-pi x^2/w^2} = (w/sqrt 2) e^{-pi x^2/(2 w^2)}
    want = w / math.sqrt(2) * np.exp(-np.pi * x ** 2 / (2 * w * w))
    assert np.max(np.abs(conv.values - want)) < 1e-6


def test_convolution_is_symmetric_and_linear():
    g = GridSpec.real_line(512, -4, 4)
    f = Gaussian((0.2,), 0.6)
    h = Gaussian((-0.4,), 0.3)
    fh = convolve(f, h, g).values
    hf = convolve(h, f, g).values
    assert np.max(np.abs(fh - hf)) < 1e-15 * np.max(np.abs(fh))
    two = convolve(f, h, g) * 2.0
    assert np.allclose(two.values, 2 * fh)


def test_convolution_grid_mismatch():
    f = Gaussian((0.0,), 0.5)
    a = convolve(f, f, GridSpec.real_line(64, -4, 4))
    with pytest.raises(GridMismatchError):
        convolve(a, sample_on(f, GridSpec.real_line(64, -3, 3)), a.grid)


def sample_on(f, g):
    from laplace_carleson.signals import sample_signal
    return sample_signal(f, g)


def test_convolution_warns_when_support_hits_edge():
    g = GridSpec.real_line(64, -1, 1)
    with pytest.warns(Warning):
        convolve(Gaussian((0.0,), 1.0), Gaussian((0.0,), 1.0), g)


# ---------------------------------------------------------------------------
# grids, types, serialization

@pytest.mark.parametrize("grid,measure", [
    (GridSpec.real_line(101, -2, 3), 5.0),
    (GridSpec.half_line(50, 0, 2, rule="midpoint"), 2.0),
    (GridSpec.half_line(64, 1e-3, 10, spacing="log", rule="midpoint"), 10 - 1e-3),
    (GridSpec.half_plane(16, 32, -1, 1, 0.01, 2), 2 * 1.99),
])
def test_grid_weights_sum_to_measure(grid, measure):
    w = grid.weights()
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(measure, rel=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec.real_line(1, 0, 1)
    with pytest.raises(DomainError):
        GridSpec.half_plane(4, 4, 0, 1, 0.0, 1.0)
    with pytest.raises(ValueError):
        GridSpec.real_line(8, 1, 0)


def test_grid_round_trip():
    g = GridSpec.half_plane(8, 16, -1, 1, 0.01, 2)
    assert GridSpec.from_dict(g.to_dict()) == g


def test_normvalue_invariants():
    with pytest.raises(ValueError):
        NormValue(-1.0, 0.0, SpaceDescriptor("Lp", p=2))
    with pytest.raises(ValueError):
        NormValue(1.0, math.inf, SpaceDescriptor("Lp", p=2))


def test_step_invariants():
    with pytest.raises(ValueError):
        StepDyadic((0, 1, 1), (1, 2))
    with pytest.raises(DomainError):
        StepDyadic((-1, 1), (1,))
    with pytest.raises(ValueError):
        ExpPoly(0.0)


def test_zero_function_norm():
    assert lp_norm(zero_function(), 3.0).value == 0.0


def test_annulus_and_coeffs_norms():
    assert lp_norm(Annulus(8.0), 4.0).value == pytest.approx(2 ** 0.25)
    assert CoeffSeries((3, 4j)).exact_lp(2.0) == pytest.approx(5.0)


steps = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6).flatmap(
    lambda v: st.tuples(st.just(v), st.lists(st.integers(1, 8), min_size=len(v), max_size=len(v))))


@given(steps)
@settings(max_examples=50, deadline=None)
def test_step_json_round_trip_and_exact_l2(data):
    vals, widths = data
    bps = np.concatenate([[0], np.cumsum(widths)]) / 8.0
    f = StepDyadic(tuple(bps), tuple(vals))
    g = function_from_json(f.to_json())
    assert g == f
    want = math.sqrt(sum(v * v * w / 8.0 for v, w in zip(vals, widths)))
    assert lp_norm(f, 2.0).value == pytest.approx(want, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("f", [ExpPoly(2.0, 1.0, 2, 0.5 - 1j), Gaussian((0.1, 0.2), 0.7),
                               BandLimited(3, (0, 2)), Indicator(((0, 1), (2, 3))),
                               Annulus(4.0, 2), CoeffSeries((1, 2j))], ids=lambda f: f.kind)
def test_json_round_trip(f):
    assert function_from_json(f.to_json()) == f


def test_json_errors_name_field():
    with pytest.raises(ValueError, match="kind"):
        function_from_json({"a": 1})
    with pytest.raises(ValueError, match="'a'"):
        function_from_json({"kind": "exppoly"})


def test_bandlimited_plancherel():
    f = BandLimited(11, (0, 3))
    g = GridSpec.real_line(2 ** 15, -64, 64)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        num = lp_norm(f, 2.0, grid=g, method="quadrature").value
    assert num == pytest.approx(f.l2_norm(), rel=1e-8)
