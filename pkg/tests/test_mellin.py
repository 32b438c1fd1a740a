import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from mellinsurv.errors import DomainError
from mellinsurv.mellin import (
    MellinSeries,
    QuadratureConfig,
    TGrid,
    mellin_inverse,
    mellin_inverse_at,
    mellin_numeric,
    mult_convolve_numeric,
    plancherel_norm2,
)
from mellinsurv.models import catalog_targets, get_error, get_target
from mellinsurv.special import complex_gamma


def exp_density(x):
    return np.exp(-x)


def unif01(x):
    return ((x > 0) & (x <= 1)).astype(float)


def gamma_half_series(k=50.0, step=0.01):
    # M_{1/2}[exp(-x)](t) = Gamma(1/2 + it)
    return MellinSeries.from_function(lambda t: complex_gamma(0.5 + 1j * t), TGrid(k, step), 0.5)


# --- TGrid / MellinSeries ---------------------------------------------------

def test_grid_is_symmetric_and_hits_k():
    g = TGrid(2.0, 0.25)
    assert g.size == 17
    assert g.nodes[0] == -2.0 and g.nodes[-1] == 2.0
    assert np.array_equal(g.nodes, -g.nodes[::-1])
    assert g.nodes[g.half_count] == 0.0


@pytest.mark.parametrize("k, step", [(1.0, 0.3), (0.0, 0.1), (1.0, -0.1)])
def test_grid_rejects_bad_parameters(k, step):
    with pytest.raises(DomainError):
        TGrid(k, step)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 300.0), st.floats(1e-3, 1.0))
def test_for_cutoff_hits_k_with_step_not_larger(k, step):
    g = TGrid.for_cutoff(k, step)
    assert g.half_width == k
    assert g.step <= step * (1 + 1e-12)
    assert abs(g.nodes[-1] - k) <= 1e-9 * k


def test_series_length_checked():
    with pytest.raises(DomainError):
        MellinSeries(TGrid(1.0, 0.5), np.zeros(4))


def test_series_values_are_read_only():
    s = MellinSeries(TGrid(1.0, 0.5), np.zeros(5))
    with pytest.raises(ValueError):
        s.values[0] = 1.0


def test_from_half_is_hermitian():
    half = np.array([1.0, 2 + 1j, -0.5j])
    s = MellinSeries.from_half(TGrid(1.0, 0.5), half)
    assert s.hermitian_defect() == 0.0
    assert np.array_equal(s.values[2:], half)


@pytest.mark.parametrize("model", catalog_targets(), ids=lambda m: m.name)
def test_catalog_transforms_are_hermitian(model):
    t = np.linspace(-50, 50, 81)
    v = model.mellin_f_32(t)
    assert np.max(np.abs(v[::-1] - np.conj(v))) <= 1e-12


# --- mellin_numeric -----------------------------------------------------------

def test_numeric_uniform_density():
    q = QuadratureConfig(1e-12, 1.0, breakpoints=(1.0,))
    assert abs(mellin_numeric(unif01, 1.5, 0.0, q) - 2 / 3) < 1e-8


def test_numeric_exp_mass():
    q = QuadratureConfig(1e-12, 60.0)
    assert abs(mellin_numeric(exp_density, 1.0, 0.0, q) - 1.0) < 1e-8


def test_numeric_exp_half_line():
    q = QuadratureConfig(1e-14, 60.0)
    assert abs(mellin_numeric(exp_density, 0.5, 1.0, q) - complex_gamma(0.5 + 1j)) < 1e-6


def test_numeric_accepts_arrays():
    q = QuadratureConfig(1e-12, 60.0)
    t = np.array([[0.0, 1.0], [2.0, 3.0]])
    out = mellin_numeric(exp_density, 1.5, t, q)
    assert out.shape == (2, 2)
    assert abs(out[1, 1] - mellin_numeric(exp_density, 1.5, 3.0, q)) < 1e-15


# --- inversion -----------------------------------------------------------------

def test_inverse_of_zero_series():
    s = MellinSeries(TGrid(3.0, 0.5), np.zeros(13))
    assert mellin_inverse_at(s, 2.0) == 0.0


def test_inverse_recovers_exponential():
    assert abs(mellin_inverse_at(gamma_half_series(), 1.0) - math.exp(-1.0)) < 1e-3


def test_inverse_rejects_nonpositive_x():
    with pytest.raises(DomainError):
        mellin_inverse_at(gamma_half_series(), 0.0)


@pytest.mark.skipif(not __debug__, reason="assertion only active in debug mode")
def test_non_hermitian_series_trips_assertion():
    g = TGrid(2.0, 0.5)
    s = MellinSeries(g, 1j * np.ones(g.size))
    with pytest.raises(AssertionError):
        mellin_inverse_at(s, 1.3)


@pytest.mark.parametrize("model", catalog_targets(), ids=lambda m: m.name)
def test_inversion_round_trip_of_survival(model):
    grid = TGrid(100.0, 0.005)
    s = MellinSeries.from_function(model.mellin_S_12, grid, 0.5)
    x = np.linspace(0.1, 5.0, 60)
    assert np.max(np.abs(mellin_inverse(s, x) - model.survival(x))) <= 2e-3


# --- Plancherel ----------------------------------------------------------------

def test_plancherel_zero():
    assert plancherel_norm2(MellinSeries(TGrid(1.0, 0.5), np.zeros(5))) == 0.0


def test_plancherel_exponential():
    assert abs(plancherel_norm2(gamma_half_series()) - 0.5) <= 1e-4


def test_plancherel_homogeneity():
    s = gamma_half_series(10.0, 0.05)
    doubled = MellinSeries(s.grid, 2 * s.values, 0.5)
    assert plancherel_norm2(doubled) == pytest.approx(4 * plancherel_norm2(s), rel=1e-14)


# --- multiplicative convolution -----------------------------------------------

def test_convolution_tail_vanishes():
    q = QuadratureConfig(1e-10, 1.0, breakpoints=(1.0,))
    assert abs(mult_convolve_numeric(exp_density, unif01, 25.0, q)) < 1e-6


def test_convolution_commutes():
    q1 = QuadratureConfig(1e-12, 1.0, n_x=400_001, breakpoints=(1.0,))
    q2 = QuadratureConfig(1e-12, 80.0, n_x=400_001, breakpoints=(1.0,))
    a = mult_convolve_numeric(exp_density, unif01, 1.0, q1)
    b = mult_convolve_numeric(unif01, exp_density, 1.0, q2, h1_breakpoints=(1.0,))
    # (exp * U)(1) = int_1^inf e^-x / x dx = E1(1)
    assert abs(a - b) < 1e-8
    assert abs(a - sp.exp1(1.0)) < 1e-8


def test_convolution_rejects_nonpositive_y():
    with pytest.raises(DomainError):
        mult_convolve_numeric(exp_density, unif01, -1.0, QuadratureConfig())


def test_convolution_theorem_gamma_uniform():
    f = get_target("gamma_4_05")
    g = get_error("unif_0_1")
    inner = QuadratureConfig(1e-10, 1.0, n_x=4001, breakpoints=(1.0,))
    outer = QuadratureConfig(1e-6, 150.0, n_x=4001)
    y, w = outer.nodes()
    conv = mult_convolve_numeric(f.density, g.density, y, inner)
    logy = np.log(y)
    base = w * np.sqrt(y) * conv
    for t in (0.0, 1.0, 3.0):
        lhs = np.sum(base * np.exp(1j * t * logy))
        rhs = f.mellin_f_32(t) * g.mellin_g_32(t)
        assert abs(lhs - rhs) <= 1e-4
