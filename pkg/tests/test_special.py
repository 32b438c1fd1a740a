import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from mellinsurv.errors import DomainError
from mellinsurv.special import complex_gamma, complex_log_gamma


def test_log_gamma_at_one_is_zero():
    assert abs(complex_log_gamma(1.0)) < 1e-14


def test_log_gamma_at_half():
    assert abs(complex_log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_gamma_modulus_matches_sech_identity(t):
    got = abs(complex_gamma(0.5 + 1j * t)) ** 2
    want = math.pi / math.cosh(math.pi * t)
    assert abs(got / want - 1) <= 1e-10


def test_sech_identity_against_high_precision():
    mpmath.mp.dps = 40
    for t in (0.5, 1.0, 5.0):
        ref = complex(mpmath.loggamma(mpmath.mpc(0.5, t)))
        assert abs(complex_log_gamma(0.5 + 1j * t) - ref) <= 1e-12 * abs(ref)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 50.0), st.floats(-100.0, 100.0))
def test_relative_accuracy_on_stated_strip(x, y):
    z = complex(x, y)
    ref = complex(sp.loggamma(z))
    got = complex(complex_log_gamma(z))
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_principal_branch_far_up_the_strip():
    mpmath.mp.dps = 30
    z = 0.7 + 90j
    assert abs(complex_log_gamma(z) - complex(mpmath.loggamma(z))) < 1e-10


def test_left_half_plane_via_recurrence():
    for z in (0.2 + 0.3j, -1.5 + 2j, -3.7 - 0.1j):
        assert abs(complex_log_gamma(z) - complex(sp.loggamma(z))) < 1e-11


def test_vectorized_matches_scalar():
    z = np.array([1 + 1j, 2.5 - 3j, 0.6 + 40j])
    vec = complex_log_gamma(z)
    for zi, vi in zip(z, vec):
        assert vi == pytest.approx(complex_log_gamma(complex(zi)), abs=1e-15)


@pytest.mark.parametrize("pole", [0.0, -1.0, -7.0])
def test_poles_raise(pole):
    with pytest.raises(DomainError):
        complex_log_gamma(pole)


def test_gamma_recurrence():
    z = 1.3 + 2.2j
    assert abs(complex_gamma(z + 1) - z * complex_gamma(z)) < 1e-13 * abs(complex_gamma(z + 1))
    assert cmath.isclose(complex_gamma(5.0), 24.0, rel_tol=1e-13)
