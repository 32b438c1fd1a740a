import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mellinsurv import _kernels_py, kernels


def direct_sum(w, ell, step, m):
    j = np.arange(m)
    return np.exp(1j * step * np.outer(j, ell)) @ w


def direct_poly(coef, ell, step):
    j = np.arange(coef.size)
    return np.exp(-1j * step * np.outer(ell, j)) @ coef


@pytest.fixture(params=["active", "python"])
def backend(request):
    return kernels if request.param == "active" else _kernels_py


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_exp_sum_grid_matches_direct(backend):
    rng = np.random.default_rng(3)
    w = rng.random(37)
    ell = rng.normal(size=37) * 2
    got = backend.exp_sum_grid(w, ell, 0.01, 700)
    assert np.max(np.abs(got - direct_sum(w, ell, 0.01, 700))) < 1e-12


def test_exp_sum_grid_long_grid_stays_accurate(backend):
    rng = np.random.default_rng(4)
    w = rng.random(50) / 50
    ell = rng.normal(size=50) * 3
    m = 5000
    got = backend.exp_sum_grid(w, ell, 1 / 128, m)
    sel = np.array([0, 255, 256, 1023, 4999])
    ref = np.exp(1j * (1 / 128) * np.outer(sel, ell)) @ w
    assert np.max(np.abs(got[sel] - ref)) < 1e-12


def test_poly_eval_matches_direct(backend):
    rng = np.random.default_rng(5)
    coef = rng.normal(size=300) + 1j * rng.normal(size=300)
    ell = np.linspace(-4, 3, 91)
    got = backend.poly_eval(coef, ell, 0.02)
    ref = direct_poly(coef, ell, 0.02)
    assert np.max(np.abs(got - ref)) < 1e-10 * np.max(np.abs(ref))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 300), st.floats(1e-3, 0.5))
def test_backends_agree(n, m, step):
    rng = np.random.default_rng(n * 1000 + m)
    w = rng.random(n)
    ell = rng.normal(size=n)
    a = kernels.exp_sum_grid(w, ell, step, m)
    b = _kernels_py.exp_sum_grid(w, ell, step, m)
    assert np.allclose(a, b, rtol=0, atol=1e-12 * n)
    coef = rng.normal(size=m) + 0j
    assert np.allclose(kernels.poly_eval(coef, ell, step), _kernels_py.poly_eval(coef, ell, step),
                       rtol=0, atol=1e-11 * m)


def test_empty_inputs(backend):
    assert backend.exp_sum_grid(np.zeros(0), np.zeros(0), 0.1, 4).tolist() == [0j] * 4
    assert backend.poly_eval(np.zeros(0, complex), np.zeros(3), 0.1).tolist() == [0j] * 3


def test_pure_python_switch():
    env = dict(os.environ, MELLINSURV_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from mellinsurv import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_benchmark_script_runs():
    import pathlib

    script = pathlib.Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    proc = subprocess.run([sys.executable, str(script), "--n", "40", "--repeat", "1"],
                          capture_output=True, text=True, check=True)
    assert "exp_sum_grid" in proc.stdout and "poly_eval" in proc.stdout
