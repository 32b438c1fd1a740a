# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for Mellin-domain sums on uniform frequency grids.

Both kernels replace per-node trigonometric evaluations by complex rotation
recurrences. The forward sum re-anchors the rotation with exact cos/sin
every ``ANCHOR`` grid rows so rounding drift stays at machine level even
for grids with 10^5-10^6 nodes.
"""
import numpy as np

from libc.math cimport cos, sin

cdef extern from "_kernels_impl.h" nogil:
    void ms_sum_rotate(double *zr, double *zi, const double *rr, const double *ri,
                       Py_ssize_t npad, double *acc)
    void ms_horner_step(double *ar, double *ai, const double *zr, const double *zi,
                        double cr, double ci, Py_ssize_t nq)

DEF ANCHOR = 256
DEF LANES = 8


def exp_sum_grid(const double[::1] weights, const double[::1] ell, double step, Py_ssize_t m):
    """out[j] = sum_i weights[i] * exp(1j * j * step * ell[i]) for j < m."""
    cdef Py_ssize_t n = weights.shape[0]
    if ell.shape[0] != n:
        raise ValueError("weights and ell must have equal length")
    out = np.zeros(m, dtype=np.complex128)
    if m == 0 or n == 0:
        return out
    cdef Py_ssize_t npad = ((n + LANES - 1) // LANES) * LANES
    cdef double[::1] o = out.view(np.float64)
    # padding lanes carry zero weight and unit rotation
    cdef double[::1] zr = np.zeros(npad)
    cdef double[::1] zi = np.zeros(npad)
    cdef double[::1] rr = np.ones(npad)
    cdef double[::1] ri = np.zeros(npad)
    cdef Py_ssize_t i, j
    cdef double phase
    with nogil:
        for i in range(n):
            rr[i] = cos(step * ell[i])
            ri[i] = sin(step * ell[i])
        for j in range(m):
            if j % ANCHOR == 0:
                for i in range(n):
                    phase = j * step * ell[i]
                    zr[i] = weights[i] * cos(phase)
                    zi[i] = weights[i] * sin(phase)
            ms_sum_rotate(&zr[0], &zi[0], &rr[0], &ri[0], npad, &o[2 * j])
    return out


def poly_eval(const double complex[::1] coef, const double[::1] ell, double step):
    """out[q] = sum_j coef[j] * exp(-1j * j * step * ell[q]), by Horner's rule."""
    cdef Py_ssize_t m = coef.shape[0]
    cdef Py_ssize_t nq = ell.shape[0]
    out = np.zeros(nq, dtype=np.complex128)
    if m == 0 or nq == 0:
        return out
    coef_arr = np.asarray(coef)
    cdef double[::1] cr = np.ascontiguousarray(coef_arr.real)
    cdef double[::1] ci = np.ascontiguousarray(coef_arr.imag)
    cdef double[::1] ar = np.zeros(nq)
    cdef double[::1] ai = np.zeros(nq)
    cdef double[::1] zr = np.empty(nq)
    cdef double[::1] zi = np.empty(nq)
    cdef Py_ssize_t j, q
    with nogil:
        for q in range(nq):
            zr[q] = cos(step * ell[q])
            zi[q] = -sin(step * ell[q])
        for j in range(m - 1, -1, -1):
            ms_horner_step(&ar[0], &ai[0], &zr[0], &zi[0], cr[j], ci[j], nq)
    out.real = ar
    out.imag = ai
    return out
