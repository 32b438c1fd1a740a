"""NumPy implementations of the grid kernels (used when the extension is absent)."""
import numpy as np

# complex entries per temporary block
_BLOCK = 1 << 20


def exp_sum_grid(weights, ell, step, m):
    """out[j] = sum_i weights[i] * exp(1j * j * step * ell[i]) for j < m."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    ell = np.ascontiguousarray(ell, dtype=np.float64)
    if weights.shape != ell.shape:
        raise ValueError("weights and ell must have equal length")
    out = np.zeros(m, dtype=np.complex128)
    n = weights.size
    if m == 0 or n == 0:
        return out
    rows = max(1, _BLOCK // n)
    for start in range(0, m, rows):
        t = step * np.arange(start, min(start + rows, m), dtype=np.float64)
        phase = np.multiply.outer(t, ell)
        out[start:start + t.size] = np.cos(phase) @ weights + 1j * (np.sin(phase) @ weights)
    return out


def poly_eval(coef, ell, step):
    """out[q] = sum_j coef[j] * exp(-1j * j * step * ell[q])."""
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    ell = np.ascontiguousarray(ell, dtype=np.float64)
    out = np.zeros(ell.size, dtype=np.complex128)
    m = coef.size
    if m == 0 or ell.size == 0:
        return out
    cols = max(1, _BLOCK // ell.size)
    for start in range(0, m, cols):
        stop = min(start + cols, m)
        t = step * np.arange(start, stop, dtype=np.float64)
        out += np.exp(-1j * np.multiply.outer(ell, t)) @ coef[start:stop]
    return out
