"""Complex log-gamma by the Lanczos approximation."""
import numpy as np

from .errors import DomainError

# Lanczos coefficients for g = 607/128, 15 terms (Godfrey); |rel err| < 1e-15 on Re z >= 1/2.
_G = 607.0 / 128.0
_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _lanczos_loggamma(z):
    # valid for Re z >= 1/2
    zm1 = z - 1.0
    acc = np.full(z.shape, _COEF[0], dtype=np.complex128)
    for k in range(1, _COEF.size):
        acc = acc + _COEF[k] / (zm1 + k)
    t = zm1 + _G + 0.5
    return _HALF_LOG_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(acc)


def complex_log_gamma(z):
    """Principal branch of log Gamma(z) for complex ``z`` (scalar or array).

    For Re(z) < 1/2 the argument is shifted right with the recurrence
    Gamma(z) = Gamma(z + N) / (z (z+1) ... (z+N-1)); summing principal logs keeps
    the branch cut on the negative real axis.

    Raises
    ------
    DomainError
        If any entry is a non-positive integer.
    """
    arr = np.asarray(z, dtype=np.complex128)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    poles = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if np.any(poles):
        raise DomainError(f"Gamma has a pole at {arr[poles][0].real:g}")
    out = np.empty(arr.shape, dtype=np.complex128)
    right = arr.real >= 0.5
    out[right] = _lanczos_loggamma(arr[right])
    if not np.all(right):
        left = arr[~right]
        shift = np.ceil(0.5 - left.real).astype(np.int64)
        acc = np.zeros(left.shape, dtype=np.complex128)
        for k in range(int(shift.max())):
            active = k < shift
            acc[active] += np.log(left[active] + k)
        out[~right] = _lanczos_loggamma(left + shift) - acc
    return out[0] if scalar else out


def complex_gamma(z):
    """Gamma(z) = exp(complex_log_gamma(z))."""
    return np.exp(complex_log_gamma(z))
