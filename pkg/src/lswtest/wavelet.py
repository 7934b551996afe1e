"""Non-decimated Haar wavelets, the periodic NDWT and autocorrelation wavelets.

Scales are indexed ``j = 1`` (finest, two taps) to ``j = J`` (coarsest,
``2**J`` taps). Grids are plain arrays whose last two axes are ``(J, T)``;
row ``j - 1`` holds scale ``j``. Leading axes are treated as a batch.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConditioningError, DyadicLengthError, InvalidScaleError, ShapeMismatchError

#: Largest condition number accepted by :func:`correct_periodogram`.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class WaveletFilter:
    level: int
    taps: tuple

    @property
    def support_length(self):
        return len(self.taps)

    def as_array(self):
        return np.array(self.taps, dtype=float)


def haar_filter(j):
    """Discrete Haar wavelet at scale ``j``.

    ``2**(j-1)`` taps of ``+2**(-j/2)`` followed by the same number of
    ``-2**(-j/2)``, so the taps sum to zero and have unit energy.
    """
    if int(j) != j or j < 1:
        raise InvalidScaleError(f"scale index must be an integer >= 1, got {j!r}")
    j = int(j)
    half = 2 ** (j - 1)
    h = 2.0 ** (-j / 2.0)
    return WaveletFilter(level=j, taps=(h,) * half + (-h,) * half)


def dyadic_levels(n):
    """Return ``J`` with ``n == 2**J`` or raise :class:`DyadicLengthError`."""
    n = int(n)
    if n < 2 or n & (n - 1):
        raise DyadicLengthError(f"length {n} is not a power of two >= 2")
    return n.bit_length() - 1


@lru_cache(maxsize=32)
def _filter_bank_fft(T):
    J = dyadic_levels(T)
    bank = np.zeros((J, T))
    for j in range(1, J + 1):
        taps = haar_filter(j).as_array()
        bank[j - 1, : taps.size] = taps
    out = np.fft.rfft(bank, axis=-1)
    out.setflags(write=False)
    return out


def ndwt(series):
    """Periodic non-decimated Haar transform.

    ``d[j, k] = sum_t x[t] * psi_j[(k - t) mod T]`` for every scale and every
    time ``k``; input of shape ``(..., T)`` gives ``(..., J, T)``.
    """
    x = np.asarray(series, dtype=float)
    T = x.shape[-1]
    bank = _filter_bank_fft(T)
    xf = np.fft.rfft(x, axis=-1)[..., None, :]
    return np.fft.irfft(xf * bank, n=T, axis=-1)


def ndwt_adjoint(coeffs):
    """Adjoint of :func:`ndwt`: ``x[t] = sum_{j,k} c[j, k] * psi_j[(k - t) mod T]``.

    This is the periodic LSW synthesis operator.
    """
    c = np.asarray(coeffs, dtype=float)
    T = c.shape[-1]
    bank = _filter_bank_fft(T)
    if c.shape[-2] != bank.shape[0]:
        raise ShapeMismatchError(f"expected {bank.shape[0]} levels for length {T}, got {c.shape[-2]}")
    cf = np.fft.rfft(c, axis=-1) * np.conj(bank)
    return np.fft.irfft(cf.sum(axis=-2), n=T, axis=-1)


def autocorrelation_wavelet(j, tau):
    """``Psi_j(tau) = sum_n psi_j[n] psi_j[n - tau]``; zero outside the support."""
    tau = int(tau)
    h = haar_filter(j).as_array()
    L = h.size
    if abs(tau) >= L:
        return 0.0
    if tau >= 0:
        return float(np.dot(h[tau:], h[: L - tau]))
    return float(np.dot(h[: L + tau], h[-tau:]))


def _autocorrelation_table(J):
    """Rows ``Psi_j`` for ``j = 1..J`` on lags ``-(2**J - 1) .. 2**J - 1``."""
    n = 2**J
    out = np.zeros((J, 2 * n - 1))
    for j in range(1, J + 1):
        h = haar_filter(j).as_array()
        ac = np.correlate(h, h, mode="full")  # lags -(L-1)..(L-1)
        L = h.size
        out[j - 1, n - L : n + L - 1] = ac
    return out


@lru_cache(maxsize=16)
def _inner_product_matrix(J):
    psi = _autocorrelation_table(J)
    A = psi @ psi.T
    A = 0.5 * (A + A.T)
    A.setflags(write=False)
    return A


def inner_product_matrix(J):
    """Autocorrelation wavelet inner product matrix ``A[i, j] = sum_tau Psi_i Psi_j``.

    Returns a read-only ``(J, J)`` array (cached per ``J``).
    """
    if int(J) != J or J < 1:
        raise InvalidScaleError(f"level count must be >= 1, got {J!r}")
    return _inner_product_matrix(int(J))


def _check_matrix(A, J):
    A = np.asarray(A, dtype=float)
    if A.shape != (J, J):
        raise ShapeMismatchError(f"matrix of shape {A.shape} does not match {J} levels")
    return A


def correct_periodogram(I, A=None):
    """Solve ``A L(k) = I(k)`` at every time ``k``.

    No clipping is applied; corrected values can be negative.
    """
    I = np.asarray(I, dtype=float)
    J = I.shape[-2]
    A = inner_product_matrix(J) if A is None else _check_matrix(A, J)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ConditioningError(f"inner product matrix is ill-conditioned (cond={cond:.3g})")
    moved = np.moveaxis(I, -2, 0)
    L = np.linalg.solve(A, moved.reshape(J, -1)).reshape(moved.shape)
    return np.moveaxis(L, 0, -2)


def expected_beta(S, A=None):
    """``beta_j(k) = sum_i A[i, j] S_i(k)`` for a spectrum grid ``S``."""
    S = np.asarray(S, dtype=float)
    J = S.shape[-2]
    A = inner_product_matrix(J) if A is None else _check_matrix(A, J)
    return np.einsum("ij,...ik->...jk", A, S)
