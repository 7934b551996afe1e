"""Null distributions and random streams.

Student-t and F probabilities all go through one continued-fraction
evaluation of the regularized incomplete beta function. Both tails are
returned from that routine so small p-values keep their relative accuracy.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc, gammaln

from .errors import DomainError, InsufficientReplicatesError, NumericError

_TINY = 1e-300
_EPS = 1e-15
_MAX_ITER = 20000


def _betacf(a, b, x):
    """Modified Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            return h
    raise NumericError("incomplete beta continued fraction did not converge")


def betainc_tails(a, b, x):
    """Return ``(I_x(a, b), 1 - I_x(a, b))``, each computed without cancellation."""
    a, b, x = np.broadcast_arrays(
        np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(x, dtype=float)
    )
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("incomplete beta parameters must be positive")
    shape = x.shape
    a, b, x = a.ravel(), b.ravel(), x.ravel()
    lower = np.where(x >= 1.0, 1.0, 0.0)
    upper = 1.0 - lower
    inner = (x > 0.0) & (x < 1.0)
    if inner.any():
        ai, bi, xi = a[inner], b[inner], x[inner]
        swap = xi > (ai + 1.0) / (ai + bi + 2.0)
        aa = np.where(swap, bi, ai)
        bb = np.where(swap, ai, bi)
        xx = np.where(swap, 1.0 - xi, xi)
        log_front = aa * np.log(xx) + bb * np.log1p(-xx) - (gammaln(aa) + gammaln(bb) - gammaln(aa + bb))
        small = np.exp(log_front) * _betacf(aa, bb, xx) / aa
        small = np.clip(small, 0.0, 1.0)
        lower[inner] = np.where(swap, 1.0 - small, small)
        upper[inner] = np.where(swap, small, 1.0 - small)
    return lower.reshape(shape), upper.reshape(shape)


def betainc(a, b, x):
    """Regularized incomplete beta function ``I_x(a, b)``."""
    return betainc_tails(a, b, x)[0]


def _check_df(df):
    df = np.asarray(df, dtype=float)
    if np.any(~(df > 0)):
        raise DomainError("degrees of freedom must be positive")
    return df


def t_two_sided(x, df):
    """``P(|t_df| >= |x|)``."""
    df = _check_df(df)
    x = np.asarray(x, dtype=float)
    p, _ = betainc_tails(df / 2.0, 0.5, df / (df + x * x))
    return p


def t_cdf(x, df):
    df = _check_df(df)
    x = np.asarray(x, dtype=float)
    half_tail = 0.5 * t_two_sided(x, df)
    out = np.where(x >= 0, 1.0 - half_tail, half_tail)
    return out if out.ndim else float(out)


def t_sf(x, df):
    return t_cdf(-np.asarray(x, dtype=float), df)


def f_tails(x, d1, d2):
    """``(P(F <= x), P(F > x))`` for ``F ~ F(d1, d2)``."""
    d1, d2 = _check_df(d1), _check_df(d2)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("F statistic must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(np.isinf(x), 1.0, d1 * x / (d1 * x + d2))
    return betainc_tails(d1 / 2.0, d2 / 2.0, u)


def f_cdf(x, d1, d2):
    out = f_tails(x, d1, d2)[0]
    return out if out.ndim else float(out)


def f_sf(x, d1, d2):
    out = f_tails(x, d1, d2)[1]
    return out if out.ndim else float(out)


def norm_cdf(x):
    x = np.asarray(x, dtype=float)
    out = 0.5 * np.vectorize(math.erfc, otypes=[float])(-x / math.sqrt(2.0))
    return out if out.ndim else float(out)


def chi2_cdf(x, df):
    df = _check_df(df)
    out = gammainc(df / 2.0, np.maximum(np.asarray(x, dtype=float), 0.0) / 2.0)
    return out if np.ndim(out) else float(out)


def _dist_cdf(dist):
    name, *params = dist if isinstance(dist, tuple) else (dist,)
    if name == "t":
        (df,) = params
        _check_df(df)
        return (lambda q: t_cdf(q, df)), (-math.inf, math.inf)
    if name == "F":
        d1, d2 = params
        _check_df(d1), _check_df(d2)
        return (lambda q: f_cdf(q, d1, d2)), (0.0, math.inf)
    if name == "normal":
        return norm_cdf, (-math.inf, math.inf)
    raise DomainError(f"unknown distribution {dist!r}")


def quantile(dist, p):
    """Inverse CDF by bracketed root finding.

    ``dist`` is ``("t", df)``, ``("F", d1, d2)`` or ``"normal"``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    cdf, (lo_lim, _) = _dist_cdf(dist)
    lo = 0.0 if lo_lim == 0.0 else -1.0
    hi = 1.0
    while cdf(hi) < p:
        hi *= 2.0
    if lo_lim != 0.0:
        while cdf(lo) > p:
            lo *= 2.0
    if cdf(lo) == p:
        return lo
    return brentq(lambda q: cdf(q) - p, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def welch_df(v1, v2, n1, n2):
    """Welch-Satterthwaite degrees of freedom (broadcasts over arrays)."""
    if n1 < 2 or n2 < 2:
        raise InsufficientReplicatesError("Welch df needs at least two replicates per group")
    a = np.asarray(v1, dtype=float) / n1
    b = np.asarray(v2, dtype=float) / n2
    if np.any(a + b <= 0):
        raise DomainError("Welch df undefined when both variances are zero")
    out = (a + b) ** 2 / (a * a / (n1 - 1) + b * b / (n2 - 1))
    return out if out.ndim else float(out)


@dataclass
class RandomSource:
    """Counter-based (Philox) stream keyed by ``(seed, stream_id)``.

    Instances are stateful and single-owner; equal keys replay equal draws.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(default=None, init=False, repr=False, compare=False)

    @property
    def generator(self):
        if self._gen is None:
            key = np.array([self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def uniform(self, n):
        return self.generator.random(n)


def gaussian_stream(rs, n):
    """``n`` standard normal draws by Box-Muller on the source's uniforms."""
    n = int(n)
    m = (n + 1) // 2
    u = rs.uniform(2 * m).reshape(m, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty((m, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return z.reshape(-1)[:n]
