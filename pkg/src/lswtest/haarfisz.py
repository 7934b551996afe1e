"""Haar-Fisz transform for chi-square-like periodogram rows.

The Haar pyramid uses pairwise means (smooth) and pairwise half-differences
(detail). Each detail is divided by its parent smooth to form a Fisz ratio,
with 0/0 taken as 0, and the vector is rebuilt with the ratios in place of
the details. All functions act on the last axis and broadcast over the rest.
"""

import numpy as np

from .errors import DomainError, InversionError
from .wavelet import dyadic_levels


def _haar_pyramid(v):
    """Return ``(top_smooth, [detail_finest, ..., detail_coarsest], [smooth parents])``."""
    s = v
    details, parents = [], []
    while s.shape[-1] > 1:
        even, odd = s[..., ::2], s[..., 1::2]
        parent = 0.5 * (even + odd)
        details.append(0.5 * (even - odd))
        parents.append(parent)
        s = parent
    return s, details, parents


def _rebuild(top, details):
    cur = top
    for d in reversed(details):
        nxt = np.empty(cur.shape[:-1] + (2 * cur.shape[-1],))
        nxt[..., ::2] = cur + d
        nxt[..., 1::2] = cur - d
        cur = nxt
    return cur


def fisz_ratios(v):
    """Fisz ratios ``detail / smooth`` for every pyramid level, finest first."""
    v = _validate(v)
    _, details, parents = _haar_pyramid(v)
    out = []
    for d, s in zip(details, parents):
        with np.errstate(divide="ignore", invalid="ignore"):
            out.append(np.where(s > 0, d / np.where(s > 0, s, 1.0), 0.0))
    return out


def _validate(v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] > 1:
        dyadic_levels(v.shape[-1])
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise DomainError("Haar-Fisz input must be finite and non-negative")
    return v


def hf_forward(v):
    """Forward Haar-Fisz transform (full pyramid depth)."""
    v = _validate(v)
    if v.shape[-1] == 1:
        return v.copy()
    top, _, _ = _haar_pyramid(v)
    return _rebuild(top, fisz_ratios(v))


def hf_inverse(h, reference_smooth=None, rtol=1e-9):
    """Invert :func:`hf_forward`.

    The top-level smooth of the original equals the mean of ``h``; when
    ``reference_smooth`` is given it must agree with that mean.
    """
    h = np.asarray(h, dtype=float)
    dyadic_levels(h.shape[-1])
    top, ratios, _ = _haar_pyramid(h)
    if reference_smooth is not None:
        ref = np.asarray(reference_smooth, dtype=float)
        scale = np.maximum(np.abs(ref), 1.0)
        if np.any(np.abs(top[..., 0] - ref) > rtol * scale):
            raise InversionError("reference smooth does not match the transformed vector")
    if np.any(top < 0):
        raise InversionError("negative top-level smooth: not a Haar-Fisz output")
    cur = top
    for f in reversed(ratios):
        if np.any(np.abs(f) > 1 + 1e-9):
            raise InversionError("Fisz ratio outside [-1, 1]: inconsistent pyramid")
        nxt = np.empty(cur.shape[:-1] + (2 * cur.shape[-1],))
        nxt[..., ::2] = cur * (1 + f)
        nxt[..., 1::2] = cur * (1 - f)
        cur = nxt
    return cur


def hf_periodogram(I):
    """Apply :func:`hf_forward` to every scale row of a periodogram grid."""
    return hf_forward(I)
