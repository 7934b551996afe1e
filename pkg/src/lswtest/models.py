"""Simulation models P1-P12 (power) and M1-M5 (size).

Spectra are stored finest-first like every other grid; the model tables use
the coarsest-first "figure" numbering in which the finest of ``J`` levels is
``J - 1``. :func:`figure_level_row` does the translation. Model time
``t = 1..T`` maps to array index ``k = t - 1``, and a spectrum support written
``z in (a/T, b/T)`` covers ``k = a .. b-1``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import RandomSource, gaussian_stream
from .errors import DomainError, UnknownModelError
from .spectral import raw_periodogram, smooth_time
from .wavelet import correct_periodogram, dyadic_levels, ndwt_adjoint

T_DEFAULT = 256
SAMPLES_PER_DAY = 64  # 22.5 minute sampling
BURN_IN = 100
CHIRP_HOLD = 16
CHIRP_RAMP_END = 128
CHIRP_SMOOTHING = 17

POWER_MODELS = tuple(f"P{i}" for i in range(1, 13))
SIZE_MODELS = tuple(f"M{i}" for i in range(1, 6))
ALL_MODELS = POWER_MODELS + SIZE_MODELS


def figure_level_row(fig_level, J):
    """Row index of figure level ``fig_level`` (0 = coarsest) in a finest-first grid."""
    return J - fig_level - 1


@dataclass(frozen=True)
class LswParams:
    spectrum: str
    length: int = T_DEFAULT


@dataclass(frozen=True)
class TvarParams:
    """AR(2) with time-varying first coefficient; ``phi1[k]`` applies at ``t = k + 1``."""

    phi1: tuple
    phi2: float = -0.81
    length: int = T_DEFAULT

    def __post_init__(self):
        if len(self.phi1) != self.length:
            raise DomainError(f"phi1 needs {self.length} values, got {len(self.phi1)}")
        if not abs(self.phi2) < 1:
            raise DomainError("|phi2| must be < 1")


@dataclass(frozen=True)
class CosineParams:
    period_hours: float
    amplitude: float = 2.0
    sample_interval_minutes: float = 22.5
    length: int = T_DEFAULT

    @property
    def period_samples(self):
        return self.period_hours * 60.0 / self.sample_interval_minutes


@dataclass(frozen=True)
class ModelId:
    name: str
    group: int = 1

    def __post_init__(self):
        if self.name not in ALL_MODELS:
            raise UnknownModelError(f"unknown model {self.name!r}")
        if self.group not in (1, 2):
            raise UnknownModelError(f"group must be 1 or 2, got {self.group!r}")

    @property
    def is_size_model(self):
        return self.name.startswith("M")


# -- spectra -----------------------------------------------------------------


def _fixed_spectrum(finest_support, finest_value=1.0, finest_offset=0.0, T=T_DEFAULT):
    """Shared layout of P1-P3: ``4 cos^2(2 pi z)`` at figure level 3 plus a finest-level bump."""
    J = dyadic_levels(T)
    S = np.zeros((J, T))
    z = np.arange(T) / T
    S[figure_level_row(3, J)] = 4.0 * np.cos(2 * np.pi * z) ** 2
    a, b = finest_support
    finest = np.full(T, finest_offset)
    finest[a:b] += finest_value
    S[figure_level_row(J - 1, J)] = finest
    return S


def chirp_signal(target_period_hours, T=T_DEFAULT):
    """Deterministic chirp whose period moves from 24 h to the target.

    The instantaneous period is 24 h for ``k < 16``, moves linearly to the
    target between ``k = 16`` and ``k = 128`` and stays there afterwards.
    """
    start = 24.0 * SAMPLES_PER_DAY / 24.0
    end = target_period_hours * SAMPLES_PER_DAY / 24.0
    k = np.arange(T, dtype=float)
    frac = np.clip((k - CHIRP_HOLD) / (CHIRP_RAMP_END - CHIRP_HOLD), 0.0, 1.0)
    period = start + (end - start) * frac
    phase = np.concatenate([[0.0], np.cumsum(1.0 / period)[:-1]])
    return np.cos(2 * np.pi * phase), period


@lru_cache(maxsize=8)
def _chirp_spectrum(target_period_hours, T):
    c, _ = chirp_signal(target_period_hours, T)
    I = raw_periodogram(c - c.mean())
    L = correct_periodogram(smooth_time(I, CHIRP_SMOOTHING))
    S = np.clip(L, 0.0, None)
    S /= S.max()
    S.setflags(write=False)
    return S


def chirp_spectrum(target_period_hours, T=T_DEFAULT):
    """Spectrum of the gradual-period-change models (targets 25, 26 or 27 hours)."""
    if target_period_hours not in (25, 26, 27):
        raise UnknownModelError(f"unsupported chirp target {target_period_hours!r}; use 25, 26 or 27")
    return _chirp_spectrum(float(target_period_hours), T)


@lru_cache(maxsize=16)
def _named_spectrum(name, T):
    if name == "fixed-base":
        S = _fixed_spectrum((1, 56), T=T)
    elif name == "fixed-wide":
        S = _fixed_spectrum((1, 156), T=T)
    elif name == "fixed-narrow":
        S = _fixed_spectrum((1, 50), T=T)
    elif name == "fixed-plus-constant":
        S = _fixed_spectrum((1, 56), finest_offset=1.0, T=T)
    elif name.startswith("chirp-"):
        return chirp_spectrum(int(name.split("-")[1]), T)
    else:
        raise UnknownModelError(f"unknown spectrum {name!r}")
    S.setflags(write=False)
    return S


def named_spectrum(name, T=T_DEFAULT):
    return _named_spectrum(name, T)


_SPECTRUM_MODELS = {
    "P1": ("fixed-base", "fixed-wide"),
    "P2": ("fixed-base", "fixed-narrow"),
    "P3": ("fixed-base", "fixed-plus-constant"),
    "P4": ("chirp-25", "chirp-26"),
    "P5": ("chirp-25", "chirp-27"),
    "M1": ("fixed-base", "fixed-base"),
    "M2": ("chirp-25", "chirp-25"),
}


def spectrum_for(model, group=1, T=T_DEFAULT):
    """Generating spectrum (finest-first ``(J, T)``) of a spectrum-defined model."""
    mid = model if isinstance(model, ModelId) else ModelId(model, group)
    if mid.name not in _SPECTRUM_MODELS:
        raise UnknownModelError(f"model {mid.name} is not defined by a spectrum")
    return named_spectrum(_SPECTRUM_MODELS[mid.name][mid.group - 1], T)


# -- generator configurations --------------------------------------------------


def _abrupt_phi1(group, T=T_DEFAULT):
    t = np.arange(1, T + 1)
    middle = -0.9 if group == 1 else -0.3
    return tuple(np.where((t >= 54) & (t <= 128), middle, 0.8).tolist())


def _slow_phi1(group, T=T_DEFAULT):
    t = np.arange(1, T + 1)
    depth = 0.7 if group == 1 else 0.1
    return tuple((-0.8 * (1 - depth * np.cos(np.pi * t / T))).tolist())


_COSINE_PERIODS = {"P8": 21.0, "P9": 22.0, "P10": 23.0, "P11": 23.5, "P12": 23.75}


def model_config(model, group=1):
    """Generator parameters for one group of a model.

    Size models return the same configuration for both groups.
    """
    mid = model if isinstance(model, ModelId) else ModelId(model, group)
    name, g = mid.name, mid.group
    if name in _SPECTRUM_MODELS:
        return LswParams(_SPECTRUM_MODELS[name][g - 1])
    if name == "P6":
        return TvarParams(_abrupt_phi1(g))
    if name == "P7":
        return TvarParams(_slow_phi1(g))
    if name == "M3":
        return TvarParams(_abrupt_phi1(1))
    if name == "M4":
        return TvarParams(_slow_phi1(1))
    if name == "M5":
        return CosineParams(24.0)
    return CosineParams(24.0 if g == 1 else _COSINE_PERIODS[name])


# -- generators --------------------------------------------------------------


def _as_sources(rs):
    return [rs] if isinstance(rs, RandomSource) else list(rs)


def lsw_synthesize(S, rs):
    """Gaussian LSW realisation(s) of spectrum ``S`` with periodic wrap, mean removed.

    ``X[t] = sum_{j,k} sqrt(S_j(k/T)) psi_j[(k - t) mod T] xi[j, k]``. Passing a
    list of sources returns one row per source.
    """
    S = np.asarray(S, dtype=float)
    if np.any(S < 0):
        raise DomainError("spectrum must be non-negative")
    J, T = S.shape
    sources = _as_sources(rs)
    xi = np.stack([gaussian_stream(s, J * T).reshape(J, T) for s in sources])
    x = ndwt_adjoint(np.sqrt(S) * xi)
    x -= x.mean(axis=-1, keepdims=True)
    return x[0] if isinstance(rs, RandomSource) else x


def tvar2_recursion(params, innovations):
    """Run the AR(2) recursion on ``(..., BURN_IN + T)`` innovations.

    The first ``BURN_IN`` steps use the ``t = 1`` coefficients and are
    discarded; the recursion starts from ``X[-1] = X[-2] = 0``.
    """
    eps = np.asarray(innovations, dtype=float)
    T = params.length
    phi1 = np.concatenate([np.full(BURN_IN, params.phi1[0]), np.asarray(params.phi1)])
    x1 = np.zeros(eps.shape[:-1])
    x2 = np.zeros(eps.shape[:-1])
    out = np.empty(eps.shape[:-1] + (T,))
    for t in range(BURN_IN + T):
        x0 = phi1[t] * x1 + params.phi2 * x2 + eps[..., t]
        if t >= BURN_IN:
            out[..., t - BURN_IN] = x0
        x2, x1 = x1, x0
    out -= out.mean(axis=-1, keepdims=True)
    return out


def tvar2_simulate(params, rs):
    sources = _as_sources(rs)
    eps = np.stack([gaussian_stream(s, BURN_IN + params.length) for s in sources])
    x = tvar2_recursion(params, eps)
    return x[0] if isinstance(rs, RandomSource) else x


def cosine_mean(params):
    t = np.arange(params.length)
    return params.amplitude * np.cos(2 * np.pi * t / params.period_samples)


def cosine_simulate(params, rs, noise=True):
    """``2 cos(2 pi t / p) + N(0, 1)`` noise, mean removed; ``noise=False`` skips centring too."""
    sources = _as_sources(rs)
    f = cosine_mean(params)
    if not noise:
        x = np.tile(f, (len(sources), 1))
    else:
        eps = np.stack([gaussian_stream(s, params.length) for s in sources])
        x = f + eps
        x -= x.mean(axis=-1, keepdims=True)
    return x[0] if isinstance(rs, RandomSource) else x


def simulate(config, sources):
    """Realise one series per source from a generator configuration; returns ``(N, T)``."""
    sources = _as_sources(sources)
    if isinstance(config, LswParams):
        return lsw_synthesize(named_spectrum(config.spectrum, config.length), sources)
    if isinstance(config, TvarParams):
        return tvar2_simulate(config, sources)
    if isinstance(config, CosineParams):
        return cosine_simulate(config, sources)
    raise UnknownModelError(f"unknown generator configuration {config!r}")


def simulate_model(model, n_per_group, seed, rep=0, n2=None):
    """Both groups of one replicate experiment, with streams ``rep*(N1+N2) + i``."""
    n1 = n_per_group
    n2 = n_per_group if n2 is None else n2
    base = rep * (n1 + n2)
    s1 = [RandomSource(seed, base + i) for i in range(n1)]
    s2 = [RandomSource(seed, base + n1 + i) for i in range(n2)]
    return simulate(model_config(model, 1), s1), simulate(model_config(model, 2), s2)
