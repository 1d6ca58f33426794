"""Latin hypercube sampling and additive noise for small-variation studies."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import NoiseSpec

# Acklam's rational approximation to the inverse normal CDF.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425

_U_MIN = 1e-12


def derived_seed(base_seed: int, *keys: int) -> np.random.SeedSequence:
    """Independent stream per (base_seed, keys); evaluation order cannot matter."""
    return np.random.SeedSequence([int(base_seed), *map(int, keys)])


def lhs(n_samples: int, d: int, seed) -> np.ndarray:
    """Random Latin hypercube on [0, 1)^d.

    Each column is an independent permutation of the strata
    ``[k/n, (k+1)/n)`` with a uniform point drawn inside each stratum.
    ``seed`` may be an int or a ``SeedSequence``.
    """
    if n_samples < 1 or d < 1:
        raise ValueError(f"need n_samples >= 1 and d >= 1, got {n_samples}, {d}")
    rng = np.random.default_rng(seed)
    u = np.empty((n_samples, d))
    for j in range(d):
        strata = rng.permutation(n_samples)
        u[:, j] = (strata + rng.random(n_samples)) / n_samples
        # (k + u)/n can round up to the next stratum edge
        u[:, j] = np.minimum(u[:, j], np.nextafter((strata + 1) / n_samples, 0.0))
    return u


def _ppf_lower(q: float) -> float:
    """Inverse CDF for q in (0, 0.5]; refined by one Halley step."""
    if q < _P_LOW:
        t = math.sqrt(-2.0 * math.log(q))
        x = (((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / (
            (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        )
    else:
        s = q - 0.5
        t = s * s
        x = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * s / (
            ((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0
        )
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
    w = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - w / (1.0 + 0.5 * x * w)


def norm_ppf(u: float) -> float:
    """Standard normal quantile Phi^-1(u) for u in (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"normal quantile needs 0 < u < 1, got {u}")
    if u == 0.5:
        return 0.0
    # 1 - u is exact for u >= 0.5, so the upper tail keeps full precision
    if u < 0.5:
        return _ppf_lower(u)
    return -_ppf_lower(1.0 - u)


_norm_ppf_vec = np.vectorize(norm_ppf, otypes=[float])


def apply_noise(nominal: Sequence[float], specs: Sequence[NoiseSpec], u: Sequence[float]) -> np.ndarray:
    """Perturb ``nominal`` with one row (or rows) of unit samples.

    uniform(w): nominal + (2u - 1) w;  normal(s): nominal + s Phi^-1(u).
    ``u`` may be 1-D (one sample) or 2-D (one sample per row).
    """
    nominal = np.asarray(nominal, dtype=float)
    u = np.asarray(u, dtype=float)
    if len(specs) != nominal.shape[-1] or u.shape[-1] != nominal.shape[-1]:
        raise ValueError("nominal, specs and u must have equal lengths")
    if np.any(u < 0.0) or np.any(u >= 1.0) or not np.all(np.isfinite(u)):
        raise ValueError("unit samples must lie in [0, 1)")
    out = np.broadcast_to(nominal, u.shape).copy()
    for j, spec in enumerate(specs):
        if spec.kind == "uniform":
            out[..., j] += (2.0 * u[..., j] - 1.0) * spec.scale
        elif spec.kind == "normal":
            # an LHS draw of exactly 0 would map to -inf
            uj = np.clip(u[..., j], _U_MIN, 1.0 - _U_MIN)
            out[..., j] += spec.scale * _norm_ppf_vec(uj)
    return out
