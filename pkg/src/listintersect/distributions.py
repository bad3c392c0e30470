"""Tail probabilities for the binomial, Poisson and standard normal laws.

``binomial_tail`` is computed here from scratch; the Poisson tail and the
normal CDF/quantile delegate to ``scipy.special``.  All functions accept numpy
arrays for the probability/argument and return plain floats for scalar input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import InvalidProbabilityError, ParameterOutOfRangeError, ValidationError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class BinomialSpec:
    trials: int
    success_prob: ArrayLike

    def __post_init__(self):
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 0:
            raise ParameterOutOfRangeError(f"trials={self.trials!r} must be a nonnegative integer")
        p = np.asarray(self.success_prob, dtype=float)
        if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise InvalidProbabilityError(f"success_prob outside [0, 1]: {self.success_prob!r}")


@dataclass(frozen=True)
class PoissonSpec:
    mean: ArrayLike

    def __post_init__(self):
        lam = np.asarray(self.mean, dtype=float)
        if np.any(np.isnan(lam)) or np.any(lam < 0.0):
            raise ValidationError(f"Poisson mean must be >= 0, got {self.mean!r}")


def _as_output(value: np.ndarray, like) -> ArrayLike:
    return float(np.asarray(value).reshape(-1)[0]) if np.ndim(like) == 0 else value


def _check_k(k) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ParameterOutOfRangeError(f"k={k!r} must be a nonnegative integer")
    return int(k)


def binomial_tail(spec: BinomialSpec, k: int) -> ArrayLike:
    """P(X >= k) for X ~ Binomial(trials, success_prob).

    The pmf is built from log successive ratios accumulated outward from the
    mode and normalised by its own total, so no term needs an absolute
    log-binomial coefficient (those lose ~1e-11 at trials ~ 1e4).
    """
    k = _check_k(k)
    N = int(spec.trials)
    p = np.atleast_1d(np.asarray(spec.success_prob, dtype=float))
    if k == 0:
        return _as_output(np.ones_like(p), spec.success_prob)
    if k > N:
        return _as_output(np.zeros_like(p), spec.success_prob)

    out = np.empty_like(p)
    at_zero = p == 0.0
    at_one = p == 1.0
    out[at_zero] = 0.0
    out[at_one] = 1.0
    inner = ~(at_zero | at_one)
    if np.any(inner):
        q = p[inner][:, None]
        j = np.arange(N, dtype=float)[None, :]
        # step[j] = log pmf(j+1) - log pmf(j)
        step = np.log((N - j) / (j + 1.0)) + np.log(q) - np.log1p(-q)
        mode = np.floor((N + 1) * q).clip(0, N)
        fwd = np.where(j >= mode, step, 0.0)
        bwd = np.where(j < mode, step, 0.0)
        rel = np.zeros((q.shape[0], N + 1))
        rel[:, 1:] = np.cumsum(fwd, axis=1)
        rel[:, :-1] -= np.cumsum(bwd[:, ::-1], axis=1)[:, ::-1]
        w = np.exp(rel - rel.max(axis=1, keepdims=True))
        upper = w[:, k:].sum(axis=1)
        lower = w[:, :k].sum(axis=1)
        out[inner] = upper / (upper + lower)
    return _as_output(out, spec.success_prob)


def poisson_tail(spec: PoissonSpec, k: int) -> ArrayLike:
    """P(Y >= k) for Y ~ Poisson(mean), via the regularized lower incomplete gamma."""
    k = _check_k(k)
    lam = np.asarray(spec.mean, dtype=float)
    if k == 0:
        return _as_output(np.ones_like(lam), spec.mean)
    return _as_output(np.asarray(special.gammainc(k, lam)), spec.mean)


def normal_cdf(z: ArrayLike) -> ArrayLike:
    return _as_output(np.asarray(special.ndtr(z)), z)


def normal_quantile(u: ArrayLike) -> ArrayLike:
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValidationError(f"normal_quantile needs input strictly inside (0, 1), got {u!r}")
    return _as_output(np.asarray(special.ndtri(arr)), u)
