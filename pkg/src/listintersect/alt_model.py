"""Expected recapture behaviour under a postulated alternative.

Scores are standard normal for null genes and normal(mu_a, 1) for true
positives.  The top r of a study is modelled by a common score cutoff c chosen
so that the expected number of genes above it equals r:

    (T - tp) * P(Z > c) + sum_a P(Z > c - mu_a) = r

Each gene then clears the cutoff independently in every study, so recapture in
at least n of N studies is again a binomial tail, now with a gene-specific
success probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .distributions import BinomialSpec, binomial_tail
from .errors import ParameterOutOfRangeError
from .params import AlternativeSpec, EnsembleParams, TestParams

BRACKET = (-10.0, 10.0)
_BISECTION_STEPS = 200


@dataclass(frozen=True)
class CaptureThreshold:
    threshold: float
    null_capture_prob: float
    tp_capture_probs: tuple[float, ...]


@dataclass(frozen=True)
class AltSummary:
    threshold: float
    null_capture_prob: float
    tp_capture_probs: tuple[float, ...]
    efp: float
    etp: float
    esns: Optional[float]  # None when there are no true positives
    fdr: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "null_capture_prob": self.null_capture_prob,
            "efp": self.efp,
            "etp": self.etp,
            "esns": self.esns,
            "fdr": self.fdr,
        }


@dataclass
class CaptureGrid:
    """Capture probabilities for a vector of rank thresholds.

    ``group_probs[i, j]`` is the per-study capture probability of a true
    positive with effect ``effects[i]`` at threshold ``ranks[j]``.
    """

    ranks: np.ndarray
    threshold: np.ndarray
    null_prob: np.ndarray
    effects: list[float]
    multiplicity: list[int]
    group_probs: np.ndarray


def _occupancy(c: np.ndarray, n_null: int, effects, counts) -> np.ndarray:
    total = n_null * special.ndtr(-c)
    for mu, k in zip(effects, counts):
        total = total + k * special.ndtr(mu - c)
    return total


def capture_grid(e: EnsembleParams, alt: AlternativeSpec, ranks) -> CaptureGrid:
    """Solve the occupancy equation for every threshold in ``ranks`` at once."""
    alt.validate_against(e)
    T = e.genes_per_study
    ranks = np.atleast_1d(np.asarray(ranks, dtype=np.int64))
    if np.any(ranks < 1) or np.any(ranks > T):
        raise ParameterOutOfRangeError(f"rank thresholds must lie in [1, {T}]")
    effects, counts = alt.effect_groups()
    n_null = T - alt.tp
    target = ranks.astype(float)

    if alt.tp == 0:
        null_prob = target / T
        c = special.ndtri(1.0 - null_prob)  # -inf at r = T
        return CaptureGrid(ranks, c, null_prob, [], [], np.zeros((0, ranks.size)))

    # occupancy is strictly decreasing in c
    lo = np.full(ranks.shape, BRACKET[0])
    hi = np.full(ranks.shape, BRACKET[1])
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = _occupancy(mid, n_null, effects, counts) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            break
    c = 0.5 * (lo + hi)
    full = ranks == T
    c = np.where(full, -np.inf, c)
    null_prob = np.where(full, 1.0, special.ndtr(-c))
    group = np.array([np.where(full, 1.0, special.ndtr(mu - c)) for mu in effects])
    return CaptureGrid(ranks, c, null_prob, effects, counts, group)


def _per_gene(grid: CaptureGrid, alt: AlternativeSpec, col: int = 0) -> tuple[float, ...]:
    per_group = {mu: float(grid.group_probs[i, col]) for i, mu in enumerate(grid.effects)}
    return tuple(per_group[mu] for mu in alt.true_positive_effects)


def solve_capture_threshold(e: EnsembleParams, alt: AlternativeSpec, r: int) -> CaptureThreshold:
    grid = capture_grid(e, alt, [r])
    return CaptureThreshold(
        threshold=float(grid.threshold[0]),
        null_capture_prob=float(grid.null_prob[0]),
        tp_capture_probs=_per_gene(grid, alt),
    )


def grid_counts(grid: CaptureGrid, num_studies: int, n: int, tp: int, T: int):
    """EFP, ETP arrays over ``grid.ranks`` at recapture rate n."""
    efp = (T - tp) * np.asarray(binomial_tail(BinomialSpec(num_studies, grid.null_prob), n))
    etp = np.zeros_like(efp)
    for probs, k in zip(grid.group_probs, grid.multiplicity):
        etp = etp + k * np.asarray(binomial_tail(BinomialSpec(num_studies, probs), n))
    return efp, etp


def fdr_from_counts(efp, etp):
    efp = np.asarray(efp, dtype=float)
    etp = np.asarray(etp, dtype=float)
    total = efp + etp
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, efp / np.where(total > 0, total, 1.0), 0.0)


def expected_counts(e: EnsembleParams, alt: AlternativeSpec, t: TestParams) -> AltSummary:
    t.validate_against(e)
    grid = capture_grid(e, alt, [t.rank_threshold])
    efp, etp = grid_counts(grid, e.num_studies, t.recapture_rate, alt.tp, e.genes_per_study)
    efp_v, etp_v = float(efp[0]), float(etp[0])
    return AltSummary(
        threshold=float(grid.threshold[0]),
        null_capture_prob=float(grid.null_prob[0]),
        tp_capture_probs=_per_gene(grid, alt),
        efp=efp_v,
        etp=etp_v,
        esns=etp_v / alt.tp if alt.tp else None,
        fdr=float(fdr_from_counts(efp_v, etp_v)),
    )
