"""Closed-form null-hypothesis quantities for the discovery and concordance tests.

Under random ranking each gene lands in a study's top-r list with probability
r/T independently across studies, so the chance of being recaptured in at
least n of N lists is a binomial tail.  Set sizes are sums of these Bernoulli
indicators; their null law is approximated by a Poisson (and a binomial) with
the matching mean.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

from .distributions import BinomialSpec, PoissonSpec, binomial_tail, poisson_tail
from .errors import MissingCandidateSizeError, ParameterOutOfRangeError, UndefinedFDRError
from .params import EnsembleParams, TestParams

# Thresholds behind the approximation diagnostics.
MAX_DEPTH_FRACTION = 0.05  # r/T at or below this counts as T >> r
MAX_MEAN_TO_DEPTH = 0.1  # E/r at or below this counts as E << r
MAX_RECAPTURE_PROB = 0.01  # P0 at or below this counts as small


@dataclass(frozen=True)
class ApproximationFlags:
    depth_small: bool  # T >> r
    mean_small: bool  # E|S| << r
    recapture_prob_small: bool

    @property
    def all_ok(self) -> bool:
        return self.depth_small and self.mean_small and self.recapture_prob_small

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NullSummary:
    kind: Literal["discovery", "concordance"]
    recapture_prob: float
    scale: int  # T for discovery, m for concordance
    expected_count: float
    flags: ApproximationFlags

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = self.flags.to_dict()
        return d


@dataclass(frozen=True)
class PValueBundle:
    poisson_pvalue: float
    binomial_pvalue: float
    tail_convention: str = "at_least_observed"


def null_recapture_prob(e: EnsembleParams, t: TestParams) -> float:
    """P(a given gene is in the top r of at least n of the N studies)."""
    t.validate_against(e)
    p0 = t.rank_threshold / e.genes_per_study
    return binomial_tail(BinomialSpec(e.num_studies, p0), t.recapture_rate)


def _flags(e: EnsembleParams, t: TestParams, p0n: float, expected: float) -> ApproximationFlags:
    r = t.rank_threshold
    return ApproximationFlags(
        depth_small=r / e.genes_per_study <= MAX_DEPTH_FRACTION,
        mean_small=expected / r <= MAX_MEAN_TO_DEPTH,
        recapture_prob_small=p0n <= MAX_RECAPTURE_PROB,
    )


def expected_null_count_discovery(e: EnsembleParams, t: TestParams) -> NullSummary:
    p0n = null_recapture_prob(e, t)
    expected = e.genes_per_study * p0n
    return NullSummary("discovery", p0n, e.genes_per_study, expected, _flags(e, t, p0n, expected))


def expected_null_count_concordance(e: EnsembleParams, t: TestParams) -> NullSummary:
    if t.candidate_list_size is None:
        raise MissingCandidateSizeError("concordance test needs candidate_list_size")
    p0n = null_recapture_prob(e, t)
    m = t.candidate_list_size
    expected = m * p0n
    return NullSummary("concordance", p0n, m, expected, _flags(e, t, p0n, expected))


def expected_null(e: EnsembleParams, t: TestParams) -> NullSummary:
    """Concordance summary when a candidate-list size is given, discovery otherwise."""
    if t.candidate_list_size is None:
        return expected_null_count_discovery(e, t)
    return expected_null_count_concordance(e, t)


def set_pvalue(summary: NullSummary, observed: int) -> PValueBundle:
    """P(count >= observed) under the Poisson and the binomial approximations."""
    if isinstance(observed, bool) or int(observed) != observed or observed < 0:
        raise ParameterOutOfRangeError(f"observed={observed!r} must be a nonnegative integer")
    observed = int(observed)
    return PValueBundle(
        poisson_pvalue=poisson_tail(PoissonSpec(summary.expected_count), observed),
        binomial_pvalue=binomial_tail(BinomialSpec(summary.scale, summary.recapture_prob), observed),
    )


def fdr_estimate(summary: NullSummary, observed: int) -> float:
    """Expected null count over observed set size, capped at 1."""
    if observed < 1:
        raise UndefinedFDRError("FDR estimate is undefined for an empty observed set")
    return min(1.0, summary.expected_count / observed)
