"""Simulation of the recaptured-set size under the null, alternatives and block correlation.

Replications are generated in fixed-size blocks.  Block ``b`` draws from a
Philox stream keyed by ``(seed, b)``, so a histogram depends only on the seed,
the replication count and the configuration, never on how blocks are spread
over worker threads.

Three samplers are provided:

* null: an exact hypergeometric chain.  Genes are grouped by how many of the
  studies processed so far placed them in the top r; each new study draws its
  r-subset from those groups without replacement.
* alternative: per study, the top r null scores are generated directly as
  order statistics (exponential spacings), merged with the true-positive
  scores, and the null genes that make the cut are assigned through the same
  hypergeometric chain.
* scores: every gene gets an explicit normal score (optionally block
  correlated, optionally shifted for true positives) and the top r is taken
  by sorting.  Slower, but makes no shortcut.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import ValidationError
from .params import AlternativeSpec, EnsembleParams, ModuleModel, TestParams

BLOCK_SIZE = 8192
SCORE_BLOCK_SIZE = 256
THREADS_ENV = "LISTINTERSECT_THREADS"


@dataclass(frozen=True)
class SimConfig:
    ensemble: EnsembleParams
    test: TestParams
    alternative: Optional[AlternativeSpec] = None
    correlation: Optional[ModuleModel] = None
    replications: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.replications, bool) or int(self.replications) != self.replications \
                or self.replications < 1:
            raise ValidationError(f"replications={self.replications!r} must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError(f"seed={self.seed} must be a 64-bit unsigned integer")
        self.test.validate_against(self.ensemble)
        if self.alternative is not None:
            self.alternative.validate_against(self.ensemble)

    def to_dict(self) -> dict:
        return {
            "ensemble": self.ensemble.to_dict(),
            "test": self.test.to_dict(),
            "alternative": self.alternative.to_dict() if self.alternative else None,
            "correlation": self.correlation.to_dict() if self.correlation else None,
            "replications": self.replications,
            "seed": self.seed,
        }


@dataclass
class EmpiricalDist:
    """Histogram of a nonnegative integer statistic; ``counts[v]`` is the frequency of v."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))

    @classmethod
    def from_values(cls, values) -> "EmpiricalDist":
        values = np.asarray(values, dtype=np.int64)
        return cls(np.bincount(values, minlength=1).astype(np.int64))

    @property
    def replications(self) -> int:
        return int(self.counts.sum())

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.counts.size)

    def merge(self, other: "EmpiricalDist") -> "EmpiricalDist":
        size = max(self.counts.size, other.counts.size)
        out = np.zeros(size, dtype=np.int64)
        out[: self.counts.size] += self.counts
        out[: other.counts.size] += other.counts
        return EmpiricalDist(out)

    @property
    def mean(self) -> float:
        return float(self.counts @ self.support / self.replications)

    @property
    def variance(self) -> float:
        mu = self.mean
        return float(self.counts @ (self.support - mu) ** 2 / self.replications)

    @property
    def mean_se(self) -> float:
        return math.sqrt(self.variance / self.replications)

    def tail(self, k: int) -> float:
        """Empirical P(X >= k)."""
        if k <= 0:
            return 1.0
        return float(self.counts[k:].sum() / self.replications)

    def tail_se(self, k: int) -> float:
        p = self.tail(k)
        return math.sqrt(p * (1.0 - p) / self.replications)

    def percentile(self, q: float) -> int:
        """Smallest v with empirical P(X <= v) >= q/100."""
        cdf = np.cumsum(self.counts) / self.replications
        return int(np.searchsorted(cdf, q / 100.0 - 1e-12))

    def to_dict(self) -> dict:
        nz = np.flatnonzero(self.counts)
        return {
            "replications": self.replications,
            "mean": self.mean,
            "variance": self.variance,
            "percentiles": {str(q): self.percentile(q) for q in (5, 50, 95, 99)},
            "histogram": {str(int(v)): int(self.counts[v]) for v in nz},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmpiricalDist":
        hist = {int(k): int(v) for k, v in d["histogram"].items()}
        counts = np.zeros(max(hist, default=0) + 1, dtype=np.int64)
        for k, v in hist.items():
            counts[k] = v
        return cls(counts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["count_value", "frequency"])
        for v in np.flatnonzero(self.counts):
            writer.writerow([int(v), int(self.counts[v])])
        return buf.getvalue()

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalDist):
            return NotImplemented
        a, b = np.trim_zeros(self.counts, "b"), np.trim_zeros(other.counts, "b")
        return a.size == b.size and bool(np.all(a == b))


@dataclass
class AltSimResult:
    total: EmpiricalDist
    true_positives: EmpiricalDist
    false_positives: EmpiricalDist
    tp_capture_rate: float  # per study, per true-positive gene
    null_capture_rate: float  # per study, per null gene

    def to_dict(self) -> dict:
        return {
            "total": self.total.to_dict(),
            "true_positives": self.true_positives.to_dict(),
            "false_positives": self.false_positives.to_dict(),
            "etp": self.true_positives.mean,
            "etp_se": self.true_positives.mean_se,
            "efp": self.false_positives.mean,
            "efp_se": self.false_positives.mean_se,
            "tp_capture_rate": self.tp_capture_rate,
            "null_capture_rate": self.null_capture_rate,
        }


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"{THREADS_ENV}={env!r} is not an integer") from exc
    return os.cpu_count() or 1


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, block], dtype=np.uint64)))


def _run_blocks(fn: Callable, replications: int, seed: int, block_size: int,
                workers: Optional[int]) -> list:
    n_blocks = -(-replications // block_size)
    sizes = [min(block_size, replications - b * block_size) for b in range(n_blocks)]

    def run(b: int):
        return fn(block_rng(seed, b), sizes[b])

    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or n_blocks == 1:
        return [run(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(n_blocks)))


def _chain(rng: np.random.Generator, size: int, num_studies: int, pool: int, draws) -> np.ndarray:
    """Multiplicity classes after each study takes ``draws`` genes out of ``pool``.

    ``draws`` is a scalar or an array of shape (num_studies, size).  Returns an
    array of shape (num_studies + 1, size) whose row j counts genes selected by
    exactly j studies.
    """
    draws = np.broadcast_to(np.asarray(draws, dtype=np.int64), (num_studies, size))
    classes = np.zeros((num_studies + 1, size), dtype=np.int64)
    classes[0] = pool
    for s in range(num_studies):
        remaining = np.full(size, pool, dtype=np.int64)
        left = draws[s].copy()
        moved = np.zeros((s + 2, size), dtype=np.int64)
        for j in range(s + 1):
            good = classes[j]
            take = rng.hypergeometric(good, remaining - good, left)
            moved[j] -= take
            moved[j + 1] += take
            remaining -= good
            left -= take
        classes[: s + 2] += moved
    return classes


def _thin_to_candidates(rng, counts: np.ndarray, T: int, m: Optional[int]) -> np.ndarray:
    # candidate list = uniformly random m-subset of the T genes
    if m is None:
        return counts
    return rng.hypergeometric(counts, T - counts, np.full(counts.shape, m, dtype=np.int64))


def _top_r_mask(scores: np.ndarray, r: int) -> np.ndarray:
    """Boolean top-r membership per row; equal scores are ranked by gene index."""
    T = scores.shape[1]
    if r >= T:
        return np.ones_like(scores, dtype=bool)
    kth = np.partition(scores, T - r, axis=1)[:, T - r][:, None]
    above = scores > kth
    ties = scores == kth
    need = r - above.sum(axis=1, keepdims=True)
    return above | (ties & (np.cumsum(ties, axis=1) <= need))


def _module_index(T: int, module_size: int) -> tuple[np.ndarray, int]:
    """Module id of every gene, and the number of modules."""
    start, length = _module_layout(T, module_size)
    return np.repeat(np.arange(start.size), length), start.size


def _module_layout(T: int, module_size: int) -> tuple[np.ndarray, np.ndarray]:
    """First gene index and length of every module (leftover genes are singletons)."""
    full = T // module_size
    head = full * module_size
    start = np.concatenate([np.arange(full) * module_size, np.arange(head, T)])
    length = np.concatenate([np.full(full, module_size), np.ones(T - head, dtype=np.int64)])
    return start, length


def _ordered_sample(rng, size: int, population: int, k: int) -> np.ndarray:
    """Uniform ordered k-subsets of range(population), one per row, without replacement."""
    if 4 * k > population:
        keys = rng.random((size, population))
        top = np.argpartition(keys, k - 1, axis=1)[:, :k] if k < population \
            else np.broadcast_to(np.arange(population), (size, population)).copy()
        order = np.argsort(np.take_along_axis(keys, top, axis=1), axis=1)
        return np.take_along_axis(top, order, axis=1)
    draws = rng.integers(0, population, (size, k))
    while True:
        # a position is a duplicate if an earlier position in its row holds the same value
        order = np.argsort(draws, axis=1, kind="stable")
        srt = np.take_along_axis(draws, order, axis=1)
        dup_sorted = np.zeros_like(srt, dtype=bool)
        dup_sorted[:, 1:] = srt[:, 1:] == srt[:, :-1]
        if not dup_sorted.any():
            return draws
        dup = np.zeros_like(dup_sorted)
        np.put_along_axis(dup, order, dup_sorted, axis=1)
        # redrawing is label-symmetric, so the accepted tuple stays uniform
        draws[dup] = rng.integers(0, population, int(dup.sum()))


def _rho1_top_genes(rng, size: int, T: int, r: int, module_size: int) -> np.ndarray:
    """Top-r gene ids per row when genes inside a module share one score.

    Module scores are iid, so the module ranking is a uniformly random order;
    inside the boundary module the lower gene indices come first, matching the
    tie rule of ``_top_r_mask``.
    """
    start, length = _module_layout(T, module_size)
    n_mod = start.size
    ranked = _ordered_sample(rng, size, n_mod, min(r, n_mod))
    offsets = np.arange(module_size)
    genes = (start[ranked][..., None] + offsets).reshape(size, -1)
    valid = (offsets < length[ranked][..., None]).reshape(size, -1)
    keep = valid & (np.cumsum(valid, axis=1) <= r)
    return genes[keep].reshape(size, r)


def _count_recaptured(ids: np.ndarray, n: int) -> np.ndarray:
    """Per row, the number of distinct ids occurring at least n times."""
    g = np.sort(ids, axis=1)
    first = np.ones_like(g, dtype=bool)
    first[:, 1:] = g[:, 1:] != g[:, :-1]
    if n == 1:
        return first.sum(axis=1)
    width = g.shape[1]
    run = np.zeros_like(first)
    run[:, : width - n + 1] = g[:, : width - n + 1] == g[:, n - 1:]
    return (first & run).sum(axis=1)


def _check_pure_null(cfg: SimConfig) -> None:
    if cfg.alternative is not None or cfg.correlation is not None:
        raise ValidationError("simulate_null takes a config without alternative or correlation")


def simulate_null(cfg: SimConfig, workers: Optional[int] = None) -> EmpiricalDist:
    """Exact null distribution of |S_n(r)| (or |C^m_n(r)|) by hypergeometric chain."""
    _check_pure_null(cfg)
    N, T = cfg.ensemble.num_studies, cfg.ensemble.genes_per_study
    r, n, m = cfg.test.rank_threshold, cfg.test.recapture_rate, cfg.test.candidate_list_size

    def block(rng, size):
        classes = _chain(rng, size, N, T, r)
        counts = classes[n:].sum(axis=0)
        return EmpiricalDist.from_values(_thin_to_candidates(rng, counts, T, m))

    return _merge(_run_blocks(block, cfg.replications, cfg.seed, BLOCK_SIZE, workers))


def _merge(dists) -> EmpiricalDist:
    out = EmpiricalDist()
    for d in dists:
        out = out.merge(d)
    return out


def _order_statistic_block(rng, size, N, T, r, n, effects: np.ndarray):
    tp = effects.size
    M = T - tp
    k = min(r, M)
    tp_hits = np.zeros((size, tp), dtype=np.int64)
    null_draws = np.empty((N, size), dtype=np.int64)
    for s in range(N):
        if k > 0:
            spacing = np.cumsum(rng.standard_exponential((size, k)), axis=1)
            rest = rng.standard_gamma(M + 1 - k, size) if M + 1 - k > 0 else 0.0
            # smallest k of M uniform upper-tail probabilities, ascending
            upper = spacing / (spacing[:, -1] + rest)[:, None]
            null_top = -special.ndtri(upper)
        else:
            null_top = np.empty((size, 0))
        alt = effects + rng.standard_normal((size, tp))
        pooled = np.concatenate([null_top, alt], axis=1)
        if r >= pooled.shape[1]:
            captured = np.ones_like(alt, dtype=bool)
        else:
            cut = np.partition(pooled, pooled.shape[1] - r, axis=1)[:, pooled.shape[1] - r]
            captured = alt >= cut[:, None]
        tp_hits += captured
        null_draws[s] = r - captured.sum(axis=1)
    classes = _chain(rng, size, N, M, null_draws)
    fp = classes[n:].sum(axis=0)
    tp_count = (tp_hits >= n).sum(axis=1)
    return tp_count, fp, tp_hits.sum(), null_draws.sum()


def _score_block(rng, size, N, T, r, means: Optional[np.ndarray], model: Optional[ModuleModel]):
    """Per-gene recapture counts from explicit scores, shape (size, T)."""
    rho = model.within_module_rho if model else 0.0
    if model is not None and rho > 0.0:
        module_of, n_mod = _module_index(T, model.module_size)
    hits = np.zeros((size, T), dtype=np.int16)
    for _ in range(N):
        scores = np.zeros((size, T))
        if rho > 0.0:
            scores += math.sqrt(rho) * rng.standard_normal((size, n_mod))[:, module_of]
        if rho < 1.0:
            scores += math.sqrt(1.0 - rho) * rng.standard_normal((size, T))
        if means is not None:
            scores += means
        hits += _top_r_mask(scores, r)
    return hits


def _alt_means(T: int, alt: AlternativeSpec) -> np.ndarray:
    means = np.zeros(T)
    means[: alt.tp] = alt.true_positive_effects
    return means


def simulate_alternative(cfg: SimConfig, method: str = "auto",
                         workers: Optional[int] = None) -> AltSimResult:
    """Recaptured true and false positives with normal(mu_a, 1) true-positive scores.

    ``method`` is ``"order_statistics"`` (fast, independent genes only),
    ``"scores"`` (explicit per-gene scores, supports correlation) or
    ``"auto"``.  True positives occupy gene indices 0..tp-1 in the score path.
    """
    if cfg.alternative is None:
        raise ValidationError("simulate_alternative needs an alternative")
    if cfg.test.candidate_list_size is not None:
        raise ValidationError("alternative simulation covers the discovery statistic only")
    if method == "auto":
        method = "scores" if cfg.correlation is not None else "order_statistics"
    if method == "order_statistics" and cfg.correlation is not None:
        raise ValidationError("order-statistic sampler assumes independent genes")
    if method not in ("order_statistics", "scores"):
        raise ValidationError(f"unknown method {method!r}")

    N, T = cfg.ensemble.num_studies, cfg.ensemble.genes_per_study
    r, n = cfg.test.rank_threshold, cfg.test.recapture_rate
    alt = cfg.alternative
    tp = alt.tp

    if method == "order_statistics":
        effects = np.asarray(alt.true_positive_effects, dtype=float)

        def block(rng, size):
            return _order_statistic_block(rng, size, N, T, r, n, effects)
        block_size = BLOCK_SIZE
    else:
        means = _alt_means(T, alt)

        def block(rng, size):
            hits = _score_block(rng, size, N, T, r, means, cfg.correlation)
            tp_hits = hits[:, :tp]
            fp_hits = hits[:, tp:]
            return ((tp_hits >= n).sum(axis=1), (fp_hits >= n).sum(axis=1),
                    int(tp_hits.sum()), int(fp_hits.sum()))
        block_size = SCORE_BLOCK_SIZE

    parts = _run_blocks(block, cfg.replications, cfg.seed, block_size, workers)
    tp_counts = np.concatenate([p[0] for p in parts])
    fp_counts = np.concatenate([p[1] for p in parts])
    reps = cfg.replications
    return AltSimResult(
        total=EmpiricalDist.from_values(tp_counts + fp_counts),
        true_positives=EmpiricalDist.from_values(tp_counts),
        false_positives=EmpiricalDist.from_values(fp_counts),
        tp_capture_rate=sum(p[2] for p in parts) / (reps * N * tp) if tp else float("nan"),
        null_capture_rate=sum(p[3] for p in parts) / (reps * N * (T - tp)),
    )


def simulate_correlated(cfg: SimConfig, workers: Optional[int] = None) -> EmpiricalDist:
    """|S_n(r)| with block-equicorrelated scores, identical module layout in every study."""
    if cfg.correlation is None:
        raise ValidationError("simulate_correlated needs a correlation model")
    N, T = cfg.ensemble.num_studies, cfg.ensemble.genes_per_study
    r, n, m = cfg.test.rank_threshold, cfg.test.recapture_rate, cfg.test.candidate_list_size
    means = _alt_means(T, cfg.alternative) if cfg.alternative is not None else None

    model = cfg.correlation
    if model.within_module_rho == 1.0 and means is None:
        def block(rng, size):
            ids = np.concatenate(
                [_rho1_top_genes(rng, size, T, r, model.module_size) for _ in range(N)], axis=1)
            counts = _count_recaptured(ids, n)
            return EmpiricalDist.from_values(_thin_to_candidates(rng, counts, T, m))
        block_size = BLOCK_SIZE // 8
    else:
        def block(rng, size):
            hits = _score_block(rng, size, N, T, r, means, model)
            counts = (hits >= n).sum(axis=1)
            return EmpiricalDist.from_values(_thin_to_candidates(rng, counts, T, m))
        block_size = SCORE_BLOCK_SIZE

    return _merge(_run_blocks(block, cfg.replications, cfg.seed, block_size, workers))


def simulate(cfg: SimConfig, workers: Optional[int] = None):
    """Dispatch on the config: alternative, correlated or plain null."""
    if cfg.alternative is not None:
        return simulate_alternative(cfg, workers=workers)
    if cfg.correlation is not None:
        return simulate_correlated(cfg, workers=workers)
    return simulate_null(cfg, workers=workers)


def empirical_pvalue(dist: EmpiricalDist, observed: int) -> tuple[float, float]:
    """Empirical P(X >= observed) and its binomial standard error."""
    return dist.tail(observed), dist.tail_se(observed)
