"""Ranked gene lists from real studies: parsing, intersection and reports.

Ranked-list files are UTF-8 TSV with one gene per line, ``gene_id`` optionally
followed by a tab and a score.  Lines starting with ``#`` are ignored.  With
scores the list is ordered by descending score, ties by ascending gene id;
without scores the file order is the ranking.  Candidate-list files hold one
gene id per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .correlation import CorrectedTail, corrected_tail
from .errors import (
    DuplicateGeneError,
    DuplicateStudyError,
    EmptyCandidateListError,
    ParameterOutOfRangeError,
    ShortListError,
    ValidationError,
)
from .montecarlo import SimConfig, simulate_null
from .null_model import (
    NullSummary,
    expected_null_count_concordance,
    expected_null_count_discovery,
    fdr_estimate,
    set_pvalue,
)
from .params import EnsembleParams, ModuleModel, TestParams


@dataclass(frozen=True)
class RankedStudy:
    study_id: str
    genes: tuple[str, ...]
    scores: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        seen = set()
        for g in self.genes:
            if g in seen:
                raise DuplicateGeneError(f"gene {g!r} appears twice in study {self.study_id!r}")
            seen.add(g)
        if self.scores is not None and len(self.scores) != len(self.genes):
            raise ValidationError(f"study {self.study_id!r}: scores and genes differ in length")

    @classmethod
    def from_entries(cls, study_id: str, entries: Iterable[tuple[str, Optional[float]]]) -> "RankedStudy":
        entries = list(entries)
        with_score = [s is not None for _, s in entries]
        if any(with_score) and not all(with_score):
            raise ValidationError(f"study {study_id!r}: either every gene has a score or none does")
        if entries and all(with_score):
            entries.sort(key=lambda e: (-e[1], e[0]))
            return cls(study_id, tuple(g for g, _ in entries), tuple(float(s) for _, s in entries))
        return cls(study_id, tuple(g for g, _ in entries))

    def top(self, r: int) -> tuple[str, ...]:
        if len(self.genes) < r:
            raise ShortListError(
                f"study {self.study_id!r} ranks {len(self.genes)} genes, fewer than r={r}"
            )
        return self.genes[:r]


def parse_ranked_lines(study_id: str, lines: Iterable[str]) -> RankedStudy:
    entries = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        gene = cols[0].strip()
        if not gene or len(cols) > 2:
            raise ValidationError(f"{study_id}:{lineno}: expected gene_id[<TAB>score]")
        score = None
        if len(cols) == 2 and cols[1].strip():
            try:
                score = float(cols[1])
            except ValueError as exc:
                raise ValidationError(f"{study_id}:{lineno}: bad score {cols[1]!r}") from exc
            if math.isnan(score):
                raise ValidationError(f"{study_id}:{lineno}: score is NaN")
        entries.append((gene, score))
    return RankedStudy.from_entries(study_id, entries)


def read_ranked_list(path, study_id: Optional[str] = None) -> RankedStudy:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_ranked_lines(study_id or path.stem, fh)


def read_candidate_list(path) -> list[str]:
    genes = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            g = line.strip()
            if g and not g.startswith("#"):
                genes.append(g)
    return genes


@dataclass(frozen=True)
class Member:
    gene_id: str
    recapture_count: int
    studies: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"gene_id": self.gene_id, "recapture_count": self.recapture_count,
                "studies": list(self.studies)}


@dataclass(frozen=True)
class RecaptureReport:
    kind: str
    ensemble: EnsembleParams
    test: TestParams
    observed: int
    expected_null: float
    recapture_prob: float
    p_poisson: float
    p_binomial: float
    fdr_hat: Optional[float]  # None when nothing was recaptured
    flags: dict
    members: tuple[Member, ...]
    recapture_counts: dict = field(default_factory=dict)
    p_mc: Optional[dict] = None
    p_corrected: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "test": self.test.to_dict(),
            "ensemble": self.ensemble.to_dict(),
            "observed": self.observed,
            "expected_null": self.expected_null,
            "recapture_prob": self.recapture_prob,
            "p_poisson": self.p_poisson,
            "p_binomial": self.p_binomial,
            "p_mc": self.p_mc,
            "p_corrected": self.p_corrected,
            "fdr_hat": self.fdr_hat,
            "flags": dict(self.flags),
            "members": [m.to_dict() for m in self.members],
            "recapture_counts": dict(self.recapture_counts),
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "RecaptureReport":
        return cls(
            kind=d["kind"],
            ensemble=EnsembleParams(**d["ensemble"]),
            test=TestParams(**d["test"]),
            observed=d["observed"],
            expected_null=d["expected_null"],
            recapture_prob=d["recapture_prob"],
            p_poisson=d["p_poisson"],
            p_binomial=d["p_binomial"],
            fdr_hat=d["fdr_hat"],
            flags=dict(d["flags"]),
            members=tuple(Member(m["gene_id"], m["recapture_count"], tuple(m["studies"]))
                          for m in d["members"]),
            recapture_counts=dict(d.get("recapture_counts", {})),
            p_mc=d.get("p_mc"),
            p_corrected=d.get("p_corrected"),
        )

    @classmethod
    def from_json(cls, text: str) -> "RecaptureReport":
        return cls.from_dict(json.loads(text))


def _check_studies(studies: Sequence[RankedStudy], t: TestParams, e: EnsembleParams) -> None:
    t.validate_against(e)
    if len(studies) != e.num_studies:
        raise ParameterOutOfRangeError(f"got {len(studies)} studies, expected N={e.num_studies}")
    ids = [s.study_id for s in studies]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise DuplicateStudyError(f"duplicate study ids {dupes}")
    for s in studies:
        if len(s.genes) > e.genes_per_study:
            raise ParameterOutOfRangeError(
                f"study {s.study_id!r} ranks {len(s.genes)} genes but T={e.genes_per_study}"
            )
        s.top(t.rank_threshold)


def _capture_map(studies: Sequence[RankedStudy], r: int) -> dict[str, list[str]]:
    captured: dict[str, list[str]] = {}
    for s in studies:
        for g in s.top(r):
            captured.setdefault(g, []).append(s.study_id)
    return captured


def _assemble(kind: str, summary: NullSummary, captured: dict[str, list[str]],
              universe: Optional[Sequence[str]], t: TestParams, e: EnsembleParams,
              mc_replications: Optional[int], seed: int,
              correlation: Optional[ModuleModel]) -> RecaptureReport:
    if universe is not None:
        captured = {g: captured.get(g, []) for g in universe}
    n = t.recapture_rate
    members = [
        Member(g, len(ids), tuple(sorted(ids)))
        for g, ids in captured.items() if len(ids) >= n
    ]
    members.sort(key=lambda m: (-m.recapture_count, m.gene_id))
    observed = len(members)
    pv = set_pvalue(summary, observed)
    p_mc = None
    if mc_replications:
        p_mc = mc_pvalue(e, t, observed, mc_replications, seed)
    p_corr = None
    if correlation is not None:
        p_corr = correlation_pvalue(e, t, correlation, observed)
    return RecaptureReport(
        kind=kind,
        ensemble=e,
        test=t,
        observed=observed,
        expected_null=summary.expected_count,
        recapture_prob=summary.recapture_prob,
        p_poisson=pv.poisson_pvalue,
        p_binomial=pv.binomial_pvalue,
        fdr_hat=fdr_estimate(summary, observed) if observed else None,
        flags=summary.flags.to_dict(),
        members=tuple(members),
        recapture_counts={g: len(ids) for g, ids in sorted(captured.items()) if ids},
        p_mc=p_mc,
        p_corrected=p_corr,
    )


def mc_pvalue(e: EnsembleParams, t: TestParams, observed: int, replications: int,
              seed: int = 0) -> dict:
    """Empirical P(count >= observed) from the exact null simulator."""
    dist = simulate_null(SimConfig(e, t, replications=replications, seed=seed))
    return {"p": dist.tail(observed), "se": dist.tail_se(observed),
            "replications": replications, "seed": seed}


def correlation_pvalue(e: EnsembleParams, t: TestParams, model: ModuleModel, observed: int) -> dict:
    """Closed-form block correction; for 0 < rho < 1 the rho = 0 and rho = 1 endpoints."""
    rho = model.within_module_rho
    if rho in (0.0, 1.0):
        return corrected_tail(e, t, model, observed).to_dict()
    lo: CorrectedTail = corrected_tail(e, t, ModuleModel(model.module_size, 0.0), observed)
    hi: CorrectedTail = corrected_tail(e, t, ModuleModel(model.module_size, 1.0), observed)
    return {
        "module_size": model.module_size,
        "rho": rho,
        "pvalue": None,
        "bracket": {"rho_0": lo.pvalue, "rho_1": hi.pvalue},
        "note": "no closed form for 0 < rho < 1; simulate to interpolate",
    }


def intersect_discovery(studies: Sequence[RankedStudy], t: TestParams, e: EnsembleParams, *,
                        mc_replications: Optional[int] = None, seed: int = 0,
                        correlation: Optional[ModuleModel] = None) -> RecaptureReport:
    """Genes in the top r of at least n studies, with null p-values and FDR estimate."""
    if t.candidate_list_size is not None:
        t = TestParams(t.rank_threshold, t.recapture_rate)
    _check_studies(studies, t, e)
    captured = _capture_map(studies, t.rank_threshold)
    summary = expected_null_count_discovery(e, t)
    return _assemble("discovery", summary, captured, None, t, e, mc_replications, seed, correlation)


def intersect_concordance(studies: Sequence[RankedStudy], candidate_genes: Sequence[str],
                          t: TestParams, e: EnsembleParams, *,
                          mc_replications: Optional[int] = None, seed: int = 0,
                          correlation: Optional[ModuleModel] = None) -> RecaptureReport:
    """Candidate genes in the top r of at least n studies."""
    candidates = list(candidate_genes)
    if not candidates:
        raise EmptyCandidateListError("candidate list is empty")
    if len(set(candidates)) != len(candidates):
        raise DuplicateGeneError("candidate list contains duplicate gene ids")
    t = TestParams(t.rank_threshold, t.recapture_rate, len(candidates))
    _check_studies(studies, t, e)
    captured = _capture_map(studies, t.rank_threshold)
    summary = expected_null_count_concordance(e, t)
    return _assemble("concordance", summary, captured, candidates, t, e,
                     mc_replications, seed, correlation)
