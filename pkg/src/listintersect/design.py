"""A-priori choice of (n, r) that maximises expected sensitivity under an FDR budget.

For every recapture rate n the largest rank threshold r(n) with analytic
FDR(n, r) < q is found by an exact integer scan over r = 1..T; the pair with
the highest expected sensitivity ETP/tp wins.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .alt_model import capture_grid, fdr_from_counts, grid_counts
from .errors import InfeasibleDesignError, ParameterOutOfRangeError, ValidationError
from .params import AlternativeSpec, EnsembleParams

# sensitivities closer than this are treated as tied
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DesignRequest:
    ensemble: EnsembleParams
    alternatives: tuple[AlternativeSpec, ...]
    fdr_budget: float
    significance_level: float = 0.05

    def __post_init__(self):
        alts = self.alternatives
        if isinstance(alts, AlternativeSpec):
            alts = (alts,)
        object.__setattr__(self, "alternatives", tuple(alts))
        if not self.alternatives:
            raise ValidationError("design request needs at least one alternative")
        if not 0.0 < self.fdr_budget < 1.0:
            raise ValidationError(f"fdr_budget={self.fdr_budget} must lie in (0, 1)")
        if not 0.0 < self.significance_level < 1.0:
            raise ValidationError(f"significance_level={self.significance_level} must lie in (0, 1)")
        for alt in self.alternatives:
            alt.validate_against(self.ensemble)


@dataclass(frozen=True)
class DesignRow:
    n: int
    r: Optional[int]  # None: no r meets the budget
    esns: Optional[float] = None
    fdr: Optional[float] = None
    etp: Optional[float] = None
    efp: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.r is not None

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "esns": self.esns, "fdr": self.fdr,
                "etp": self.etp, "efp": self.efp}


@dataclass(frozen=True)
class DesignTable:
    alternative: AlternativeSpec
    ensemble: EnsembleParams
    fdr_budget: float
    rows: tuple[DesignRow, ...]
    optimal: Optional[DesignRow] = field(default=None)

    def row(self, n: int) -> DesignRow:
        return self.rows[n - 1]

    def to_dict(self) -> dict:
        return {
            "alternative": self.alternative.to_dict(),
            "ensemble": self.ensemble.to_dict(),
            "fdr_budget": self.fdr_budget,
            "rows": [row.to_dict() for row in self.rows],
            "optimal": self.optimal.to_dict() if self.optimal else None,
        }


class _FDRSurface:
    """FDR, ETP and EFP for one alternative over r = 1..T, cached per n."""

    def __init__(self, ensemble: EnsembleParams, alt: AlternativeSpec):
        self.ensemble = ensemble
        self.alt = alt
        self.grid = capture_grid(ensemble, alt, np.arange(1, ensemble.genes_per_study + 1))
        self._cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def at(self, n: int):
        if n not in self._cache:
            e = self.ensemble
            efp, etp = grid_counts(self.grid, e.num_studies, n, self.alt.tp, e.genes_per_study)
            self._cache[n] = (fdr_from_counts(efp, etp), etp, efp)
        return self._cache[n]


def _largest_feasible(fdr: np.ndarray, q: float) -> Optional[int]:
    ok = np.flatnonzero(fdr < q)
    return int(ok[-1]) + 1 if ok.size else None


def _row(surface: _FDRSurface, n: int, q: float) -> DesignRow:
    fdr, etp, efp = surface.at(n)
    r = _largest_feasible(fdr, q)
    if r is None:
        return DesignRow(n, None)
    i = r - 1
    tp = surface.alt.tp
    return DesignRow(n, r, float(etp[i] / tp), float(fdr[i]), float(etp[i]), float(efp[i]))


def max_threshold(n: int, req: DesignRequest, alt: AlternativeSpec) -> Optional[int]:
    """Largest r in 1..T with FDR(n, r) < q, or None if no r qualifies."""
    N = req.ensemble.num_studies
    if not 1 <= n <= N:
        raise ParameterOutOfRangeError(f"n={n} outside [1, {N}]")
    if alt.tp == 0:
        return None
    return _row(_FDRSurface(req.ensemble, alt), n, req.fdr_budget).r


def pick_optimal(rows: Iterable[DesignRow]) -> Optional[DesignRow]:
    """Highest ESns; ties go to the smaller n, then the larger r."""
    best = None
    for row in rows:
        if not row.feasible:
            continue
        if best is None or row.esns > best.esns + TIE_TOLERANCE:
            best = row
        elif abs(row.esns - best.esns) <= TIE_TOLERANCE:
            if (row.n, -row.r) < (best.n, -best.r):
                best = row
    return best


def design_table(ensemble: EnsembleParams, alt: AlternativeSpec, q: float) -> DesignTable:
    N = ensemble.num_studies
    if alt.tp == 0:
        rows = tuple(DesignRow(n, None) for n in range(1, N + 1))
        return DesignTable(alt, ensemble, q, rows, None)
    surface = _FDRSurface(ensemble, alt)
    rows = tuple(_row(surface, n, q) for n in range(1, N + 1))
    return DesignTable(alt, ensemble, q, rows, pick_optimal(rows))


def optimize_design(req: DesignRequest, strict: bool = False) -> list[DesignTable]:
    """One design table per alternative.

    With ``strict=True`` an alternative for which no (n, r) meets the budget
    raises ``InfeasibleDesignError``; otherwise its table has ``optimal=None``.
    """
    tables = [design_table(req.ensemble, alt, req.fdr_budget) for alt in req.alternatives]
    if strict:
        bad = [t.alternative.label or str(i) for i, t in enumerate(tables) if t.optimal is None]
        if bad:
            raise InfeasibleDesignError(f"no (n, r) meets FDR < {req.fdr_budget} for {bad}")
    return tables


def bonferroni_alpha(req: DesignRequest) -> float:
    """Per-set significance level when one set is tested per alternative."""
    return req.significance_level / len(req.alternatives)


def sensitivity_curve_csv(tables: Sequence[DesignTable]) -> str:
    """Expected sensitivity at r(n) against n, one line per (alternative, n)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alternative", "num_studies", "n", "r_n", "esns", "fdr", "optimal"])
    for table in tables:
        for row in table.rows:
            writer.writerow([
                table.alternative.label,
                table.ensemble.num_studies,
                row.n,
                "" if row.r is None else row.r,
                "" if row.esns is None else f"{row.esns:.6f}",
                "" if row.fdr is None else f"{row.fdr:.6g}",
                int(table.optimal is not None and table.optimal.n == row.n),
            ])
    return buf.getvalue()
