"""List-intersection discovery and concordance tests for top-ranked gene lists."""

from .alt_model import AltSummary, expected_counts, solve_capture_threshold
from .correlation import CorrectedTail, bracket_tail, corrected_tail
from .design import DesignRequest, DesignTable, design_table, max_threshold, optimize_design
from .distributions import BinomialSpec, PoissonSpec, binomial_tail, poisson_tail
from .errors import ValidationError
from .lists import RankedStudy, RecaptureReport, intersect_concordance, intersect_discovery
from .montecarlo import EmpiricalDist, SimConfig, simulate, simulate_alternative, simulate_correlated, simulate_null
from .null_model import expected_null, expected_null_count_concordance, expected_null_count_discovery, fdr_estimate, set_pvalue
from .params import ALT_I, ALT_II, AlternativeSpec, EnsembleParams, ModuleModel, TestParams

__all__ = [
    "ALT_I", "ALT_II", "AltSummary", "AlternativeSpec", "BinomialSpec", "CorrectedTail",
    "DesignRequest", "DesignTable", "EmpiricalDist", "EnsembleParams", "ModuleModel",
    "PoissonSpec", "RankedStudy", "RecaptureReport", "SimConfig", "TestParams", "ValidationError",
    "binomial_tail", "bracket_tail", "corrected_tail", "design_table", "expected_counts",
    "expected_null", "expected_null_count_concordance", "expected_null_count_discovery",
    "fdr_estimate", "intersect_concordance", "intersect_discovery", "max_threshold",
    "optimize_design", "poisson_tail", "set_pvalue", "simulate", "simulate_alternative",
    "simulate_correlated", "simulate_null", "solve_capture_threshold",
]
