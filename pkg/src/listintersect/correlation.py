"""P-value correction for modules of perfectly correlated genes.

If genes come in modules of size m whose members always rank together, the
set size is m times the set size of an independent problem on T/m genes.  The
mean is unchanged, the variance grows by a factor m, and

    P(|S| >= x) = P(|S~| >= ceil(x / m)),  |S~| ~ Poisson(T * P0 / m).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .distributions import PoissonSpec, poisson_tail
from .errors import ParameterOutOfRangeError, UnsupportedRhoError
from .null_model import NullSummary, expected_null
from .params import EnsembleParams, ModuleModel, TestParams


@dataclass(frozen=True)
class CorrectedTail:
    pvalue: float
    observed: int
    evaluated_at: int  # ceil(observed / m) for rho = 1
    module_size: int
    rho: float
    module_count: int  # full modules plus leftover singletons
    reduced_mean: float
    mean: float  # mean of |S|, unchanged by the correlation
    variance: float  # Poisson variance times m

    def to_dict(self) -> dict:
        return asdict(self)


def _module_count(scale: int, m: int) -> int:
    # leftover genes are kept as independent singletons, each counted as a module
    return scale // m + scale % m


def corrected_tail(e: EnsembleParams, t: TestParams, model: ModuleModel, observed: int) -> CorrectedTail:
    """Tail P(|S| >= observed) under the block model; closed form for rho in {0, 1}."""
    if isinstance(observed, bool) or int(observed) != observed or observed < 0:
        raise ParameterOutOfRangeError(f"observed={observed!r} must be a nonnegative integer")
    observed = int(observed)
    rho = model.within_module_rho
    if rho not in (0.0, 1.0):
        raise UnsupportedRhoError(
            f"no closed form for rho={rho}; use bracket_tail() for the rho=0/1 endpoints "
            "or simulate_correlated() for the interior"
        )
    summary: NullSummary = expected_null(e, t)
    m = model.module_size if rho == 1.0 else 1
    modules = _module_count(summary.scale, m)
    reduced_mean = modules * summary.recapture_prob
    at = math.ceil(observed / m)
    return CorrectedTail(
        pvalue=poisson_tail(PoissonSpec(reduced_mean), at),
        observed=observed,
        evaluated_at=at,
        module_size=model.module_size,
        rho=rho,
        module_count=modules,
        reduced_mean=reduced_mean,
        mean=summary.expected_count,
        variance=m * summary.expected_count,
    )


def bracket_tail(e: EnsembleParams, t: TestParams, module_size: int, observed: int) -> tuple[CorrectedTail, CorrectedTail]:
    """Independent (rho=0) and fully correlated (rho=1) answers.

    These are the two closed-form endpoints of the correlation range; for
    0 < rho < 1 use ``simulate_correlated``.  Note that the rho=1 tail is not
    always the larger one (it can be smaller when observed < m).
    """
    lo = corrected_tail(e, t, ModuleModel(module_size, 0.0), observed)
    hi = corrected_tail(e, t, ModuleModel(module_size, 1.0), observed)
    return lo, hi
