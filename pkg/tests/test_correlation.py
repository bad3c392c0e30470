import math

import pytest

from listintersect.correlation import bracket_tail, corrected_tail
from listintersect.distributions import PoissonSpec, poisson_tail
from listintersect.errors import ParameterOutOfRangeError, UnsupportedRhoError
from listintersect.null_model import expected_null_count_discovery, set_pvalue
from listintersect.params import EnsembleParams, ModuleModel, TestParams

E4 = EnsembleParams(4, 10_000)
S2_100 = TestParams(100, 2)


def test_worked_example():
    ct = corrected_tail(E4, TestParams(25, 2), ModuleModel(2, 1.0), 4)
    assert ct.evaluated_at == 2
    assert ct.module_count == 5000
    assert ct.pvalue == pytest.approx(0.015431, abs=5e-6)


def test_module_size_one_is_uncorrected():
    plain = set_pvalue(expected_null_count_discovery(E4, S2_100), 10).poisson_pvalue
    for rho in (0.0, 1.0):
        assert corrected_tail(E4, S2_100, ModuleModel(1, rho), 10).pvalue == pytest.approx(plain, rel=1e-12)
    assert corrected_tail(E4, S2_100, ModuleModel(8, 0.0), 10).pvalue == pytest.approx(plain, rel=1e-12)


def test_mean_and_variance():
    base = corrected_tail(E4, S2_100, ModuleModel(1, 1.0), 0)
    for m in (2, 5, 8):
        ct = corrected_tail(E4, S2_100, ModuleModel(m, 1.0), 0)
        assert ct.mean == base.mean
        assert ct.variance == pytest.approx(m * base.mean)


def test_leftover_genes_are_singletons():
    e = EnsembleParams(4, 10_001)
    ct = corrected_tail(e, S2_100, ModuleModel(8, 1.0), 9)
    assert ct.module_count == 1250 + 1
    assert ct.evaluated_at == math.ceil(9 / 8)
    p0 = expected_null_count_discovery(e, S2_100).recapture_prob
    assert ct.reduced_mean == pytest.approx(1251 * p0)
    assert ct.pvalue == pytest.approx(poisson_tail(PoissonSpec(1251 * p0), 2))


def test_concordance_correction():
    t = TestParams(10, 2, 300)
    e = EnsembleParams(132, 10_000)
    ct = corrected_tail(e, t, ModuleModel(3, 1.0), 4)
    assert ct.module_count == 100
    assert ct.evaluated_at == 2


def test_interior_rho_rejected_and_bracketed():
    with pytest.raises(UnsupportedRhoError):
        corrected_tail(E4, S2_100, ModuleModel(8, 0.5), 10)
    lo, hi = bracket_tail(E4, S2_100, 8, 10)
    assert lo.rho == 0.0 and hi.rho == 1.0
    assert lo.pvalue < hi.pvalue


def test_bad_observed():
    with pytest.raises(ParameterOutOfRangeError):
        corrected_tail(E4, S2_100, ModuleModel(8, 1.0), -1)


def test_monotone_in_module_size_for_large_x():
    ps = [corrected_tail(E4, S2_100, ModuleModel(m, 1.0), 12).pvalue for m in (1, 2, 4, 12)]
    assert ps == sorted(ps)
