import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listintersect.alt_model import expected_counts
from listintersect.design import (
    DesignRequest,
    DesignRow,
    bonferroni_alpha,
    design_table,
    max_threshold,
    optimize_design,
    pick_optimal,
    sensitivity_curve_csv,
)
from listintersect.errors import InfeasibleDesignError, ValidationError
from listintersect.params import ALT_I, ALT_II, AlternativeSpec, EnsembleParams, TestParams


def scan_oracle(e, alt, n, q):
    best = None
    for r in range(1, e.genes_per_study + 1):
        if expected_counts(e, alt, TestParams(r, n)).fdr < q:
            best = r
    return best


@pytest.mark.parametrize("alt", [AlternativeSpec.homogeneous(5, 3.0), AlternativeSpec.homogeneous(2, 4.0)])
@pytest.mark.parametrize("N", [3, 5])
def test_matches_scalar_scan(alt, N):
    e = EnsembleParams(N, 300)
    table = design_table(e, alt, 0.05)
    for n in range(1, N + 1):
        assert table.row(n).r == scan_oracle(e, alt, n, 0.05)


def test_reference_optima(four_studies):
    tables = optimize_design(DesignRequest(four_studies, (ALT_I, ALT_II), 0.01))
    assert (tables[0].optimal.n, tables[0].optimal.r) == (3, 195)
    assert (tables[1].optimal.n, tables[1].optimal.r) == (3, 81)
    assert tables[0].optimal.esns == pytest.approx(0.84, abs=0.02)


def test_ten_studies_alt_one():
    t = design_table(EnsembleParams(10, 10_000), ALT_I, 0.01)
    assert (t.optimal.n, t.optimal.r) == (6, 755)


def test_loose_budget_reaches_full_depth(four_studies):
    t = design_table(four_studies, ALT_I, 0.999)
    assert all(row.r == 10_000 for row in t.rows)
    assert t.optimal.n == 1


def test_feasible_rows_meet_budget(four_studies):
    t = design_table(four_studies, ALT_II, 0.01)
    for row in t.rows:
        if row.feasible:
            assert row.fdr < 0.01
            if row.r < 10_000:
                nxt = expected_counts(four_studies, ALT_II, TestParams(row.r + 1, row.n))
                assert nxt.fdr >= 0.01


def test_tie_break():
    rows = [DesignRow(3, 100, 0.9), DesignRow(2, 50, 0.9), DesignRow(2, 60, 0.9), DesignRow(4, 10, 0.5)]
    best = pick_optimal(rows)
    assert (best.n, best.r) == (2, 60)
    assert pick_optimal([DesignRow(1, None)]) is None


def test_infeasible():
    e = EnsembleParams(2, 50)
    weak = AlternativeSpec.homogeneous(1, 0.0, "weak")
    req = DesignRequest(e, (weak,), 0.001)
    assert optimize_design(req)[0].optimal is None
    with pytest.raises(InfeasibleDesignError):
        optimize_design(req, strict=True)


def test_no_true_positives(four_studies):
    empty = AlternativeSpec((), "none")
    assert design_table(four_studies, empty, 0.01).optimal is None
    assert max_threshold(2, DesignRequest(four_studies, (ALT_I,), 0.01), empty) is None


def test_request_validation(four_studies):
    with pytest.raises(ValidationError):
        DesignRequest(four_studies, (ALT_I,), 1.5)
    with pytest.raises(ValidationError):
        DesignRequest(four_studies, (), 0.01)
    req = DesignRequest(four_studies, (ALT_I, ALT_II), 0.01, 0.05)
    assert bonferroni_alpha(req) == 0.025
    assert max_threshold(3, req, ALT_II) == 81


def test_curve_csv(four_studies):
    text = sensitivity_curve_csv([design_table(four_studies, ALT_II, 0.01)])
    lines = text.strip().split("\n")
    assert lines[0] == "alternative,num_studies,n,r_n,esns,fdr,optimal"
    assert len(lines) == 5
    assert lines[3].startswith("II,4,3,81,") and lines[3].endswith(",1")
    assert lines[1] == "II,4,1,,,,0"


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(1, 15), st.floats(2.0, 5.0), st.sampled_from([0.01, 0.05, 0.2]))
def test_max_threshold_grows_with_n(N, tp, mu, q):
    table = design_table(EnsembleParams(N, 1000), AlternativeSpec.homogeneous(tp, mu), q)
    rs = [row.r for row in table.rows if row.feasible]
    assert rs == sorted(rs)
    # once some n is feasible, every larger n is as well
    first = next((row.n for row in table.rows if row.feasible), None)
    if first is not None:
        assert all(row.feasible for row in table.rows[first - 1:])
