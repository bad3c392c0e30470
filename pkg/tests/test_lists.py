import itertools
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listintersect.errors import (
    DuplicateGeneError,
    DuplicateStudyError,
    EmptyCandidateListError,
    ParameterOutOfRangeError,
    ShortListError,
    ValidationError,
)
from listintersect.lists import (
    RankedStudy,
    RecaptureReport,
    intersect_concordance,
    intersect_discovery,
    parse_ranked_lines,
    read_candidate_list,
    read_ranked_list,
)
from listintersect.params import EnsembleParams, ModuleModel, TestParams

DATA = Path(__file__).parent / "data" / "small"


def small_studies():
    return [read_ranked_list(DATA / f"study{x}.tsv") for x in "ABC"]


def oracle_members(top_lists, n):
    """Union over all n-subsets of studies of the intersection of their top lists."""
    found = set()
    for k in range(n, len(top_lists) + 1):
        for combo in itertools.combinations(top_lists, k):
            found |= set.intersection(*map(set, combo))
    return found


def random_studies(rng, N, T, length):
    genes = [f"g{i:03d}" for i in range(T)]
    studies = []
    for s in range(N):
        order = rng.permutation(T)[:length]
        studies.append(RankedStudy(f"s{s}", tuple(genes[i] for i in order)))
    return studies


def test_golden_report():
    report = intersect_discovery(small_studies(), TestParams(3, 2), EnsembleParams(3, 20))
    golden = json.loads((DATA / "discovery_report.json").read_text())
    assert json.loads(report.to_json()) == golden


def test_score_ties_break_by_gene_id():
    a = read_ranked_list(DATA / "studyA.tsv")
    assert a.top(3) == ("TP53", "ERG", "MYC")
    c = read_ranked_list(DATA / "studyC.tsv")
    assert c.top(4) == ("SPOP", "ERG", "AMACR", "AR")
    assert read_ranked_list(DATA / "studyB.tsv").scores is None


def test_concordance_small():
    cands = read_candidate_list(DATA / "candidates.txt")
    report = intersect_concordance(small_studies(), cands, TestParams(3, 2), EnsembleParams(3, 20))
    assert report.test.candidate_list_size == 4
    assert [m.gene_id for m in report.members] == ["ERG"]
    assert report.expected_null == pytest.approx(4 * report.recapture_prob)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(5, 100), st.data())
def test_matches_brute_force_oracle(N, T, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    r = data.draw(st.integers(1, T))
    n = data.draw(st.integers(1, N))
    length = data.draw(st.integers(r, T))
    studies = random_studies(rng, N, T, length)
    report = intersect_discovery(studies, TestParams(r, n), EnsembleParams(N, T))
    want = oracle_members([s.top(r) for s in studies], n)
    assert {m.gene_id for m in report.members} == want
    assert report.observed == len(want)
    for m in report.members:
        assert m.recapture_count == sum(m.gene_id in s.top(r) for s in studies)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(10, 60), st.data())
def test_permutation_invariance(N, T, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    r = data.draw(st.integers(1, T // 2))
    n = data.draw(st.integers(1, N))
    studies = random_studies(rng, N, T, T)
    e, t = EnsembleParams(N, T), TestParams(r, n)
    base = intersect_discovery(studies, t, e)
    shuffled = [studies[i] for i in rng.permutation(N)]
    assert intersect_discovery(shuffled, t, e) == base
    # shuffling genes that share a score never changes the ranking
    scored = RankedStudy.from_entries("x", [(f"g{i}", float(i // 3)) for i in range(T)])
    lines = [f"g{i}\t{i // 3}" for i in rng.permutation(T)]
    assert parse_ranked_lines("x", lines) == scored


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(10, 40), st.data())
def test_report_roundtrip(N, T, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    studies = random_studies(rng, N, T, T)
    r = data.draw(st.integers(1, T))
    report = intersect_discovery(studies, TestParams(r, 2), EnsembleParams(N, T),
                                 correlation=ModuleModel(2, 1.0))
    assert RecaptureReport.from_json(report.to_json()) == report


def test_roundtrip_with_simulation_and_bracket():
    cands = ["ERG", "AR"]
    report = intersect_concordance(small_studies(), cands, TestParams(3, 2), EnsembleParams(3, 20),
                                   mc_replications=2000, seed=4, correlation=ModuleModel(2, 0.5))
    assert report.p_mc["replications"] == 2000
    assert report.p_corrected["pvalue"] is None
    lo, hi = report.p_corrected["bracket"]["rho_0"], report.p_corrected["bracket"]["rho_1"]
    assert 0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0
    assert RecaptureReport.from_json(report.to_json()) == report


def test_erg_by_construction(four_studies, erg_test):
    filler = [f"G{i}" for i in range(300)]
    studies = []
    for s in range(4):
        genes = filler[s * 50: s * 50 + 100]
        if s < 3:
            genes = genes[:40] + ["ERG"] + genes[40:99]
        studies.append(RankedStudy(f"study{s}", tuple(genes)))
    report = intersect_discovery(studies, erg_test, four_studies)
    assert [m.gene_id for m in report.members] == ["ERG"]
    assert report.members[0].studies == ("study0", "study1", "study2")
    assert report.p_poisson == pytest.approx(0.0209, abs=5e-5)
    assert report.fdr_hat == pytest.approx(0.0211, abs=1e-4)


def test_empty_result_has_no_fdr(four_studies):
    studies = [RankedStudy(f"s{i}", tuple(f"g{i}_{j}" for j in range(100))) for i in range(4)]
    report = intersect_discovery(studies, TestParams(81, 3), four_studies)
    assert report.observed == 0 and report.fdr_hat is None and report.p_poisson == 1.0


def test_validation_errors(four_studies):
    good = [RankedStudy(f"s{i}", tuple(f"g{j}" for j in range(100))) for i in range(4)]
    t = TestParams(81, 3)
    with pytest.raises(ShortListError):
        intersect_discovery(good[:3] + [RankedStudy("short", ("a",))], t, four_studies)
    with pytest.raises(DuplicateStudyError):
        intersect_discovery(good[:3] + [good[0]], t, four_studies)
    with pytest.raises(ParameterOutOfRangeError):
        intersect_discovery(good[:3], t, four_studies)
    with pytest.raises(DuplicateGeneError):
        RankedStudy("d", ("a", "b", "a"))
    with pytest.raises(EmptyCandidateListError):
        intersect_concordance(good, [], t, four_studies)
    with pytest.raises(DuplicateGeneError):
        intersect_concordance(good, ["g1", "g1"], t, four_studies)
    with pytest.raises(ParameterOutOfRangeError):
        intersect_discovery(good, TestParams(81, 3), EnsembleParams(4, 50))


@pytest.mark.parametrize("lines", [["a\t1", "b"], ["a\tx"], ["a\t1\t2"], ["a\tnan"]])
def test_parse_errors(lines):
    with pytest.raises(ValidationError):
        parse_ranked_lines("bad", lines)


def test_case_sensitive_ids():
    study = parse_ranked_lines("x", ["erg", "ERG"])
    assert study.genes == ("erg", "ERG")
