import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laplace_carleson.embeddings import (EmbeddingCase, classify_region, default_family,
                                         embedding_ratio, load_campaign_spec, necessity_bound,
                                         run_campaign, run_disk_campaign)
from laplace_carleson.errors import DomainError, EmptyFamilyError
from laplace_carleson.measures import Atomic, CarlesonBox, SquaresAtHeightOne
from laplace_carleson.signals import ExpPoly, StepDyadic
from laplace_carleson.spaces import bergman_norm


@pytest.mark.parametrize("pq,label", [((1.5, 3), "I"), ((4, 4), "II"), ((1.5, 2), "III"),
                                      ((3, 2), "IV"), ((1.2, 10), "I"), ((10, 50), "II")])
def test_region_examples(pq, label):
    assert classify_region(*pq) == label


def test_region_boundaries():
    assert classify_region(2, 3, boundary=True) == "boundary"
    assert classify_region(3, 3, boundary=True) == "boundary"
    assert classify_region(1.5, 3, boundary=True) == "boundary"
    assert classify_region(1.5, 4, boundary=True) == "I"
    assert classify_region(1.5, 2.5, boundary=True) == "III"


def test_regions_partition_open_square():
    g = np.random.default_rng(0)
    u, v = g.uniform(0, 1, 10000), g.uniform(0, 1, 10000)
    counts = dict.fromkeys(["I", "II", "III", "IV", "boundary"], 0)
    for a, b in zip(u, v):
        p, q = 1 / a, 1 / b
        label = classify_region(p, q, boundary=True)
        counts[label] += 1
        # region predicates are mutually exclusive off the lines
        preds = {"I": a >= 0.5 and b <= 1 - a, "II": a < 0.5 and b <= a,
                 "III": a >= 0.5 and a >= b > 1 - a, "IV": b > a}
        if label != "boundary":
            assert [k for k, ok in preds.items() if ok] == [label]
    assert counts["boundary"] == 0
    assert all(counts[k] > 500 for k in ("I", "II", "III", "IV"))


@given(st.floats(1.01, 50), st.floats(1.01, 50))
@settings(max_examples=300, deadline=None)
def test_region_is_total(p, q):
    assert classify_region(p, q) in ("I", "II", "III", "IV")


def test_case_invariants():
    c = EmbeddingCase(4, 4, 0.5, "Bergman")
    assert c.beta == pytest.approx(3 - 0.5)
    assert c.gamma == pytest.approx(c.beta - 2)
    with pytest.raises(DomainError):
        EmbeddingCase(1.5, 1.5, 0.0, "Bergman")
    with pytest.raises(ValueError):
        EmbeddingCase(4, 4, 0.0, "LqMu")


@pytest.mark.parametrize("f", [StepDyadic.indicator(), ExpPoly(2.0, 1.0, 1),
                               StepDyadic((0, 0.5, 2), (1, -1))], ids=lambda f: f.kind)
def test_hardy_p2_ratio_is_one(f):
    r = embedding_ratio(EmbeddingCase(2, 2, 0, "Hardy"), f).ratio
    assert 1 - 1e-3 <= r <= 1 + 1e-12


def test_bergman_ratio_normalization():
    case = EmbeddingCase(4, 4, 0, "Bergman")
    f = StepDyadic.indicator()
    assert embedding_ratio(case, f).ratio == pytest.approx(bergman_norm(f, 4, 1.0).value, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_bergman_ratio_dilation_invariant(alpha):
    case = EmbeddingCase(4, 4, alpha, "Bergman")
    f = StepDyadic((0, 0.5, 1), (1, -0.5))
    r1 = embedding_ratio(case, f).ratio
    r2 = embedding_ratio(case, f.dilate(2.0)).ratio
    assert r2 == pytest.approx(r1, rel=1e-3)


def test_zero_source_norm():
    with pytest.raises(ZeroDivisionError):
        embedding_ratio(EmbeddingCase(4, 4), StepDyadic((0, 1), (0,)))


@pytest.mark.parametrize("alpha", [0.0, 0.7])
def test_necessity_single_atom(alpha):
    lam = 0.5 + 0.5j
    p, q = 3.0, 4.0
    case = EmbeddingCase(p, q, alpha, "LqMu", Atomic.point(lam))
    res = necessity_bound(case, CarlesonBox(0, 1))
    src = math.gamma(alpha + 1) ** (1 / p) * (p * math.pi) ** (-(alpha + 1) / p)
    assert res.source_norm == pytest.approx(src, rel=1e-13)
    assert res.bound == pytest.approx(1 / (2 * math.pi * 2 * lam.imag) / src, rel=1e-13)
    assert res.geometric_bound <= res.bound


def test_necessity_zero_mass():
    case = EmbeddingCase(4, 4, 0, "LqMu", Atomic.point(5 + 0.5j))
    assert necessity_bound(case, CarlesonBox(0, 1)).bound == 0.0


def test_necessity_squares_two_atoms():
    case = EmbeddingCase(4, 4, 0, "LqMu", SquaresAtHeightOne(10))
    res = necessity_bound(case, CarlesonBox(1, 4))
    assert res.box_mass == 2
    lam = complex(2.5, 1.5)
    f = ExpPoly.kernel(lam)
    want = sum(abs(f.laplace_exact(np.array([z])))[0] ** 4 for z in (1 + 1j, 4 + 1j)) ** 0.25
    assert res.bound == pytest.approx(want / res.source_norm, rel=1e-13)


def test_campaign_dominates_necessity():
    case = EmbeddingCase(4, 4, 0, "LqMu", SquaresAtHeightOne(10))
    rep = run_campaign(case, default_family(0, 10))
    assert rep.sup_ratio >= rep.carleson["necessity_bound"]["bound"]
    for a in range(1, 8):
        assert rep.sup_ratio >= necessity_bound(case, CarlesonBox(a * a, (a + 2) ** 2)).bound
    assert rep.carleson["quotient"] == pytest.approx(
        rep.sup_ratio / rep.carleson["constant"] ** 0.25)


def test_campaign_report_shape():
    rep = run_campaign(EmbeddingCase(4, 4), default_family(1, 4), levels=(8, 9))
    d = json.loads(rep.to_json())
    assert d["sup_ratio"] == max(r["ratio"] for r in d["rows"])
    assert [r["function_id"] for r in d["rows"]] == [fid for fid, _ in default_family(1, 4)]
    assert "verified" not in d["statement"]
    assert rep.to_csv().splitlines()[0] == \
        "function_id,source_norm,target_norm,ratio,err_src,err_tgt"


def test_campaign_records_failures():
    fam = [("good", StepDyadic.indicator()), ("zero", StepDyadic((0, 1), (0,)))]
    rep = run_campaign(EmbeddingCase(4, 4), fam, levels=(8, 9))
    assert [f["function_id"] for f in rep.failures] == ["zero"]
    with pytest.raises(EmptyFamilyError):
        run_campaign(EmbeddingCase(4, 4), [], levels=(8, 9))


def test_hardy_scale_family():
    case = EmbeddingCase(4, 4, 2, "Hardy")
    ratios = [embedding_ratio(case, ExpPoly.kernel(complex(0.3, 2.0 ** k))).ratio
              for k in range(-3, 4)]
    assert max(ratios) / min(ratios) < 1.05


def test_default_family_deterministic():
    a = [f.to_json() for _, f in default_family(3, 20)]
    b = [f.to_json() for _, f in default_family(3, 20)]
    assert a == b
    assert a != [f.to_json() for _, f in default_family(4, 20)]


def test_disk_campaign_small():
    rep = run_disk_campaign(n=20)
    assert np.isfinite(rep.sup_ratio) and rep.drift < 0.1
    assert rep.sup_ratio == max(r["ratio"] for r in rep.rows)


def test_toml_campaign_file(tmp_path):
    (tmp_path / "mu.json").write_text(json.dumps({"kind": "squares", "n": 5}))
    spec = tmp_path / "c.toml"
    spec.write_text('p = 4\nq = 4\ntarget = "LqMu"\nmeasure = "mu.json"\nseed = 2\n'
                    '[[functions]]\nkind = "exppoly"\na = 1.0\n')
    case, opts = load_campaign_spec(spec)
    assert case.target == "LqMu" and len(case.measure.atoms()) == 5
    assert opts["seed"] == 2 and opts["family"][0][0] == "f-000"
    bad = tmp_path / "bad.toml"
    bad.write_text("q = 4\n")
    with pytest.raises(ValueError, match="'p'"):
        load_campaign_spec(bad)
