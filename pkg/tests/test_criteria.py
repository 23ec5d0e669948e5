import math

import numpy as np
import pytest

from conftest import space
from pcap import criteria as cr
from pcap.errors import BadSequence, ValidationError
from pcap.sequences import AnnulusSequence
from pcap.suite import model_suite


def test_milnor_examples():
    assert cr.milnor_test(space(n=2)).verdict == cr.PARABOLIC
    assert cr.milnor_test(space(n=3)).verdict == cr.NONPARABOLIC
    res = cr.milnor_test(space("hyperbolic"))
    assert res.verdict == cr.NONPARABOLIC
    assert res.detail["integral"]["value"] == pytest.approx(0.771936832905, rel=1e-10)


def test_holopainen_examples():
    h = cr.holopainen_tests(space(n=2))
    assert (h["holopainen_RV"].verdict, h["holopainen_Vprime"].verdict) == (cr.PARABOLIC, cr.PARABOLIC)
    h = cr.holopainen_tests(space(n=3))
    assert (h["holopainen_RV"].verdict, h["holopainen_Vprime"].verdict) == (cr.NO_CONCLUSION, cr.NO_CONCLUSION)
    h = cr.holopainen_tests(space("power", n=2, p=3.0, b=1.0))
    assert (h["holopainen_RV"].verdict, h["holopainen_Vprime"].verdict) == (cr.PARABOLIC, cr.PARABOLIC)


def test_volume_function_matches_closed_form():
    V = cr._VolumeFunction(space(n=3), 1.0)
    R = np.array([1.0, 1.5, 3.7, 100.0, 1e6])
    np.testing.assert_allclose(V(R), 4 * math.pi / 3 * R ** 3, rtol=1e-12)


def test_pggb_dyadic_euclidean2():
    res = cr.pggb_search(space(n=2))
    assert res.verdict == cr.PARABOLIC
    w = res.detail["witness"]
    assert w["terms_evaluated"] == 41
    np.testing.assert_allclose(w["shell_quantity"], 12 * math.pi, rtol=1e-10)
    assert w["sup"] == pytest.approx(12 * math.pi, rel=1e-10)
    assert w["r"][:3] == [1.0, 2.0, 4.0] and w["s"][:3] == [2.0, 4.0, 8.0]


def test_pggb_dyadic_euclidean3_no_conclusion():
    res = cr.pggb_search(space(n=3))
    assert res.verdict == cr.NO_CONCLUSION
    vals = np.asarray(res.detail["witness"]["shell_quantity"])
    # (2/2^k)^2 (4 pi / 3) 7 8^k = (112 pi / 3) 2^k
    np.testing.assert_allclose(vals[:10], 112 * math.pi / 3 * 2.0 ** np.arange(10), rtol=1e-10)


def test_pggb_volume_growth_strategy():
    res = cr.pggb_search(space(n=2), "volume_growth")
    assert res.verdict == cr.PARABOLIC
    np.testing.assert_allclose(res.detail["witness"]["ball_volume_ratio"], math.pi, rtol=1e-10)
    assert cr.pggb_search(space(n=3), "volume_growth").verdict == cr.NO_CONCLUSION


def test_pggb_stops_on_overflow():
    res = cr.pggb_search(space("hyperbolic", n=3))
    assert res.verdict == cr.NO_CONCLUSION
    assert res.detail["stopped"] == "non-finite shell quantity"
    assert res.detail["witness"]["terms_evaluated"] < 41


def test_pggb_user_sequences():
    k = np.arange(0.0, 12.0)
    seq = AnnulusSequence(3.0 ** k, 2 * 3.0 ** k)
    res = cr.pggb_search(space(n=2), "user", seq)
    # (2/3^k)^2 pi (4 - 1) 9^k = 12 pi
    assert res.verdict == cr.PARABOLIC
    assert res.detail["witness"]["sup"] == pytest.approx(12 * math.pi, rel=1e-10)
    with pytest.raises(BadSequence):
        cr.pggb_search(space(n=2), "user")
    with pytest.raises(BadSequence):
        cr.pggb_search(space(n=2), "user", AnnulusSequence([1.0, 2.0], [10.0, 5.0]))
    with pytest.raises(ValidationError):
        cr.pggb_search(space(n=2), "spiral")


def test_capacity_sequence_euclidean2():
    res = cr.capacity_sequence_test(space(n=2))
    assert res.verdict == cr.PARABOLIC and res.detail["search"] == "complete"
    w = res.detail["witness"]
    k = np.arange(1, 41)
    # cap(2^k, 2^(k k')) = 2 pi / ((k'-1) k ln 2) < 1/k first at k' = 11
    np.testing.assert_array_equal(w["R1"], 2.0 ** k)
    np.testing.assert_array_equal(w["R2"], 2.0 ** (11 * k))
    np.testing.assert_allclose(w["cap"], 2 * math.pi / (10 * k * math.log(2)), rtol=1e-10)
    assert all(c < 1 / kk for c, kk in zip(w["cap"], k))


def test_capacity_sequence_hyperbolic():
    res = cr.capacity_sequence_test(space("hyperbolic"))
    assert res.verdict == cr.NONPARABOLIC
    assert res.detail["search"] == "search exhausted"
    assert res.detail["global_capacity"] == pytest.approx(8.139507067608, rel=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_capacity_sequence_p_equals_n(n):
    assert cr.capacity_sequence_test(space(n=n, p=float(n))).verdict == cr.PARABOLIC


def test_capacity_limit():
    assert cr.capacity_limit_test(space(n=2)).verdict == cr.PARABOLIC
    res = cr.capacity_limit_test(space(n=3))
    assert res.verdict == cr.NONPARABOLIC and res.detail["value"] == pytest.approx(4 * math.pi, rel=1e-9)


@pytest.mark.parametrize(
    "sp, expected",
    [(space(n=2), cr.PARABOLIC), (space("hyperbolic", n=3), cr.NONPARABOLIC), (space(n=4, p=4.0), cr.PARABOLIC)],
)
def test_classify_examples(sp, expected):
    v = cr.classify(sp)
    assert v.aggregate == expected and v.consistent
    d = v.as_dict()
    assert list(d["per_criterion"]) == list(cr.CRITERIA)
    assert set(v.witnesses) == {"pggb", "capacity_sequence"}


def test_table_profile_is_indeterminate_not_an_error():
    from pcap.geometry import ModelSpace, make_profile
    f = make_profile("table", table={"r": [0.5, 1.0, 4.0], "f": [0.5, 1.0, 4.0]})
    v = cr.classify(ModelSpace(f, 2, 2.0))
    assert v.aggregate == cr.INDETERMINATE
    assert v.per_criterion["milnor"] == cr.INDETERMINATE


def test_aggregate_rules():
    base = dict.fromkeys(cr.CRITERIA, cr.NO_CONCLUSION)
    per = dict(base, milnor=cr.PARABOLIC, capacity_sequence=cr.PARABOLIC, capacity_limit=cr.INDETERMINATE)
    assert cr.aggregate_verdicts(per) == (cr.PARABOLIC, True)
    per = dict(base, milnor=cr.PARABOLIC, capacity_sequence=cr.NONPARABOLIC, capacity_limit=cr.PARABOLIC)
    assert cr.aggregate_verdicts(per) == (cr.INDETERMINATE, False)
    per = dict(base, milnor=cr.NONPARABOLIC, capacity_sequence=cr.NONPARABOLIC,
               capacity_limit=cr.NONPARABOLIC, pggb=cr.PARABOLIC)
    assert cr.aggregate_verdicts(per) == (cr.NONPARABOLIC, False)
    per = dict(base, milnor=cr.INDETERMINATE, capacity_sequence=cr.INDETERMINATE, capacity_limit=cr.INDETERMINATE)
    assert cr.aggregate_verdicts(per) == (cr.INDETERMINATE, True)


@pytest.mark.parametrize("sp", model_suite(), ids=lambda s: s.label())
def test_vprime_matches_milnor(sp):
    milnor = cr.milnor_test(sp).verdict
    vprime = cr.holopainen_tests(sp)["holopainen_Vprime"].verdict
    assert (milnor == cr.PARABOLIC) == (vprime == cr.PARABOLIC)
