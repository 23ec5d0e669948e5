import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import space
from pcap import capacity as c
from pcap._kernels import get_kernels
from pcap.errors import BadAnnulus, NonConvergence
from pcap.suite import model_suite

# frozen from a 30-digit mpmath evaluation of the antiderivative ln tanh(s/2)
HYP2_TRUNC40 = 8.1395070676079002
HYP2_GLOBAL = 8.1395070676079002
HYP2_1_5 = 8.2841273351552782
# 2 pi / (int_1^2 r^-1/2)^2
E2_P3_1_2 = 9.1552719185430561


def test_closed_form_examples():
    assert c.annulus_capacity_closed_form(space(n=3), 1, 2).value == pytest.approx(8 * math.pi, rel=1e-12)
    assert c.annulus_capacity_closed_form(space(n=2), 1, math.e).value == pytest.approx(2 * math.pi, rel=1e-12)
    est = c.annulus_capacity_closed_form(space("hyperbolic"), 1, 40)
    assert est.value == pytest.approx(HYP2_TRUNC40, rel=1e-10)
    assert est.method == "closed_form"
    assert est.error_estimate < 1e-9
    assert c.annulus_capacity_closed_form(space(n=2, p=3.0), 1, 2).value == pytest.approx(E2_P3_1_2, rel=1e-12)


@pytest.mark.parametrize("R1, R2", [(2, 1), (1, 1), (0, 1), (-1, 1), (1, math.inf)])
def test_closed_form_bad_annulus(R1, R2):
    with pytest.raises(BadAnnulus):
        c.annulus_capacity_closed_form(space(), R1, R2)


def test_cutoff_examples():
    b = c.cutoff_upper_bound(space(n=2), 1, 2)
    assert b.value == pytest.approx(12 * math.pi, rel=1e-12)
    assert b.method == "cutoff_bound"
    b = c.cutoff_upper_bound(space(n=2), 1, 3).value
    assert b == pytest.approx(8 * math.pi, rel=1e-12)
    assert b >= c.annulus_capacity_closed_form(space(n=2), 1, 3).value == pytest.approx(2 * math.pi / math.log(3))


@pytest.mark.parametrize("sp", model_suite(), ids=lambda s: s.label())
def test_cutoff_dominates_closed_form_thin_annulus(sp):
    R1, R2 = 2.0, 2.0 + 1e-3
    assert c.cutoff_upper_bound(sp, R1, R2).value >= c.annulus_capacity_closed_form(sp, R1, R2).value


def test_global_capacity_examples():
    zero = c.global_capacity(space(n=2), 1)
    assert zero.value == 0.0 and zero.classification == "zero"
    assert math.isinf(zero.R2)
    pos = c.global_capacity(space(n=3), 1)
    assert pos.classification == "positive"
    assert pos.value == pytest.approx(4 * math.pi, rel=1e-9)
    assert c.global_capacity(space("hyperbolic"), 1).value == pytest.approx(HYP2_GLOBAL, rel=1e-9)
    with pytest.raises(BadAnnulus):
        c.global_capacity(space(), 0.0)


@pytest.mark.parametrize("sp", model_suite(), ids=lambda s: s.label())
def test_dichotomy_independent_of_R1(sp):
    kinds = {c.global_capacity(sp, R1).classification for R1 in (0.5, 1.0, 2.0, 5.0)}
    assert len(kinds) == 1


REPRESENTATIVE = [
    space(n=2), space(n=3), space(n=3, p=1.5), space("hyperbolic"),
    space("power", b=2.0), space("exponential", rate=1.0),
]


@settings(max_examples=40, deadline=None)
@given(
    which=st.integers(0, len(REPRESENTATIVE) - 1),
    R1=st.floats(0.2, 4.0),
    d=st.floats(0.05, 4.0),
    e=st.floats(0.05, 4.0),
)
def test_monotonicity_and_orderings(which, R1, d, e):
    sp = REPRESENTATIVE[which]
    R2 = R1 + d
    cap = c.annulus_capacity_closed_form(sp, R1, R2).value
    assert c.annulus_capacity_closed_form(sp, R1, R2 + e).value < cap
    assert c.annulus_capacity_closed_form(sp, R1 + 0.5 * d, R2).value > cap
    assert c.global_capacity(sp, R1).value <= cap
    assert c.cutoff_upper_bound(sp, R1, R2).value >= cap


# --------------------------------------------------------------------------
# numerical minimization
# --------------------------------------------------------------------------
@pytest.mark.parametrize(
    "sp, R2, exact",
    [
        (space(n=3), 2.0, 8 * math.pi),
        (space(n=2, p=3.0), 2.0, E2_P3_1_2),
        (space("hyperbolic"), 5.0, HYP2_1_5),
    ],
    ids=["euclid3", "euclid2_p3", "hyperbolic2"],
)
def test_numerical_matches_closed_form(sp, R2, exact):
    est = c.numerical_capacity(sp, 1.0, R2)
    assert est.method == "numerical"
    assert est.value == pytest.approx(exact, rel=1e-3)
    assert est.value >= exact * (1 - 1e-12)   # discrete minimum dominates the infimum
    v = est.minimizer.values
    assert v[0] == 1.0 and v[-1] == 0.0
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) <= 0)


def test_numerical_p_below_two():
    sp = space(n=3, p=1.5)
    est = c.numerical_capacity(sp, 1.0, 4.0)
    exact = c.annulus_capacity_closed_form(sp, 1.0, 4.0).value
    assert est.value == pytest.approx(exact, rel=1e-3)
    assert np.all(np.diff(est.minimizer.values) <= 0)


def test_gap_decreases_under_refinement():
    sp = space("hyperbolic")
    exact = c.annulus_capacity_closed_form(sp, 1.0, 5.0).value
    gaps = [c.numerical_capacity(sp, 1.0, 5.0, c.MeshOptions(N=N)).value - exact for N in (250, 500, 1000, 2000)]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_newton_agrees_with_exact_discrete_minimizer():
    sp = space(n=2, p=3.0)
    opts = c.MeshOptions(N=400)
    est = c.numerical_capacity(sp, 1.0, 3.0, opts)
    grid, h, w, _ = c.discrete_problem(sp, 1.0, 3.0, opts.N)
    v, energy = c.exact_discrete_minimizer(h, w, sp.p)
    assert est.value == pytest.approx(sp.sphere_area * energy, rel=1e-9)
    np.testing.assert_allclose(est.minimizer.values, v, atol=1e-7)


def test_backends_agree():
    sp = space(n=3, p=3.0)
    a = c.numerical_capacity(sp, 1.0, 2.0, c.MeshOptions(N=300), kernels=get_kernels("numpy"))
    b = c.numerical_capacity(sp, 1.0, 2.0, c.MeshOptions(N=300), kernels=get_kernels("numba"))
    assert a.info["backend"] == "numpy" and b.info["backend"] == "numba"
    assert a.value == pytest.approx(b.value, rel=1e-10)
    np.testing.assert_allclose(a.minimizer.values, b.minimizer.values, atol=1e-8)


def test_nonconvergence_reports_residual():
    with pytest.raises(NonConvergence) as info:
        c.numerical_capacity(space(n=2, p=3.0), 1.0, 2.0, c.MeshOptions(N=200, max_iter=1))
    assert info.value.iterations == 1
    assert info.value.residual is not None


def test_numerical_preconditions():
    with pytest.raises(ValueError):
        c.numerical_capacity(space(), 1.0, 2.0, c.MeshOptions(N=15))
    with pytest.raises(BadAnnulus):
        c.numerical_capacity(space(), 1.0, math.inf)
    with pytest.raises(BadAnnulus):
        c.numerical_capacity(space(), 2.0, 1.0)


def test_as_dict():
    d = c.global_capacity(space(n=3), 1).as_dict()
    assert d["method"] == "closed_form" and d["classification"] == "positive"
    assert math.isinf(d["R2"])
