import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import space
from pcap import geometry as g
from pcap.errors import (
    BadAnnulus,
    DivergentAtOrigin,
    InvalidProfile,
    InvalidSpace,
    OutOfTableRange,
)


def sinh_series(x, terms=30):
    # independent of numpy's sinh: sum x^(2k+1)/(2k+1)!
    return sum(x ** (2 * k + 1) / math.factorial(2 * k + 1) for k in range(terms))


def test_profile_examples():
    assert g.make_profile("euclidean")(2.0) == 2.0
    assert g.make_profile("hyperbolic")(1.0) == pytest.approx(sinh_series(1.0), rel=1e-15)
    assert g.make_profile("hyperbolic")(1.0) == pytest.approx(1.1752011936438014, rel=1e-15)
    assert g.make_profile("power", {"b": 0.5})(4.0) == pytest.approx(2.0, rel=1e-15)


def test_exponential_is_normalized_near_origin():
    f = g.make_profile("exponential", {"rate": 3.0})
    r = np.array([1e-9, 1e-6])
    np.testing.assert_allclose(f(r) / (3.0 * r), 1.0, rtol=1e-5)


@pytest.mark.parametrize(
    "kind, params",
    [
        ("power", {"b": 0.0}),
        ("power", {"b": -1.0}),
        ("power", {}),
        ("exponential", {"rate": -2.0}),
        ("euclidean", {"b": 1.0}),
        ("spherical", {}),
        ("power", {"b": float("nan")}),
    ],
)
def test_invalid_params(kind, params):
    with pytest.raises(InvalidProfile):
        g.make_profile(kind, params)


@pytest.mark.parametrize(
    "table",
    [
        {"r": [1.0, 0.5, 2.0], "f": [1.0, 1.0, 1.0]},
        {"r": [0.0, 1.0], "f": [1.0, 1.0]},
        {"r": [1.0, 2.0], "f": [1.0, -1.0]},
        {"r": [1.0, 2.0, 3.0], "f": [1.0, 2.0]},
        {"r": [1.0], "f": [1.0]},
    ],
)
def test_invalid_tables(table):
    with pytest.raises(InvalidProfile):
        g.make_profile("table", table=table)


def test_nonpositive_radius_is_an_error():
    f = g.make_profile("euclidean")
    with pytest.raises(InvalidProfile):
        f(0.0)
    with pytest.raises(InvalidProfile):
        f(np.array([1.0, -1.0]))


def test_table_profile_shape_preserving_and_bounded():
    r = np.array([0.5, 1.0, 2.0, 4.0, 8.0])
    f = g.make_profile("table", table={"r": r, "f": np.sqrt(r)})
    x = np.linspace(0.5, 8.0, 2001)
    y = f(x)
    assert np.all(y > 0)
    assert np.all(np.diff(y) >= 0)          # monotone data stays monotone
    np.testing.assert_allclose(f(r), np.sqrt(r), rtol=1e-15)
    assert np.all(f.derivative(x) >= 0)
    with pytest.raises(OutOfTableRange):
        f(9.0)
    with pytest.raises(OutOfTableRange):
        f(0.25)


@pytest.mark.parametrize("kind, params", [("euclidean", None), ("hyperbolic", None),
                                          ("power", {"b": 1.7}), ("exponential", {"rate": 0.5})])
def test_derivative_matches_finite_difference(kind, params):
    f = g.make_profile(kind, params)
    r = np.array([0.3, 1.0, 2.5, 7.0])
    h = 1e-6 * r
    fd = (f(r + h) - f(r - h)) / (2 * h)
    np.testing.assert_allclose(f.derivative(r), fd, rtol=1e-7)


@pytest.mark.parametrize("kind, params", [("hyperbolic", None), ("exponential", {"rate": 2.0})])
def test_log_power_overflow_safe(kind, params):
    f = g.make_profile(kind, params)
    r = np.array([0.01, 0.5, 2.0, 30.0])
    np.testing.assert_allclose(f.log(r), np.log(f(r)), rtol=1e-13)
    assert np.isfinite(f.log(np.array([5000.0]))[0])
    assert f.power(np.array([5000.0]), -2.0)[0] == 0.0


def test_model_space_validation():
    prof = g.euclidean()
    for n in (1, 2.5, True):
        with pytest.raises(InvalidSpace):
            g.ModelSpace(prof, n, 2.0)
    for p in (1.0, 0.5, float("inf")):
        with pytest.raises(InvalidSpace):
            g.ModelSpace(prof, 2, p)


def test_omega_and_q():
    assert space(n=2).omega_n == pytest.approx(math.pi)
    assert space(n=3).omega_n == pytest.approx(4 * math.pi / 3)
    assert space(n=4).omega_n == pytest.approx(math.pi ** 2 / 2)
    assert space(n=3, p=1.5).q == pytest.approx(4.0)
    assert space(n=4, p=4.0).q == 1.0


# --------------------------------------------------------------------------
# volumes
# --------------------------------------------------------------------------
def test_ball_volume_examples():
    assert g.ball_volume(space(n=2), 1.0) == pytest.approx(math.pi, rel=1e-12)
    assert g.ball_volume(space(n=3), 2.0) == pytest.approx(32 * math.pi / 3, rel=1e-12)
    # 2 pi (cosh 1 - 1) = 3.41227626528...
    vol = g.ball_volume(space("hyperbolic"), 1.0)
    assert vol == pytest.approx(2 * math.pi * (math.cosh(1.0) - 1.0), rel=1e-10)
    assert vol == pytest.approx(3.412276265285, rel=1e-10)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_euclidean_ball_volume(n, R):
    sp = space(n=n)
    assert g.ball_volume(sp, R) == pytest.approx(sp.omega_n * R ** n, rel=1e-10)


def test_ball_volume_full_output():
    res = g.ball_volume(space(n=3), 1.0, full_output=True)
    assert res.classification == "converged"
    assert res.error_estimate < 1e-9


def test_ball_volume_detects_divergence_at_pole():
    class Singular:
        def area_density(self, r):
            return 1.0 / np.asarray(r) ** 2

        def label(self):
            return "singular"

    with pytest.raises(DivergentAtOrigin):
        g.ball_volume(Singular(), 1.0)


def test_annulus_examples():
    assert g.annulus_volume(space(n=2), 1.0, 2.0) == pytest.approx(3 * math.pi, rel=1e-12)
    assert g.annulus_volume(space(n=3), 1.0, 2.0) == pytest.approx(28 * math.pi / 3, rel=1e-12)
    assert g.annulus_volume(space("power", n=2, b=2.0), 1.0, 2.0) == pytest.approx(14 * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("R1, R2", [(2.0, 1.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (1.0, math.inf)])
def test_bad_annulus(R1, R2):
    with pytest.raises(BadAnnulus):
        g.annulus_volume(space(), R1, R2)


def test_table_ball_volume_needs_pole():
    # the table does not reach r = 0, so the volume from the pole is unavailable
    f = g.make_profile("table", table={"r": [0.5, 1.0, 2.0], "f": [0.5, 1.0, 2.0]})
    sp = g.ModelSpace(f, 2, 2.0)
    with pytest.raises(OutOfTableRange):
        g.ball_volume(sp, 1.0)
    assert g.annulus_volume(sp, 0.5, 2.0) == pytest.approx(math.pi * (4 - 0.25), rel=1e-10)


SPACES = [
    ("euclidean", 2, {}), ("euclidean", 4, {}), ("hyperbolic", 3, {}),
    ("power", 2, {"b": 0.5}), ("exponential", 2, {"rate": 1.0}),
]


@settings(max_examples=30, deadline=None)
@given(
    which=st.integers(0, len(SPACES) - 1),
    R1=st.floats(0.1, 5.0),
    d1=st.floats(0.01, 5.0),
    d2=st.floats(0.01, 5.0),
)
def test_annulus_additive_and_ball_increasing(which, R1, d1, d2):
    kind, n, params = SPACES[which]
    sp = space(kind, n, 2.0, **params)
    R2, R3 = R1 + d1, R1 + d1 + d2
    a12 = g.annulus_volume(sp, R1, R2)
    a23 = g.annulus_volume(sp, R2, R3)
    a13 = g.annulus_volume(sp, R1, R3)
    assert a12 + a23 == pytest.approx(a13, rel=1e-9)
    assert g.ball_volume(sp, R1) < g.ball_volume(sp, R2) < g.ball_volume(sp, R3)
    assert g.ball_volume(sp, R2) - g.ball_volume(sp, R1) == pytest.approx(a12, rel=1e-8)


@pytest.mark.parametrize("R", [14.0, 20.0, 50.0])
def test_large_hyperbolic_ball_is_finite(R):
    # 4 pi int_0^R sinh^2 = pi (sinh 2R - 2R)
    assert g.ball_volume(space("hyperbolic", 3), R) == pytest.approx(math.pi * (math.sinh(2 * R) - 2 * R), rel=1e-10)
